#pragma once

#include <functional>
#include <memory>
#include <vector>

#include "steininfo/density.hpp"

namespace steininfo {

enum class KernelProvenance { ClosedForm, Quadrature };

// The canonical kernel tau(x) = f(x)^{-1} * \int_x^inf y f(y) dy. The upper
// partial first moment vanishes at both support edges (the mean is zero), so
// E[tau(X) phi'(X)] = E[X phi(X)] holds for bounded smooth phi with no
// boundary terms, for every registered model.
class SteinKernel1D {
 public:
  explicit SteinKernel1D(LawPtr model);

  double operator()(double x) const;
  // Upper partial first moment H(x) = \int_x^sup y f(y) dy.
  double partial_first_moment(double x) const;

  KernelProvenance provenance() const { return prov_; }
  const Law1D& model() const { return *model_; }
  LawPtr model_ptr() const { return model_; }

  // Shifted copy (tau + delta): deliberately wrong, for negative controls.
  SteinKernel1D perturbed(double delta) const;

 private:
  LawPtr model_;
  std::function<double(double)> closed_;  // tau directly, when available
  std::function<double(double)> moment_;  // resolved H(x)
  KernelProvenance prov_ = KernelProvenance::Quadrature;
  double shift_ = 0.0;
};

// Smooth compactly supported test functions x^k * bump, k = 0..4, scaled to
// the model's interior window. Every suite member and its derivative vanish
// at the window edges to all orders.
struct TestFunction {
  std::function<double(double)> value;
  std::function<double(double)> deriv;
  double lo, hi;  // support window
};

std::vector<TestFunction> test_suite(const Law1D& model);

struct IdentityCheck {
  double max_residual = 0.0;
  std::vector<double> per_function;
};

// max_k | E[rho(X) phi_k(X)] + E[phi_k'(X)] |
IdentityCheck verify_score_identity(const Law1D& model);
// max_k | E[tau(X) phi_k'(X)] - E[X phi_k(X)] |
IdentityCheck verify_stein_identity(const SteinKernel1D& kernel);

// E[(1 - tau(X))^2]; zero exactly for the Gaussian.
double kernel_discrepancy(const LawPtr& model);

}  // namespace steininfo
