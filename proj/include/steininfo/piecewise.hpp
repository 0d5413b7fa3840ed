#pragma once

#include <functional>
#include <optional>
#include <variant>

#include "steininfo/density.hpp"

namespace steininfo {

/* Density atoms. A law is a finite sum of atoms; each atom has a closed-form
   density, derivative and cdf both raw and under Gaussian smoothing, so the
   law of a*X + s*Z stays exactly evaluable for every noise level s. */
struct GaussPiece {
  double w, mu, sigma;  // mass w of N(mu, sigma^2)
};
struct ExpPiece {
  double c, lambda, x0;  // c * exp(-lambda*dir*(x - x0))
  int dir;               // +1 on (x0, inf), -1 on (-inf, x0)
};
struct FlatPiece {
  double h, lo, hi;  // constant height h on [lo, hi]
};
using Piece = std::variant<GaussPiece, ExpPiece, FlatPiece>;

using BaseSampler = std::function<double(SampleStream&)>;

class PiecewiseLaw final : public Law1D {
 public:
  /* Law of a*X0 + s*Z where X0 is the atom sum (must integrate to 1) and Z
     is an independent standard normal. a > 0; s >= 0. */
  PiecewiseLaw(std::string name, std::vector<Piece> pieces, BaseSampler sampler,
               double a = 1.0, double s = 0.0);

  std::string name() const override { return name_; }
  double pdf(double x) const override;
  double dpdf(double x) const override;
  double cdf(double x) const override;
  double mean() const override { return a_ * base_mean_; }
  double variance() const override { return a_ * a_ * base_var_ + s_ * s_; }
  Support support() const override;
  double sample(SampleStream& st) const override;
  std::vector<double> breakpoints() const override;
  std::vector<Jump> jumps() const override;
  bool regular_score() const override;
  LawPtr scaled_noisy(double a, double s) const override;

  // Piece edges mapped to the output scale; useful quadrature split hints
  // even when smoothing has removed the actual discontinuities.
  std::vector<double> edge_hints() const;

  double noise_sigma() const { return s_; }
  double base_scale() const { return a_; }
  const std::vector<Piece>& pieces() const { return pieces_; }

  void set_closed_form_kernel(std::function<double(double)> k) {
    kernel_cf_ = std::move(k);
  }
  const std::function<double(double)>& closed_form_kernel() const {
    return kernel_cf_;
  }

 private:
  std::string name_;
  std::vector<Piece> pieces_;
  BaseSampler base_sampler_;
  double a_, s_;
  double base_mean_ = 0.0, base_var_ = 0.0;
  double base_lo_ = -kInf, base_hi_ = kInf;  // base support hull
  std::function<double(double)> kernel_cf_;
};

}  // namespace steininfo
