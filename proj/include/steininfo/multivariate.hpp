#pragma once

#include <Eigen/Dense>
#include <memory>
#include <vector>

#include "steininfo/representations.hpp"
#include "steininfo/stein.hpp"

namespace steininfo {

using Eigen::MatrixXd;
using Eigen::VectorXd;

// Centered Gaussian with covariance C: score -C^{-1} z exactly, Stein
// matrix the constant C.
class GaussianModel {
 public:
  explicit GaussianModel(MatrixXd covariance);

  int dim() const { return static_cast<int>(cov_.rows()); }
  const MatrixXd& covariance() const { return cov_; }
  const MatrixXd& precision() const { return prec_; }

  double log_pdf(const VectorXd& z) const;
  double pdf(const VectorXd& z) const { return std::exp(log_pdf(z)); }
  VectorXd score(const VectorXd& z) const { return -prec_ * z; }
  VectorXd sample(SampleStream& s) const;

 private:
  MatrixXd cov_, prec_, chol_;
  double log_norm_ = 0.0;
};

/* Independent 1-D components U, optionally pushed through an invertible
   linear map: X = L U. The density factorizes over components before the
   map; covariance = L diag(component variances) L^T. */
class ProductModel {
 public:
  explicit ProductModel(std::vector<LawPtr> components);
  ProductModel(std::vector<LawPtr> components, MatrixXd linear_map);

  int dim() const { return static_cast<int>(components_.size()); }
  const std::vector<LawPtr>& components() const { return components_; }
  bool identity_map() const { return identity_; }
  const MatrixXd& linear_map() const { return map_; }
  const MatrixXd& covariance() const { return cov_; }
  bool all_gaussian() const { return all_gaussian_; }

  double log_pdf(const VectorXd& x) const;
  double pdf(const VectorXd& x) const { return std::exp(log_pdf(x)); }
  /* L^{-T} rho_U(L^{-1} x); throws DomainError naming the coordinate that
     leaves its component's open support. */
  VectorXd score(const VectorXd& x) const;
  VectorXd sample(SampleStream& s) const;

 private:
  std::vector<LawPtr> components_;
  MatrixXd map_, inv_map_, cov_;
  double log_det_ = 0.0;
  bool identity_ = true;
  bool all_gaussian_ = false;
};

/* Matrix Stein kernel: either a constant matrix (Gaussian case) or the
   diagonal field of the components' 1-D kernels (identity-map products). */
class SteinMatrix {
 public:
  MatrixXd operator()(const VectorXd& x) const;
  bool is_constant() const { return diag_.empty(); }
  KernelProvenance provenance() const { return prov_; }
  int dim() const;

 private:
  friend SteinMatrix stein_matrix(const GaussianModel&);
  friend SteinMatrix stein_matrix(const ProductModel&);
  SteinMatrix() = default;

  MatrixXd constant_;
  std::vector<std::shared_ptr<const SteinKernel1D>> diag_;
  KernelProvenance prov_ = KernelProvenance::ClosedForm;
};

SteinMatrix stein_matrix(const GaussianModel& model);
/* Identity map: diag of component kernels. A non-identity map keeps a
   canonical kernel only when every component is Gaussian (the model is then
   Gaussian with covariance L diag L^T); otherwise CapabilityError. */
SteinMatrix stein_matrix(const ProductModel& model);

// max_k max_j | E[rho_j phi_k] + E[d_j phi_k] | by nested quadrature (d=2).
IdentityCheck verify_score_identity(const ProductModel& model);
// max_k max_j | E[(tau grad phi_k)_j] - E[x_j phi_k] | (d=2).
IdentityCheck verify_stein_identity(const ProductModel& model);

struct InfoMatrixReport {
  MatrixXd fisher;    // J = E[rho rho^T]
  MatrixXd relative;  // E[(rho + B^{-1}x)(rho + B^{-1}x)^T]
  double jst = 0.0;   // tr(B relative)
  bool boundary_divergent = false;
};
InfoMatrixReport info_matrices(const GaussianModel& model);
/* Components integrate coordinatewise; a linear map conjugates both
   matrices by L^{-T} ... L^{-1} and leaves jst unchanged. */
InfoMatrixReport info_matrices(const ProductModel& model);

/* Channel functionals of X_t = sqrt(t) X + sqrt(1-t) Z for product models.
   Independent coordinates make every conditional expectation coordinatewise,
   so each coordinate runs the 1-D estimator on its standardized component
   with a decorrelated stream; totals combine in quadrature. All-Gaussian
   models short-circuit to the exact values. */
struct ProductChannelReport {
  MomentEstimate jst;                       // total J_st(X_t)
  MatrixXd fisher;                          // matrix J(X_t) estimate
  std::vector<Theorem1Report> coordinates;  // empty for the exact path
};
ProductChannelReport theorem1_jst_product(const ProductModel& model, double t,
                                          const MCSpec& mc,
                                          const RegressorSpec& reg = {});

struct ProductMmseReport {
  MatrixXd matrix;  // diagonal error covariance estimate
  std::vector<MomentEstimate> coordinates;
};
ProductMmseReport mmse_product(const ProductModel& model, double t,
                               const MCSpec& mc, const RegressorSpec& reg = {});

}  // namespace steininfo
