#include "steininfo/multivariate.hpp"

#include <cmath>
#include <variant>

#include "steininfo/functionals.hpp"
#include "steininfo/registry.hpp"
#include "steininfo/special.hpp"

namespace steininfo {

namespace {

bool is_gaussian_law(const LawPtr& law) {
  const auto pw = as_piecewise(law);
  return pw && pw->pieces().size() == 1 &&
         std::holds_alternative<GaussPiece>(pw->pieces()[0]);
}

void check_dim(int want, const VectorXd& x, const char* what) {
  if (x.size() != want)
    throw DomainError(std::string(what) + ": expected a vector of dimension " +
                      std::to_string(want) + ", got " +
                      std::to_string(x.size()));
}

// Component window: support intersected with mean +- 40 sd.
std::pair<double, double> component_window(const Law1D& law) {
  const Support s = law.support();
  const double span = kSigmaTruncation * law.std_dev();
  return {std::max(s.lo, law.mean() - span), std::min(s.hi, law.mean() + span)};
}

/* E[g(U)] over the independent components by nested adaptive quadrature,
   d = 2 only. The outer panel structure uses the component's own cut
   points so kinks and jumps are resolved. */
double product_expectation_u(const ProductModel& m,
                             const std::function<double(const VectorXd&)>& g) {
  if (m.dim() != 2)
    throw CapabilityError(
        "product expectation: nested quadrature implemented for d = 2");
  const Law1D& a = *m.components()[0];
  const Law1D& b = *m.components()[1];
  const auto [alo, ahi] = component_window(a);
  const auto [blo, bhi] = component_window(b);
  const auto bcuts = law_cuts(b);
  QuadratureSpec inner;
  inner.abs_tol = 1e-12;
  QuadratureSpec outer;
  outer.abs_tol = 1e-10;
  VectorXd u(2);
  return integrate(
      [&](double x) {
        u[0] = x;
        const double fx = a.pdf(x);
        if (fx < kDensityFloor) return 0.0;
        return fx * integrate(
                        [&](double y) {
                          u[1] = y;
                          return b.pdf(y) * g(u);
                        },
                        blo, bhi, inner, bcuts);
      },
      alo, ahi, outer, law_cuts(a));
}

// Pairs of 1-D suite indices tensored into the 2-D suite.
constexpr int kTensorPairs[][2] = {{0, 0}, {1, 0}, {0, 1}, {2, 2}};

struct TensorFunction {
  TestFunction a, b;
  double value(const VectorXd& u) const { return a.value(u[0]) * b.value(u[1]); }
  VectorXd grad(const VectorXd& u) const {
    VectorXd g(2);
    g[0] = a.deriv(u[0]) * b.value(u[1]);
    g[1] = a.value(u[0]) * b.deriv(u[1]);
    return g;
  }
};

std::vector<TensorFunction> tensor_suite(const ProductModel& m) {
  if (m.dim() != 2)
    throw CapabilityError("identity checks implemented for d = 2");
  const auto sa = test_suite(*m.components()[0]);
  const auto sb = test_suite(*m.components()[1]);
  std::vector<TensorFunction> out;
  for (const auto& pair : kTensorPairs)
    out.push_back({sa[pair[0]], sb[pair[1]]});
  return out;
}

std::uint64_t coordinate_seed(std::uint64_t seed, int j) {
  return seed + 0x9e3779b97f4a7c15ull * static_cast<std::uint64_t>(j + 1);
}

// Component standardized to unit variance (the channel ops' precondition).
LawPtr standardized(const LawPtr& law) {
  const double sd = law->std_dev();
  if (std::fabs(sd - 1.0) < 1e-12) return law;
  LawPtr scaled = law->scaled_noisy(1.0 / sd, 0.0);
  if (!scaled)
    throw CapabilityError(law->name() +
                          ": component cannot be rescaled in closed form");
  return scaled;
}

}  // namespace

GaussianModel::GaussianModel(MatrixXd covariance) : cov_(std::move(covariance)) {
  if (cov_.rows() == 0 || cov_.rows() != cov_.cols())
    throw DomainError("gaussian model: covariance must be square and nonempty");
  if (!cov_.isApprox(cov_.transpose(), 1e-12))
    throw DomainError("gaussian model: covariance must be symmetric");
  Eigen::LLT<MatrixXd> llt(cov_);
  if (llt.info() != Eigen::Success)
    throw DomainError("gaussian model: covariance must be positive definite");
  chol_ = llt.matrixL();
  prec_ = llt.solve(MatrixXd::Identity(dim(), dim()));
  double log_det = 0.0;
  for (int i = 0; i < dim(); ++i) log_det += 2.0 * std::log(chol_(i, i));
  log_norm_ = -0.5 * (dim() * kLog2Pi + log_det);
}

double GaussianModel::log_pdf(const VectorXd& z) const {
  check_dim(dim(), z, "gaussian log_pdf");
  return log_norm_ - 0.5 * z.dot(prec_ * z);
}

VectorXd GaussianModel::sample(SampleStream& s) const {
  VectorXd u(dim());
  for (int i = 0; i < dim(); ++i) u[i] = s.next_gaussian();
  return chol_ * u;
}

ProductModel::ProductModel(std::vector<LawPtr> components)
    : ProductModel(std::move(components), MatrixXd()) {}

ProductModel::ProductModel(std::vector<LawPtr> components, MatrixXd linear_map)
    : components_(std::move(components)) {
  if (components_.empty())
    throw DomainError("product model: at least one component required");
  for (const auto& c : components_) {
    if (!c) throw DomainError("product model: null component");
    if (std::fabs(c->mean()) > 1e-9)
      throw DomainError(c->name() + ": product components must be centered");
  }
  const int d = dim();
  if (linear_map.size() == 0) {
    map_ = MatrixXd::Identity(d, d);
    inv_map_ = map_;
    identity_ = true;
  } else {
    if (linear_map.rows() != d || linear_map.cols() != d)
      throw DomainError("product model: the linear map must be d x d");
    Eigen::FullPivLU<MatrixXd> lu(linear_map);
    if (!lu.isInvertible())
      throw DomainError("product model: the linear map must be invertible");
    map_ = std::move(linear_map);
    inv_map_ = lu.inverse();
    identity_ = map_.isIdentity(1e-15);
  }
  log_det_ = std::log(std::fabs(map_.determinant()));
  VectorXd vars(d);
  for (int j = 0; j < d; ++j) vars[j] = components_[j]->variance();
  cov_ = map_ * vars.asDiagonal() * map_.transpose();
  all_gaussian_ = true;
  for (const auto& c : components_) all_gaussian_ &= is_gaussian_law(c);
}

double ProductModel::log_pdf(const VectorXd& x) const {
  check_dim(dim(), x, "product log_pdf");
  const VectorXd u = inv_map_ * x;
  double lp = -log_det_;
  for (int j = 0; j < dim(); ++j) lp += components_[j]->log_pdf(u[j]);
  return lp;
}

VectorXd ProductModel::score(const VectorXd& x) const {
  check_dim(dim(), x, "product score");
  const VectorXd u = inv_map_ * x;
  VectorXd rho(dim());
  for (int j = 0; j < dim(); ++j) {
    if (!components_[j]->support().contains(u[j]))
      throw DomainError("product score: coordinate " + std::to_string(j) +
                        " outside the open support of " +
                        components_[j]->name());
    rho[j] = components_[j]->score(u[j]);
  }
  return inv_map_.transpose() * rho;
}

VectorXd ProductModel::sample(SampleStream& s) const {
  VectorXd u(dim());
  for (int j = 0; j < dim(); ++j) u[j] = components_[j]->sample(s);
  return map_ * u;
}

MatrixXd SteinMatrix::operator()(const VectorXd& x) const {
  if (is_constant()) return constant_;
  const int d = dim();
  check_dim(d, x, "stein matrix");
  MatrixXd out = MatrixXd::Zero(d, d);
  for (int j = 0; j < d; ++j) out(j, j) = (*diag_[j])(x[j]);
  return out;
}

int SteinMatrix::dim() const {
  return is_constant() ? static_cast<int>(constant_.rows())
                       : static_cast<int>(diag_.size());
}

SteinMatrix stein_matrix(const GaussianModel& model) {
  SteinMatrix out;
  out.constant_ = model.covariance();
  return out;
}

SteinMatrix stein_matrix(const ProductModel& model) {
  SteinMatrix out;
  if (model.identity_map()) {
    for (const auto& c : model.components()) {
      auto k = std::make_shared<SteinKernel1D>(c);
      if (k->provenance() == KernelProvenance::Quadrature)
        out.prov_ = KernelProvenance::Quadrature;
      out.diag_.push_back(std::move(k));
    }
    return out;
  }
  if (model.all_gaussian()) {
    out.constant_ = model.covariance();
    return out;
  }
  throw CapabilityError(
      "stein matrix: a linearly mixed product has a canonical kernel only "
      "when every component is Gaussian");
}

namespace {

/* Both identities are X-space statements checked with test functions
   phi(x) = psi(L^{-1} x), psi a tensor of 1-D suite members over component
   windows, so grad phi = L^{-T} grad psi and the expectation runs over the
   component coordinates. */
IdentityCheck product_identity_residuals(
    const ProductModel& model,
    const std::function<double(const VectorXd& u, const TensorFunction& psi,
                               int j)>& integrand) {
  const auto suite = tensor_suite(model);
  IdentityCheck out;
  for (const auto& psi : suite) {
    double worst = 0.0;
    for (int j = 0; j < 2; ++j) {
      const double r = product_expectation_u(
          model, [&](const VectorXd& u) { return integrand(u, psi, j); });
      worst = std::max(worst, std::fabs(r));
    }
    out.per_function.push_back(worst);
    out.max_residual = std::max(out.max_residual, worst);
  }
  return out;
}

double interior_score(const Law1D& law, double u) {
  return law.support().contains(u) ? law.score(u) : 0.0;
}

}  // namespace

IdentityCheck verify_score_identity(const ProductModel& model) {
  const MatrixXd inv_t = model.linear_map().inverse().transpose();
  return product_identity_residuals(
      model, [&](const VectorXd& u, const TensorFunction& psi, int j) {
        VectorXd rho_u(2);
        for (int k = 0; k < 2; ++k)
          rho_u[k] = interior_score(*model.components()[k], u[k]);
        const VectorXd rho_x = inv_t * rho_u;
        const VectorXd grad_x = inv_t * psi.grad(u);
        return rho_x[j] * psi.value(u) + grad_x[j];
      });
}

IdentityCheck verify_stein_identity(const ProductModel& model) {
  const auto kernel = stein_matrix(model);
  const MatrixXd inv_t = model.linear_map().inverse().transpose();
  const bool identity = model.identity_map();
  return product_identity_residuals(
      model, [&](const VectorXd& u, const TensorFunction& psi, int j) {
        const VectorXd x = identity ? u : VectorXd(model.linear_map() * u);
        const MatrixXd tau = kernel(identity ? u : x);
        const VectorXd grad_x = inv_t * psi.grad(u);
        return (tau.row(j) * grad_x)(0) - x[j] * psi.value(u);
      });
}

InfoMatrixReport info_matrices(const GaussianModel& model) {
  InfoMatrixReport out;
  out.fisher = model.precision();
  out.relative = MatrixXd::Zero(model.dim(), model.dim());
  out.jst = 0.0;
  return out;
}

InfoMatrixReport info_matrices(const ProductModel& model) {
  const int d = model.dim();
  MatrixXd ju = MatrixXd::Zero(d, d), ru = MatrixXd::Zero(d, d);
  InfoMatrixReport out;
  for (int j = 0; j < d; ++j) {
    const auto& c = model.components()[j];
    const auto fi = fisher_information(c);
    const auto rel = relative_fisher(c);
    ju(j, j) = fi.value;
    ru(j, j) = rel.j_rel;
    out.jst += rel.j_st;
    out.boundary_divergent |= fi.boundary_divergent || rel.boundary_divergent;
  }
  if (model.identity_map()) {
    out.fisher = std::move(ju);
    out.relative = std::move(ru);
  } else {
    // rho_X + B_X^{-1} x = L^{-T} (rho_U + B_U^{-1} u): both matrices
    // conjugate by L^{-T} ... L^{-1} and tr(B J_rel) is unchanged.
    const MatrixXd inv_t = model.linear_map().inverse().transpose();
    out.fisher = inv_t * ju * inv_t.transpose();
    out.relative = inv_t * ru * inv_t.transpose();
  }
  return out;
}

ProductChannelReport theorem1_jst_product(const ProductModel& model, double t,
                                          const MCSpec& mc,
                                          const RegressorSpec& reg) {
  const int d = model.dim();
  ProductChannelReport out;
  if (model.all_gaussian()) {
    // The channel preserves the covariance and the representation target
    // vanishes identically: J_st = 0, J(X_t) = C^{-1} exactly.
    out.jst = {0.0, 0.0};
    out.fisher = GaussianModel(model.covariance()).precision();
    return out;
  }
  if (!model.identity_map())
    throw CapabilityError(
        "channel estimators need independent coordinates; linearly mixed "
        "products are supported only when all components are Gaussian");
  out.fisher = MatrixXd::Zero(d, d);
  double var = 0.0;
  for (int j = 0; j < d; ++j) {
    const auto& comp = model.components()[j];
    const auto point = make_channel_point(standardized(comp), t);
    MCSpec coord = mc;
    coord.seed = coordinate_seed(mc.seed, j);
    const auto rep = theorem1_jst(point, coord, reg);
    // J_st is scale invariant; the Fisher matrix entry scales as 1/variance.
    out.jst.value += rep.jst.value;
    var += rep.jst.std_error * rep.jst.std_error;
    out.fisher(j, j) = rep.fisher.value / comp->variance();
    out.coordinates.push_back(rep);
  }
  out.jst.std_error = std::sqrt(var);
  return out;
}

ProductMmseReport mmse_product(const ProductModel& model, double t,
                               const MCSpec& mc, const RegressorSpec& reg) {
  const int d = model.dim();
  if (!model.identity_map() && !model.all_gaussian())
    throw CapabilityError(
        "channel estimators need independent coordinates; linearly mixed "
        "products are supported only when all components are Gaussian");
  ProductMmseReport out;
  out.matrix = MatrixXd::Zero(d, d);
  if (model.all_gaussian() && !model.identity_map()) {
    // Jointly Gaussian estimation error: (1 - t) C exactly.
    out.matrix = (1.0 - t) * model.covariance();
    return out;
  }
  for (int j = 0; j < d; ++j) {
    const auto& comp = model.components()[j];
    const auto point = make_channel_point(standardized(comp), t);
    MCSpec coord = mc;
    coord.seed = coordinate_seed(mc.seed, j);
    MomentEstimate m = mmse(point, coord, reg);
    m.value *= comp->variance();
    m.std_error *= comp->variance();
    out.matrix(j, j) = m.value;
    out.coordinates.push_back(m);
  }
  return out;
}

}  // namespace steininfo
