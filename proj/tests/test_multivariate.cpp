#include <cmath>

#include "doctest.h"
#include "steininfo/functionals.hpp"
#include "steininfo/multivariate.hpp"
#include "steininfo/registry.hpp"

using namespace steininfo;

namespace {

MatrixXd mixing_map() {
  MatrixXd l(2, 2);
  l << 1.0, 0.0, 0.7, 0.5;
  return l;
}

// Exact estimation-error value implied by the channel Fisher information:
// M = (1-t)(1 - (1-t) J(X_t)) / t, all terms by quadrature.
double mmse_oracle(const LawPtr& base, double t) {
  const double j = jst_quadrature(channel_law(base, t)) + 1.0;
  return (1.0 - t) * (1.0 - (1.0 - t) * j) / t;
}

}  // namespace

TEST_SUITE_BEGIN("multivariate");

TEST_CASE("gaussian model: score, density and sampling match the covariance") {
  MatrixXd c(2, 2);
  c << 2.0, 0.6, 0.6, 1.0;
  const GaussianModel g(c);
  CHECK(g.dim() == 2);
  CHECK((g.covariance() * g.precision()).isIdentity(1e-12));

  VectorXd z(2);
  z << 0.8, -1.1;
  CHECK(g.score(z).isApprox(-g.precision() * z, 1e-12));
  const double quad = z.dot(g.precision() * z);
  const double det = c.determinant();
  CHECK(g.log_pdf(z) == doctest::Approx(-0.5 * (quad + std::log(det)) -
                                        std::log(2.0 * 3.14159265358979324)));

  SampleStream st(11, 0);
  MatrixXd acc = MatrixXd::Zero(2, 2);
  const int n = 40000;
  for (int i = 0; i < n; ++i) {
    const VectorXd x = g.sample(st);
    acc += x * x.transpose();
  }
  acc /= n;
  CHECK((acc - c).cwiseAbs().maxCoeff() < 0.05);

  CHECK(stein_matrix(g).is_constant());
  CHECK(stein_matrix(g)(z).isApprox(c));

  const auto info = info_matrices(g);
  CHECK(info.fisher.isApprox(g.precision(), 1e-12));
  CHECK(info.relative.isZero(0.0));
  CHECK(info.jst == 0.0);

  MatrixXd bad(2, 2);
  bad << 1.0, 2.0, 2.0, 1.0;  // indefinite
  CHECK_THROWS_AS(GaussianModel{bad}, const DomainError&);
}

TEST_CASE("product model factorizes and scores coordinatewise") {
  const auto u = model_by_name("uniform");
  const auto e = model_by_name("exponential");
  const ProductModel p({u, e});
  CHECK(p.dim() == 2);
  CHECK(p.identity_map());
  CHECK(p.covariance().isIdentity(1e-12));
  CHECK_FALSE(p.all_gaussian());

  VectorXd x(2);
  x << 0.4, 1.3;
  CHECK(p.pdf(x) == doctest::Approx(u->pdf(0.4) * e->pdf(1.3)));
  const VectorXd rho = p.score(x);
  CHECK(rho[0] == u->score(0.4));
  CHECK(rho[1] == e->score(1.3));

  x << 0.0, -1.5;  // second coordinate below the exponential support
  CHECK_THROWS_AS(p.score(x), const DomainError&);

  SampleStream st(3, 0);
  VectorXd mean = VectorXd::Zero(2), mom2 = VectorXd::Zero(2);
  const int n = 20000;
  for (int i = 0; i < n; ++i) {
    const VectorXd s = p.sample(st);
    mean += s;
    mom2 += s.cwiseProduct(s);
  }
  CHECK((mean / n).cwiseAbs().maxCoeff() < 0.03);
  CHECK((mom2 / n - VectorXd::Ones(2)).cwiseAbs().maxCoeff() < 0.05);

  CHECK_THROWS_AS(ProductModel({}), const DomainError&);
  CHECK_THROWS_AS(ProductModel({u, nullptr}), const DomainError&);
  CHECK_THROWS_AS(ProductModel({u, e}, MatrixXd::Zero(2, 2)),
                  const DomainError&);
}

TEST_CASE("a linear map of gaussian components is the mapped gaussian") {
  const auto g1 = model_by_name("gaussian");
  const ProductModel p({g1, g1}, mixing_map());
  CHECK(p.all_gaussian());
  CHECK_FALSE(p.identity_map());

  const MatrixXd c = mixing_map() * mixing_map().transpose();
  CHECK(p.covariance().isApprox(c, 1e-12));
  const GaussianModel reference(c);

  VectorXd x(2);
  for (double a : {-0.9, 0.3, 1.7}) {
    x << a, 0.5 - a;
    CHECK(p.log_pdf(x) == doctest::Approx(reference.log_pdf(x)));
    CHECK(p.score(x).isApprox(reference.score(x), 1e-10));
  }

  const auto tau = stein_matrix(p);
  CHECK(tau.is_constant());
  CHECK(tau(x).isApprox(c, 1e-12));

  const auto info = info_matrices(p);
  CHECK(info.fisher.isApprox(reference.precision(), 1e-9));
  CHECK(info.jst == doctest::Approx(0.0).epsilon(1e-9));
}

TEST_CASE("stein matrix field of an identity-map product") {
  const auto e = model_by_name("exponential");
  const ProductModel p({e, e});
  const auto tau = stein_matrix(p);
  CHECK_FALSE(tau.is_constant());

  VectorXd x = VectorXd::Zero(2);
  CHECK(tau(x).isApprox(MatrixXd::Identity(2, 2), 1e-12));
  x << 0.5, 2.0;
  MatrixXd want(2, 2);
  want << 1.5, 0.0, 0.0, 3.0;  // the exponential kernel is x + 1
  CHECK(tau(x).isApprox(want, 1e-12));

  const ProductModel mapped({e, e}, mixing_map());
  CHECK_THROWS_AS(stein_matrix(mapped), const CapabilityError&);
}

TEST_CASE("defining identities hold for products by nested quadrature") {
  const ProductModel p({model_by_name("uniform"), model_by_name("exponential")});
  CHECK(verify_score_identity(p).max_residual < 1e-8);
  CHECK(verify_stein_identity(p).max_residual < 1e-8);

  const auto g = model_by_name("gaussian");
  const ProductModel mixed({g, g}, mixing_map());
  CHECK(verify_score_identity(mixed).max_residual < 1e-8);
  CHECK(verify_stein_identity(mixed).max_residual < 1e-8);
}

TEST_CASE("information matrices of products reduce to coordinate values") {
  const auto a = model_by_name("exponential_smoothed");
  const auto b = model_by_name("laplace_smoothed");
  const ProductModel p({a, b});
  const auto info = info_matrices(p);

  CHECK(info.fisher(0, 1) == 0.0);
  CHECK(info.fisher(0, 0) == doctest::Approx(fisher_information(a).value));
  CHECK(info.fisher(1, 1) == doctest::Approx(fisher_information(b).value));
  const double jst_sum = relative_fisher(a).j_st + relative_fisher(b).j_st;
  CHECK(info.jst == doctest::Approx(jst_sum));
  CHECK_FALSE(info.boundary_divergent);

  // The map conjugates the matrices and leaves jst unchanged.
  const ProductModel mapped({a, b}, mixing_map());
  const auto minfo = info_matrices(mapped);
  CHECK(minfo.jst == doctest::Approx(info.jst));
  const MatrixXd inv_t = mixing_map().inverse().transpose();
  CHECK(minfo.fisher.isApprox(inv_t * info.fisher * inv_t.transpose(), 1e-9));

  CHECK(info_matrices(ProductModel({model_by_name("uniform"), a}))
            .boundary_divergent);
}

TEST_CASE("channel functionals of a 2-D product") {
  const double t = 0.5;
  MCSpec mc;

  SUBCASE("all-gaussian models short-circuit to exact values") {
    const auto g = model_by_name("gaussian");
    const ProductModel mixed({g, g}, mixing_map());
    const auto rep = theorem1_jst_product(mixed, t, mc);
    CHECK(rep.jst.value == 0.0);
    CHECK(rep.jst.std_error == 0.0);
    CHECK(rep.fisher.isApprox(GaussianModel(mixed.covariance()).precision()));
    const auto m = mmse_product(mixed, t, mc);
    CHECK(m.matrix.isApprox(0.5 * mixed.covariance(), 1e-12));
  }

  SUBCASE("independent coordinates add their one-dimensional values") {
    const auto u = model_by_name("uniform");
    const auto e = model_by_name("exponential");
    const ProductModel p({u, e});
    const auto rep = theorem1_jst_product(p, t, mc);
    REQUIRE(rep.coordinates.size() == 2);
    // Decorrelated coordinate streams: the reports are genuinely distinct.
    CHECK(rep.coordinates[0].jst.value != rep.coordinates[1].jst.value);
    CHECK(rep.jst.value == doctest::Approx(rep.coordinates[0].jst.value +
                                           rep.coordinates[1].jst.value));

    const double jq = jst_quadrature(channel_law(u, t)) +
                      jst_quadrature(channel_law(e, t));
    CHECK(std::fabs(rep.jst.value - jq) < 3.0 * rep.jst.std_error);

    // The matrix estimate dominates the gaussian floor C^{-1} = Id.
    const Eigen::SelfAdjointEigenSolver<MatrixXd> eig(
        rep.fisher - MatrixXd::Identity(2, 2));
    CHECK(eig.eigenvalues().minCoeff() > -3.0 * rep.jst.std_error);

    const auto m = mmse_product(p, t, mc);
    for (int j = 0; j < 2; ++j) {
      CAPTURE(j);
      const double oracle = mmse_oracle(j == 0 ? u : e, t);
      CHECK(std::fabs(m.coordinates[j].value - oracle) <
            3.0 * m.coordinates[j].std_error);
      CHECK(m.matrix(j, j) == m.coordinates[j].value);
    }

    const ProductModel mapped({u, e}, mixing_map());
    CHECK_THROWS_AS(theorem1_jst_product(mapped, t, mc),
                    const CapabilityError&);
    CHECK_THROWS_AS(mmse_product(mapped, t, mc), const CapabilityError&);
  }
}

TEST_SUITE_END();
