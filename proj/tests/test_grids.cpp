#include <cmath>
#include <vector>

#include "doctest.h"
#include "steininfo/common.hpp"
#include "steininfo/grid_density.hpp"
#include "steininfo/registry.hpp"
#include "steininfo/special.hpp"

using namespace steininfo;

namespace {
const double kRt2 = std::sqrt(2.0);
const double kRt3 = std::sqrt(3.0);
const double kHalfW = 1.0 / kRt2;
}  // namespace

TEST_SUITE_BEGIN("grids");

TEST_CASE("spline table reproduces an analytic density") {
  const std::size_t n = 4001;
  std::vector<double> vals(n);
  for (std::size_t i = 0; i < n; ++i)
    vals[i] = norm_pdf(-10.0 + 20.0 * static_cast<double>(i) / (n - 1.0));
  const GridDensity d(-10.0, 10.0, vals);
  CHECK(d.mass_before_normalization() == doctest::Approx(1.0).epsilon(1e-10));
  CHECK(std::fabs(d.mean()) < 1e-12);
  CHECK(d.variance() == doctest::Approx(1.0).epsilon(1e-6));
  for (double x : {-2.7, -1.0, 0.003, 1.234, 3.5}) {
    CHECK(d.pdf(x) == doctest::Approx(norm_pdf(x)).epsilon(1e-9));
    CHECK(d.dpdf(x) == doctest::Approx(-x * norm_pdf(x)).epsilon(1e-7));
    CHECK(d.score(x) == doctest::Approx(-x).epsilon(1e-7));
  }
  CHECK(d.pdf(11.0) == 0.0);
  CHECK(std::isfinite(d.log_pdf(11.0)));
}

TEST_CASE("gaussian plus gaussian is gaussian") {
  const DensitySource g(model_by_name("gaussian"));
  const GridDensity w2 = convolve_densities(g, g, kHalfW, kHalfW);
  double sup = 0.0;
  for (double x = -6.0; x <= 6.0; x += 0.0831)
    sup = std::max(sup, std::fabs(w2.pdf(x) - norm_pdf(x)));
  CHECK(sup < 1e-8);
  CHECK(std::fabs(w2.mean()) < 1e-9);
  CHECK(w2.variance() == doctest::Approx(1.0).epsilon(1e-6));
  CHECK(w2.score(1.5) == doctest::Approx(-1.5).epsilon(1e-6));

  // Second pass through the grid-backed source path.
  const GridDensity w4 = convolve_densities(DensitySource(w2), g, kHalfW, kHalfW);
  for (double x : {-3.0, -0.4, 0.0, 1.0, 2.5})
    CHECK(w4.pdf(x) == doctest::Approx(norm_pdf(x)).epsilon(1e-7));
}

TEST_CASE("uniform plus uniform is the triangle") {
  const DensitySource u(model_by_name("uniform"));
  const GridDensity t = convolve_densities(u, u, kHalfW, kHalfW);
  // Density of (X+Y)/sqrt(2), X,Y ~ U[-sqrt3, sqrt3]: peak 1/sqrt(6) at 0,
  // linear down to zero at +-sqrt(6). The peak lands on a lattice node.
  const double rt6 = std::sqrt(6.0);
  auto tri = [rt6](double x) {
    return std::max(0.0, (1.0 - std::fabs(x) / rt6) / std::sqrt(6.0));
  };
  CHECK(t.pdf(0.0) == doctest::Approx(1.0 / rt6).epsilon(1e-6));
  for (double x : {-2.0, -1.0, 0.7, 1.9})
    CHECK(t.pdf(x) == doctest::Approx(tri(x)).epsilon(1e-4));
  for (double x : {0.3, 1.1, 2.2})
    CHECK(t.pdf(x) == doctest::Approx(t.pdf(-x)).epsilon(1e-9));
  // Kink locations are carried as hints: interior peak and both edges.
  bool has_zero = false;
  for (double h : t.hints()) has_zero = has_zero || std::fabs(h) < 1e-12;
  CHECK(has_zero);
  CHECK(t.hints().size() == 3);
}

TEST_CASE("exponential plus exponential matches the shifted gamma") {
  const DensitySource e(model_by_name("exponential"));
  const GridDensity s = convolve_densities(e, e, 1.0, 1.0);
  auto gamma2 = [](double x) {
    return x + 2.0 <= 0.0 ? 0.0 : (x + 2.0) * std::exp(-(x + 2.0));
  };
  for (double x : {-1.5, -1.0, 0.0, 1.0, 3.0, 8.0})
    CHECK(s.pdf(x) == doctest::Approx(gamma2(x)).epsilon(1e-7));

  const GridDensity w2 = convolve_densities(e, e, kHalfW, kHalfW);
  // log f(w) = const + log(sqrt2 w + 2) - sqrt2 w on the support.
  CHECK(w2.score(0.0) == doctest::Approx(kRt2 / 2.0 - kRt2).epsilon(1e-5));
  CHECK(w2.score(2.0) ==
        doctest::Approx(kRt2 / (2.0 * kRt2 + 2.0) - kRt2).epsilon(1e-5));
}

TEST_CASE("factor order does not matter") {
  const DensitySource e(model_by_name("exponential"));
  const DensitySource u(model_by_name("uniform"));
  const GridDensity a = convolve_densities(e, u, 0.8, 0.6);
  const GridDensity b = convolve_densities(u, e, 0.6, 0.8);
  CHECK(a.lo() == doctest::Approx(b.lo()).epsilon(1e-12));
  CHECK(a.step() == doctest::Approx(b.step()).epsilon(1e-12));
  for (double x : {-1.2, -0.5, 0.0, 0.9, 2.4, 6.0})
    CHECK(a.pdf(x) == doctest::Approx(b.pdf(x)).epsilon(1e-9));
}

TEST_CASE("coordinate scaling is exact") {
  const DensitySource g(model_by_name("gaussian"));
  const GridDensity w2 = convolve_densities(g, g, kHalfW, kHalfW);
  const GridDensity d2 = w2.scaled(2.0);
  for (double x : {-3.0, 0.0, 1.0, 4.0})
    CHECK(d2.pdf(x) == doctest::Approx(0.5 * norm_pdf(0.5 * x)).epsilon(1e-7));
  CHECK(d2.variance() == doctest::Approx(4.0).epsilon(1e-6));

  const GridDensity neg = w2.scaled(-1.0);
  for (double x : {-2.0, 0.4, 1.7})
    CHECK(neg.pdf(x) == doctest::Approx(w2.pdf(-x)).epsilon(1e-12));
}

TEST_CASE("insufficient coverage is an error") {
  const DensitySource g(model_by_name("gaussian"));
  GridSpec gs;
  gs.points = 256;
  gs.sigma_span = 1.0;
  CHECK_THROWS_AS(convolve_densities(g, g, kHalfW, kHalfW, gs),
                  const NumericError&);
}

TEST_CASE("uniform factor times sqrt3 spans the unit box") {
  // Simple scale sanity on the law-backed source: support ends map exactly.
  const DensitySource u(model_by_name("uniform"));
  CHECK(u.lo() == doctest::Approx(-kRt3).epsilon(1e-15));
  CHECK(u.hi() == doctest::Approx(kRt3).epsilon(1e-15));
  const auto cuts = u.cuts();
  CHECK(cuts.size() == 2);
}

TEST_SUITE_END();
