#include <cmath>
#include <vector>

#include "doctest.h"
#include "steininfo/functionals.hpp"
#include "steininfo/registry.hpp"
#include "steininfo/representations.hpp"
#include "steininfo/sums.hpp"

using namespace steininfo;

namespace {

// Law-weighted through-origin slope of s over the central quantile range;
// pointwise reads of a fitted score carry O(0.01) noise, the weighted
// average does not.
double weighted_slope(const FittedScore& s, const Law1D& law) {
  const double lo = law_quantile(law, 0.025), hi = law_quantile(law, 0.975);
  const auto cuts = law.breakpoints();
  const double num = integrate(
      [&](double w) { return s(w) * w * law.pdf(w); }, lo, hi, {}, cuts);
  const double den =
      integrate([&](double w) { return w * w * law.pdf(w); }, lo, hi, {}, cuts);
  return num / den;
}

}  // namespace

TEST_SUITE_BEGIN("representations");

TEST_CASE("channel and mixture points carry consistent laws") {
  const auto uniform = model_by_name("uniform");
  const auto point = make_channel_point(uniform, 0.25);
  CHECK(point.t == 0.25);
  CHECK(point.kernel != nullptr);

  // The closed-form channel law against an independent grid convolution.
  const auto conv = combine_laws(uniform, model_by_name("gaussian"),
                                 std::sqrt(0.25), std::sqrt(0.75));
  for (double w : {-2.0, -1.0, -0.3, 0.0, 0.7, 1.9}) {
    CAPTURE(w);
    CHECK(point.mixed->pdf(w) ==
          doctest::Approx(conv->pdf(w)).epsilon(1e-5));
  }
  CHECK(point.mixed->variance() == doctest::Approx(1.0));

  SampleStream st(7, 0);
  double s1 = 0.0, s2 = 0.0;
  const int n = 20000;
  for (int i = 0; i < n; ++i) {
    const double w = point.mixed->sample(st);
    s1 += w;
    s2 += w * w;
  }
  CHECK(std::fabs(s1 / n) < 0.03);
  CHECK(std::fabs(s2 / n - 1.0) < 0.04);

  const auto mp =
      make_mixture_point(uniform, model_by_name("exponential"), 0.3);
  CHECK(mp.gamma == doctest::Approx(1.0));
  CHECK(mp.kernel_x != nullptr);
  CHECK(mp.kernel_y != nullptr);
  CHECK(mp.mixed->variance() == doctest::Approx(1.0).epsilon(1e-6));

  CHECK_THROWS_AS(make_channel_point(uniform, 0.0), const DomainError&);
  CHECK_THROWS_AS(make_channel_point(uniform, 1.0), const DomainError&);
  // Scaling breaks the unit-variance requirement.
  CHECK_THROWS_AS(make_channel_point(uniform->scaled_noisy(2.0, 0.0), 0.5),
                  const DomainError&);
}

TEST_CASE("gaussian base is a fixed point of every representation") {
  const auto point = make_channel_point(model_by_name("gaussian"), 0.5);
  MCSpec mc;

  // (1 - tau) vanishes identically, so the regression target is exactly 0.
  const auto rep = theorem1_jst(point, mc);
  CHECK(rep.jst.value == 0.0);
  CHECK(rep.jst.std_error == 0.0);
  CHECK(rep.fisher.value == 1.0);

  const auto m = mmse(point, mc);
  CHECK(m.std_error > 0.0);
  CHECK(std::fabs(m.value - 0.5) < 3.0 * m.std_error);

  RegressorSpec reg;
  const auto eq10 = gaussian_smoothing_score(point, reg, mc);
  for (double w : {-1.5, -0.2, 0.0, 1.0, 2.2}) {
    CHECK(eq10.conditional_part(w) == 0.0);
    CHECK(eq10(w) == -w);
  }

  const auto two = score_of_sum_representation(
      make_mixture_point(model_by_name("gaussian"), model_by_name("gaussian"),
                         0.5),
      reg, mc);
  for (double w : {-1.0, 0.4, 1.8}) CHECK(two.conditional_part(w) == 0.0);

  MCSpec small;
  small.n_samples = 100000;
  const auto gsv = gsv_score(point, reg, small);
  CHECK(std::fabs(gsv.mmse.value - 0.5) < 3.0 * gsv.mmse.std_error);
  CHECK(std::fabs(gsv.jst.value) < 3.0 * gsv.jst.std_error);
  CHECK(weighted_slope(gsv.score, *point.mixed) ==
        doctest::Approx(-1.0).epsilon(0.02));
}

TEST_CASE("jst routes agree with quadrature through the channel") {
  struct Cell {
    const char* model;
    double t;
  };
  for (const Cell cell : {Cell{"exponential", 0.5}, Cell{"mixture", 0.25}}) {
    CAPTURE(cell.model);
    const auto point = make_channel_point(model_by_name(cell.model), cell.t);
    const double jq = jst_quadrature(point.mixed);
    MCSpec mc;

    const auto rep = theorem1_jst(point, mc);
    CHECK(std::fabs(rep.jst.value - jq) < 3.0 * rep.jst.std_error);
    CHECK(rep.fisher.value == rep.jst.value + 1.0);

    const auto v = verdu_identity_check(point, mc);
    CHECK(v.jst_representation.value == rep.jst.value);
    CHECK(std::fabs(v.jst_mmse.value - jq) < 3.0 * v.jst_mmse.std_error);
    CHECK(std::fabs(v.scalar_residual) < 3.0 * v.scalar_se);
    CHECK(std::fabs(v.moment_residual) < 3.0 * v.moment_se);
  }
}

TEST_CASE("fitted scores track the smoothed-law score") {
  MCSpec mc;
  RegressorSpec reg;

  SUBCASE("interior t") {
    const auto point = make_channel_point(model_by_name("uniform"), 0.5);
    const auto oracle = [&](double w) { return point.mixed->score(w); };
    const auto eq10 = gaussian_smoothing_score(point, reg, mc);
    const auto g = score_gap(eq10, oracle, *point.mixed);
    CHECK(g.gap < 0.05);

    const auto lp = make_channel_point(model_by_name("laplace"), 0.75);
    const auto gsv = gsv_score(lp, reg, mc);
    const auto g2 = score_gap(
        gsv.score, [&](double w) { return lp.mixed->score(w); }, *lp.mixed);
    CHECK(g2.gap < 0.05);
  }

  SUBCASE("strong smoothing needs a tighter bandwidth") {
    RegressorSpec narrow;
    narrow.bandwidth_scale = 0.5;
    for (const char* name : {"uniform", "exponential", "laplace", "mixture"}) {
      CAPTURE(name);
      const auto point = make_channel_point(model_by_name(name), 0.9);
      const auto oracle = [&](double w) { return point.mixed->score(w); };
      const auto eq10 = gaussian_smoothing_score(point, narrow, mc);
      const auto gsv = gsv_score(point, narrow, mc);
      CHECK(score_gap(eq10, oracle, *point.mixed).gap < 0.06);
      CHECK(score_gap(gsv.score, oracle, *point.mixed).gap < 0.06);
      CHECK(score_gap_pair(eq10, gsv.score, *point.mixed).gap < 0.10);
    }
  }

  SUBCASE("light smoothing: the conditional part contracts the target") {
    // || E[target | W] || <= sqrt(t^2/(1-t) E[(1-tau)^2]) exactly.
    const double t = 0.1;
    for (const char* name : {"uniform", "exponential"}) {
      CAPTURE(name);
      const auto base = model_by_name(name);
      const auto point = make_channel_point(base, t);
      const auto eq10 = gaussian_smoothing_score(point, reg, mc);
      const auto g = score_gap(
          eq10, [&](double w) { return point.mixed->score(w); },
          *point.mixed);
      const double bound =
          std::sqrt(t * t / (1.0 - t) * kernel_discrepancy(base));
      CHECK(g.gap < bound + 3.0 * g.std_error);
    }
  }
}

TEST_CASE("two-summand representation handles non-gaussian noise") {
  MCSpec mc;
  RegressorSpec reg;

  const auto mp = make_mixture_point(model_by_name("uniform"),
                                     model_by_name("gaussian"), 0.5);
  const auto rep = score_of_sum_representation(mp, reg, mc);
  const auto g =
      score_gap(rep, [&](double w) { return mp.mixed->score(w); }, *mp.mixed);
  CHECK(g.gap < 0.05);

  // Both summands non-Gaussian: smoothed exponentials keep the boundary
  // terms of the underlying integration by parts zero.
  const auto sm = model_by_name("exponential_smoothed");
  const auto mp2 = make_mixture_point(sm, sm, 0.25);
  const auto rep2 = score_of_sum_representation(mp2, reg, mc);
  const auto g2 = score_gap(
      rep2, [&](double w) { return mp2.mixed->score(w); }, *mp2.mixed);
  CHECK(g2.gap < 0.05);

  // With a Gaussian second summand the general form collapses to the
  // smoothing-channel one, sample for sample.
  const auto point = make_channel_point(model_by_name("uniform"), 0.35);
  const auto mpg = make_mixture_point(model_by_name("uniform"),
                                      model_by_name("gaussian"), 0.35);
  const auto special = gaussian_smoothing_score(point, reg, mc);
  const auto general = score_of_sum_representation(mpg, reg, mc);
  for (double w = -2.5; w <= 2.5; w += 0.25) {
    CAPTURE(w);
    CHECK(std::fabs(special(w) - general(w)) < 1e-12);
  }
}

TEST_CASE("cyclic representation generalizes the two-summand one") {
  MCSpec mc;
  RegressorSpec reg;

  SUBCASE("n = 2 reduces exactly") {
    const auto x = model_by_name("uniform");
    const auto y = model_by_name("exponential_smoothed");
    const auto two =
        score_of_sum_representation(make_mixture_point(x, y, 0.4), reg, mc);
    const auto cyc = score_of_sum_n({x, y}, {0.4, 0.6}, reg, mc);
    for (double w : {-1.6, -0.4, 0.0, 0.9, 2.1}) CHECK(two(w) == cyc(w));
  }

  SUBCASE("gaussian summands give a zero conditional part") {
    const auto g = model_by_name("gaussian");
    const auto cyc = score_of_sum_n({g, g, g}, {0.2, 0.3, 0.5}, reg, mc);
    for (double w : {-1.0, 0.0, 1.4}) CHECK(cyc.conditional_part(w) == 0.0);
    CHECK(cyc.slope() == doctest::Approx(1.0));
  }

  SUBCASE("three smoothed exponentials match the convolved-law score") {
    const auto e = model_by_name("exponential_smoothed");
    const auto cyc =
        score_of_sum_n({e, e, e}, {1.0 / 3, 1.0 / 3, 1.0 / 3}, reg, mc);
    const auto sum3 = sum_law(e, 3);
    const auto g =
        score_gap(cyc, [&](double w) { return sum3->score(w); }, *sum3);
    CHECK(g.gap < 0.07);
  }

  SUBCASE("input validation") {
    const auto g = model_by_name("gaussian");
    CHECK_THROWS_AS(score_of_sum_n({g}, {1.0}, reg, mc), const DomainError&);
    CHECK_THROWS_AS(score_of_sum_n({g, g}, {0.5, 0.4}, reg, mc),
                    const DomainError&);
    CHECK_THROWS_AS(score_of_sum_n({g, g}, {0.5}, reg, mc),
                    const DomainError&);
    CHECK_THROWS_AS(score_of_sum_n({g, g}, {1.2, -0.2}, reg, mc),
                    const DomainError&);
    const std::vector<LawPtr> many(17, g);
    const std::vector<double> flat(17, 1.0 / 17);
    CHECK_THROWS_AS(score_of_sum_n(many, flat, reg, mc), const DomainError&);
  }
}

TEST_CASE("density jumps break the representation visibly") {
  // The raw exponential has a unit jump at the left edge, so the
  // integration by parts behind the representation picks up a boundary
  // term and the fitted score misses the true one by an O(1) margin.
  MCSpec mc;
  RegressorSpec reg;
  const auto e = model_by_name("exponential");
  const auto mp = make_mixture_point(e, e, 0.25);
  const auto rep = score_of_sum_representation(mp, reg, mc);
  const auto g =
      score_gap(rep, [&](double w) { return mp.mixed->score(w); }, *mp.mixed);
  CHECK(g.gap > 0.5);
}

TEST_CASE("mmse limits and monotonicity") {
  MCSpec mc;

  for (const char* name : {"uniform", "mixture"}) {
    CAPTURE(name);
    const auto base = model_by_name(name);
    const auto lo = mmse(make_channel_point(base, 0.01), mc);
    CHECK(lo.value > 0.985);
    CHECK(lo.value < 0.995);
    const auto hi = mmse(make_channel_point(base, 0.99), mc);
    CHECK(hi.value < 0.02);
    CHECK(hi.value > -3.0 * hi.std_error);
  }

  // More channel information can only reduce the estimation error.
  const auto e = model_by_name("exponential");
  double prev = kInf;
  double prev_se = 0.0;
  for (double t : {0.1, 0.25, 0.5, 0.75, 0.9}) {
    CAPTURE(t);
    const auto m = mmse(make_channel_point(e, t), mc);
    CHECK(m.value < prev + 2.0 * std::hypot(m.std_error, prev_se));
    prev = m.value;
    prev_se = m.std_error;
  }
  CHECK(prev < 0.1);
}

TEST_CASE("moment estimates are identical for any worker count") {
  const auto point = make_channel_point(model_by_name("exponential"), 0.5);
  MCSpec one, three;
  one.n_streams = 1;
  three.n_streams = 3;
  const auto a = theorem1_jst(point, one);
  const auto b = theorem1_jst(point, three);
  CHECK(a.jst.value == b.jst.value);
  CHECK(a.jst.std_error == b.jst.std_error);
}

TEST_SUITE_END();
