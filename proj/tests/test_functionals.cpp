#include "steininfo/functionals.hpp"

#include <cmath>

#include "doctest.h"
#include "steininfo/registry.hpp"

using namespace steininfo;

namespace {

// Entropy-based references, exact up to the printed digits:
// D(X || N(0,1)) = log sqrt(2 pi e) - h(X) for unit-variance X.
constexpr double kRelEntExponential = 0.41893853320467274;
constexpr double kRelEntUniform = 0.17648520831067259;
constexpr double kRelEntLaplace = 0.07236494292470009;
constexpr double kRelEntMixture = 0.03833951634871954;

// Half L1 distances to the standard normal, from sign-resolved quadrature
// of the explicit densities (crossings solved from the log-density ratio).
constexpr double kTvExponential = 0.31921501557227006;
constexpr double kTvUniform = 0.19767795901753138;
constexpr double kTvLaplace = 0.14130223701425048;
constexpr double kTvMixture = 0.11615075542114740;

// E[(f'/f)^2] for the two-component normal mixture, independent quadrature.
constexpr double kFisherMixture = 1.4618809223773062;

}  // namespace

TEST_SUITE_BEGIN("functionals");

TEST_CASE("fisher information closed forms") {
  auto j = [](const char* n) { return fisher_information(model_by_name(n)); };

  const auto gauss = j("gaussian");
  CHECK(gauss.value == doctest::Approx(1.0).epsilon(1e-10));
  CHECK_FALSE(gauss.boundary_divergent);

  const auto lap = j("laplace");
  CHECK(lap.value == doctest::Approx(2.0).epsilon(1e-8));
  CHECK_FALSE(lap.boundary_divergent);

  // Interior scores only: the flat density has zero score inside, the
  // exponential a constant -1; both carry boundary mass, so the reported
  // values are the absolutely continuous parts and the flag is raised.
  const auto uni = j("uniform");
  CHECK(std::fabs(uni.value) < 1e-10);
  CHECK(uni.boundary_divergent);

  const auto expo = j("exponential");
  CHECK(expo.value == doctest::Approx(1.0).epsilon(1e-8));
  CHECK(expo.boundary_divergent);

  const auto mix = j("mixture");
  CHECK(mix.value == doctest::Approx(kFisherMixture).epsilon(1e-8));
  CHECK_FALSE(mix.boundary_divergent);
}

TEST_CASE("relative fisher closed forms") {
  auto r = [](const char* n) { return relative_fisher(model_by_name(n)); };

  CHECK(std::fabs(r("gaussian").j_st) < 1e-10);
  CHECK(r("laplace").j_st == doctest::Approx(1.0).epsilon(1e-8));
  CHECK(r("uniform").j_st == doctest::Approx(1.0).epsilon(1e-8));
  CHECK(r("uniform").boundary_divergent);
  CHECK(r("exponential").j_st == doctest::Approx(2.0).epsilon(1e-8));
  CHECK(r("exponential").boundary_divergent);
  CHECK(r("mixture").j_st ==
        doctest::Approx(kFisherMixture - 1.0).epsilon(1e-8));
}

TEST_CASE("score-regular laws satisfy j_st = B*(J - 1/B)") {
  // For unit variance this is j_st = J - 1; expanding the square shows the
  // cross term is -2/B exactly when integration by parts applies, which is
  // what regular_score() certifies. Jump-edged laws are excluded.
  for (const char* name : {"gaussian", "laplace", "mixture", "uniform_smoothed",
                           "exponential_smoothed", "laplace_smoothed"}) {
    CAPTURE(name);
    const auto model = model_by_name(name);
    REQUIRE(model->regular_score());
    const double J = fisher_information(model).value;
    const double B = model->variance();
    const double jst = relative_fisher(model).j_st;
    CHECK(jst == doctest::Approx(B * J - 1.0).epsilon(5e-7));
  }
}

TEST_CASE("relative entropy against entropy-based references") {
  auto D = [](const char* n) { return relative_entropy(model_by_name(n)); };
  CHECK(std::fabs(D("gaussian")) < 1e-10);
  CHECK(D("exponential") == doctest::Approx(kRelEntExponential).epsilon(1e-8));
  CHECK(D("uniform") == doctest::Approx(kRelEntUniform).epsilon(1e-8));
  CHECK(D("laplace") == doctest::Approx(kRelEntLaplace).epsilon(1e-8));
  CHECK(D("mixture") == doctest::Approx(kRelEntMixture).epsilon(1e-8));
}

TEST_CASE("total variation against sign-resolved references") {
  auto tv = [](const char* n) { return total_variation(model_by_name(n)); };
  CHECK(tv("gaussian") < 1e-10);
  CHECK(tv("exponential") == doctest::Approx(kTvExponential).epsilon(1e-9));
  CHECK(tv("uniform") == doctest::Approx(kTvUniform).epsilon(1e-9));
  CHECK(tv("laplace") == doctest::Approx(kTvLaplace).epsilon(1e-9));
  CHECK(tv("mixture") == doctest::Approx(kTvMixture).epsilon(1e-9));
}

TEST_CASE("entropy and transport inequalities hold with margin") {
  for (const char* name : {"gaussian", "laplace", "mixture", "uniform",
                           "exponential", "uniform_smoothed",
                           "exponential_smoothed", "laplace_smoothed"}) {
    CAPTURE(name);
    const auto model = model_by_name(name);
    const double D = relative_entropy(model);
    const double tv = total_variation(model);
    CHECK(D >= -1e-12);
    CHECK(2.0 * tv <= std::sqrt(2.0 * D) + 1e-8);
    if (model->regular_score()) {
      const double jst = relative_fisher(model).j_st;
      CHECK(D <= 0.5 * jst + 1e-8);
    }
  }
}

TEST_CASE("channel law preserves the first two moments") {
  for (const char* name : {"exponential", "uniform", "mixture"}) {
    CAPTURE(name);
    const auto base = model_by_name(name);
    for (double t : {0.25, 0.75}) {
      const auto law = channel_law(base, t);
      REQUIRE(law);
      CHECK(law->regular_score());
      CHECK(law->mean() == doctest::Approx(0.0).epsilon(1e-12));
      CHECK(law->variance() == doctest::Approx(1.0).epsilon(1e-12));
      const double mass = law_expectation(*law, [](double) { return 1.0; });
      CHECK(mass == doctest::Approx(1.0).epsilon(1e-9));
    }
    CHECK(channel_law(base, 1.0) == base);
    CHECK_THROWS_AS(channel_law(base, 0.0), const DomainError&);
    CHECK_THROWS_AS(channel_law(base, 1.5), const DomainError&);
  }
}

TEST_CASE("relative fisher decays along the channel") {
  const auto base = model_by_name("exponential");
  double prev = kInf;
  for (double t : {0.9, 0.6, 0.3, 0.1}) {
    const double jst = jst_quadrature(channel_law(base, t), 1e-9);
    CHECK(jst > 0.0);
    CHECK(jst < prev);
    prev = jst;
  }
}

TEST_CASE("channel integral of relative fisher recovers relative entropy") {
  CHECK(std::fabs(debruijn_entropy(model_by_name("gaussian"))) < 1e-8);
  struct Row {
    const char* name;
    double expected;
  };
  for (const Row& row : {Row{"exponential", kRelEntExponential},
                         Row{"uniform", kRelEntUniform},
                         Row{"laplace", kRelEntLaplace},
                         Row{"mixture", kRelEntMixture}}) {
    CAPTURE(row.name);
    const double db = debruijn_entropy(model_by_name(row.name));
    CHECK(db == doctest::Approx(row.expected).epsilon(0.02));
  }
}

TEST_SUITE_END();
