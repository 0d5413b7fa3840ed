#include "steininfo/functionals.hpp"

#include <algorithm>
#include <cmath>

#include "steininfo/piecewise.hpp"
#include "steininfo/special.hpp"

namespace steininfo {

namespace {

constexpr double kNegligibleDensity = 1e-280;

struct Window {
  double lo, hi;
};

Window integration_window(const Law1D& model) {
  const Support sup = model.support();
  const double mu = model.mean();
  const double sd = model.std_dev();
  return {std::max(sup.lo, mu - kSigmaTruncation * sd),
          std::min(sup.hi, mu + kSigmaTruncation * sd)};
}

// \int h(x, rho(x)) f(x) dx with the density evaluated once per node and
// the score taken as the inner limit dpdf/pdf (edges of a bounded support
// carry the one-sided value, never a domain error).
double score_expectation(const Law1D& model,
                         const std::function<double(double, double)>& h,
                         double abs_tol) {
  const Window w = integration_window(model);
  QuadratureSpec spec;
  spec.abs_tol = abs_tol;
  auto integrand = [&](double x) {
    const double f = model.pdf(x);
    if (f < kNegligibleDensity) return 0.0;
    return h(x, model.dpdf(x) / f) * f;
  };
  return integrate(integrand, w.lo, w.hi, spec, law_cuts(model));
}

}  // namespace

std::vector<double> law_cuts(const Law1D& model) {
  std::vector<double> cuts = model.breakpoints();
  for (const Jump& j : model.jumps()) cuts.push_back(j.x);
  if (const auto* pw = dynamic_cast<const PiecewiseLaw*>(&model);
      pw != nullptr && pw->noise_sigma() > 0.0) {
    // Transition layers of width ~ noise_sigma around each underlying edge.
    const double s = pw->noise_sigma();
    for (double e : pw->edge_hints())
      for (double k : {0.0, 1.0, 2.0, 4.0, 8.0}) {
        cuts.push_back(e - k * s);
        cuts.push_back(e + k * s);
      }
  }
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
  return cuts;
}

double law_expectation(const Law1D& model, const RealFn& g, double abs_tol) {
  const Window w = integration_window(model);
  QuadratureSpec spec;
  spec.abs_tol = abs_tol;
  auto integrand = [&](double x) {
    const double f = model.pdf(x);
    if (f < kNegligibleDensity) return 0.0;
    return g(x) * f;
  };
  return integrate(integrand, w.lo, w.hi, spec, law_cuts(model));
}

double law_quantile(const Law1D& model, double p) {
  if (!(p > 0.0 && p < 1.0))
    throw DomainError("law_quantile: p must be in (0,1), got " + std::to_string(p));
  Window w = integration_window(model);
  if (model.cdf(w.lo) >= p) return w.lo;
  if (model.cdf(w.hi) <= p) return w.hi;
  for (int i = 0; i < 200 && w.hi - w.lo > 1e-14 * (1.0 + std::fabs(w.lo)); ++i) {
    const double mid = 0.5 * (w.lo + w.hi);
    (model.cdf(mid) < p ? w.lo : w.hi) = mid;
  }
  return 0.5 * (w.lo + w.hi);
}

ScoreFunctional fisher_information(const LawPtr& model, double abs_tol) {
  ScoreFunctional out;
  out.value = score_expectation(
      *model, [](double, double rho) { return rho * rho; }, abs_tol);
  out.boundary_divergent = !model->regular_score();
  return out;
}

RelFisherReport relative_fisher(const LawPtr& model, double abs_tol) {
  const double mu = model->mean();
  const double B = model->variance();
  RelFisherReport out;
  out.j_rel = score_expectation(
      *model,
      [&](double x, double rho) {
        const double d = rho + (x - mu) / B;
        return d * d;
      },
      abs_tol);
  out.j_st = B * out.j_rel;
  out.boundary_divergent = !model->regular_score();
  return out;
}

double jst_quadrature(const LawPtr& model, double abs_tol) {
  return relative_fisher(model, abs_tol).j_st;
}

double relative_entropy(const LawPtr& model, double abs_tol) {
  const double mu = model->mean();
  const double B = model->variance();
  const double half_log_2pi_b = std::log(kSqrt2Pi) + 0.5 * std::log(B);
  const Window w = integration_window(*model);
  QuadratureSpec spec;
  spec.abs_tol = abs_tol;
  auto integrand = [&](double x) {
    const double f = model->pdf(x);
    if (f < kNegligibleDensity) return 0.0;
    const double z2 = (x - mu) * (x - mu) / B;
    return f * (std::log(f) + half_log_2pi_b + 0.5 * z2);
  };
  return integrate(integrand, w.lo, w.hi, spec, law_cuts(*model));
}

double total_variation(const LawPtr& model, double abs_tol) {
  const Law1D& m = *model;
  const double mu = m.mean();
  const double sd = m.std_dev();
  const double lo = mu - kSigmaTruncation * sd;
  const double hi = mu + kSigmaTruncation * sd;

  auto diff = [&](double x) {
    return m.pdf(x) - norm_pdf((x - mu) / sd) / sd;
  };

  // Segment at density jumps and kinks, then isolate the sign changes of
  // f - phi inside each segment so every piece integrates a single sign.
  std::vector<double> seg{lo, hi};
  const Support sup = m.support();
  if (sup.bounded_below() && sup.lo > lo) seg.push_back(sup.lo);
  if (sup.bounded_above() && sup.hi < hi) seg.push_back(sup.hi);
  for (double c : law_cuts(m))
    if (c > lo && c < hi) seg.push_back(c);
  std::sort(seg.begin(), seg.end());
  seg.erase(std::unique(seg.begin(), seg.end()), seg.end());

  std::vector<double> pieces{lo};
  constexpr int kScan = 4096;
  for (std::size_t s = 0; s + 1 < seg.size(); ++s) {
    const double a = seg[s], b = seg[s + 1];
    const double step = (b - a) / kScan;
    double xp = a + 0.5 * step;
    double gp = diff(xp);
    for (int i = 1; i < kScan; ++i) {
      const double xn = a + (i + 0.5) * step;
      const double gn = diff(xn);
      if ((gp < 0.0 && gn > 0.0) || (gp > 0.0 && gn < 0.0)) {
        double left = xp, right = xn, gl = gp;
        for (int it = 0; it < 80 && right - left > 1e-15 * (hi - lo); ++it) {
          const double mid = 0.5 * (left + right);
          const double gm = diff(mid);
          if ((gl < 0.0) == (gm < 0.0)) {
            left = mid;
            gl = gm;
          } else {
            right = mid;
          }
        }
        pieces.push_back(0.5 * (left + right));
      }
      xp = xn;
      gp = gn;
    }
    if (b < hi) pieces.push_back(b);
  }
  pieces.push_back(hi);
  std::sort(pieces.begin(), pieces.end());
  pieces.erase(std::unique(pieces.begin(), pieces.end()), pieces.end());

  QuadratureSpec spec;
  spec.abs_tol = abs_tol / static_cast<double>(pieces.size());
  double tv = 0.0;
  for (std::size_t i = 0; i + 1 < pieces.size(); ++i)
    tv += std::fabs(integrate(diff, pieces[i], pieces[i + 1], spec));
  return 0.5 * tv;
}

LawPtr channel_law(const LawPtr& base, double t) {
  if (!(t > 0.0) || t > 1.0)
    throw DomainError("channel parameter t must be in (0, 1], got " +
                      std::to_string(t));
  if (t == 1.0) return base;
  LawPtr law = base->scaled_noisy(std::sqrt(t), std::sqrt(1.0 - t));
  if (!law)
    throw CapabilityError(base->name() +
                          ": smoothed channel law not available in closed form");
  return law;
}

double debruijn_entropy(const LawPtr& base, int nodes) {
  // D = \int_0^1 jst(X_t) / (2t) dt. With t = u^2 this is
  // \int_0^1 jst(X_{u^2}) / u du; near u = 0 the integrand vanishes like
  // u^3, and the remaining 1/sqrt(1-t) blow-up of jump-edged bases at the
  // right end is removed by u = 1 - y^2, since sqrt(1-t) = y sqrt(2-y^2).
  auto h = [&](double u) {
    return jst_quadrature(channel_law(base, u * u), 1e-9) / u;
  };
  double total = 0.0;
  for (auto [a, b] : {std::pair{0.0, 0.375}, std::pair{0.375, 0.75}}) {
    const QuadRule r = gauss_legendre(nodes, a, b);
    for (std::size_t i = 0; i < r.x.size(); ++i) total += r.w[i] * h(r.x[i]);
  }
  for (auto [a, b] : {std::pair{0.0, 0.25}, std::pair{0.25, 0.5}}) {
    const QuadRule r = gauss_legendre(nodes, a, b);
    for (std::size_t i = 0; i < r.x.size(); ++i) {
      const double y = r.x[i];
      total += r.w[i] * 2.0 * y * h(1.0 - y * y);
    }
  }
  return total;
}

}  // namespace steininfo
