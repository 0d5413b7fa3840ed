#include "steininfo/piecewise.hpp"

#include <algorithm>
#include <cmath>

#include "steininfo/special.hpp"

namespace steininfo {

namespace {

// Antiderivative of the standard normal cdf: G' = Phi.
double phi_integral(double z) { return z * norm_cdf(z) + norm_pdf(z); }

/* Smoothed normalized right-exponential: density of a*X + s*Z where X has
   density lambda*exp(-lambda*(x-x0)) on (x0, inf). Stable in both the
   near-edge and deep-tail regimes. */
double emg_pdf(double v, double lambda, double x0, double a, double s) {
  const double beta = lambda / a;
  const double y0 = a * x0;
  const double z = (v - y0) / s - beta * s;
  const double bs = beta * s;
  if (z >= -6.0) {
    const double expo = -bs * z - 0.5 * bs * bs;
    if (expo < -745.0) return 0.0;
    return beta * std::exp(expo) * norm_cdf(z);
  }
  const double g = z + bs;  // (v - y0)/s
  const double expo = -0.5 * g * g;
  if (expo < -745.0) return 0.0;
  return beta * 0.5 * erfcx(-z / kSqrt2) * std::exp(expo);
}

struct Moments {
  double mass, mean, ex2;
};

Moments piece_moments(const Piece& p) {
  if (const auto* g = std::get_if<GaussPiece>(&p))
    return {g->w, g->w * g->mu, g->w * (g->mu * g->mu + g->sigma * g->sigma)};
  if (const auto* e = std::get_if<ExpPiece>(&p)) {
    const double m = e->c / e->lambda;
    const double d = e->dir / e->lambda;
    return {m, m * (e->x0 + d),
            m * (e->x0 * e->x0 + 2.0 * e->x0 * d + 2.0 / (e->lambda * e->lambda))};
  }
  const auto& f = std::get<FlatPiece>(p);
  const double m = f.h * (f.hi - f.lo);
  return {m, f.h * 0.5 * (f.hi * f.hi - f.lo * f.lo),
          f.h * (f.hi * f.hi * f.hi - f.lo * f.lo * f.lo) / 3.0};
}

double piece_lo(const Piece& p) {
  if (std::holds_alternative<GaussPiece>(p)) return -kInf;
  if (const auto* e = std::get_if<ExpPiece>(&p))
    return e->dir > 0 ? e->x0 : -kInf;
  return std::get<FlatPiece>(p).lo;
}

double piece_hi(const Piece& p) {
  if (std::holds_alternative<GaussPiece>(p)) return kInf;
  if (const auto* e = std::get_if<ExpPiece>(&p))
    return e->dir > 0 ? kInf : e->x0;
  return std::get<FlatPiece>(p).hi;
}

// Raw density of the scaled piece a*X at v.
double piece_pdf_raw(const Piece& p, double a, double v) {
  const double x = v / a;
  if (const auto* g = std::get_if<GaussPiece>(&p))
    return g->w * norm_pdf(x, g->mu, g->sigma) / a;
  if (const auto* e = std::get_if<ExpPiece>(&p)) {
    // The edge point takes the inner limit, matching the flat convention,
    // so quadrature endpoints at a support edge see the right value.
    const double t = e->dir * (x - e->x0);
    if (t < 0.0) return 0.0;
    return e->c * std::exp(-e->lambda * t) / a;
  }
  const auto& f = std::get<FlatPiece>(p);
  return (x >= f.lo && x <= f.hi) ? f.h / a : 0.0;
}

double piece_dpdf_raw(const Piece& p, double a, double v) {
  const double x = v / a;
  if (const auto* g = std::get_if<GaussPiece>(&p)) {
    const double z = (x - g->mu) / g->sigma;
    return -g->w * z / g->sigma * norm_pdf(x, g->mu, g->sigma) / (a * a);
  }
  if (const auto* e = std::get_if<ExpPiece>(&p)) {
    const double t = e->dir * (x - e->x0);
    if (t < 0.0) return 0.0;
    return -e->dir * e->lambda * e->c * std::exp(-e->lambda * t) / (a * a);
  }
  return 0.0;
}

double piece_cdf_raw(const Piece& p, double a, double v) {
  const double x = v / a;
  if (const auto* g = std::get_if<GaussPiece>(&p))
    return g->w * norm_cdf((x - g->mu) / g->sigma);
  if (const auto* e = std::get_if<ExpPiece>(&p)) {
    const double mass = e->c / e->lambda;
    const double t = e->dir * (x - e->x0);
    if (e->dir > 0)
      return t <= 0.0 ? 0.0 : mass * (1.0 - std::exp(-e->lambda * t));
    // dir < 0: support is x < x0, i.e. t > 0.
    return t <= 0.0 ? mass : mass * std::exp(e->lambda * (x - e->x0));
  }
  const auto& f = std::get<FlatPiece>(p);
  if (x <= f.lo) return 0.0;
  if (x >= f.hi) return f.h * (f.hi - f.lo);
  return f.h * (x - f.lo);
}

double piece_pdf_smoothed(const Piece& p, double a, double s, double v) {
  if (const auto* g = std::get_if<GaussPiece>(&p)) {
    const double sig = std::hypot(a * g->sigma, s);
    return g->w * norm_pdf(v, a * g->mu, sig);
  }
  if (const auto* e = std::get_if<ExpPiece>(&p)) {
    const double mass = e->c / e->lambda;
    if (e->dir > 0) return mass * emg_pdf(v, e->lambda, e->x0, a, s);
    return mass * emg_pdf(-v, e->lambda, -e->x0, a, s);
  }
  const auto& f = std::get<FlatPiece>(p);
  const double z1 = (v - a * f.lo) / s, z2 = (v - a * f.hi) / s;
  // Right of the plateau both cdf values sit near 1 and their difference
  // cancels; the survival-function form is exact there.
  const double d = z1 + z2 > 0.0 ? norm_sf(z2) - norm_sf(z1)
                                 : norm_cdf(z1) - norm_cdf(z2);
  return f.h / a * d;
}

double piece_dpdf_smoothed(const Piece& p, double a, double s, double v) {
  if (const auto* g = std::get_if<GaussPiece>(&p)) {
    const double sig = std::hypot(a * g->sigma, s);
    const double z = (v - a * g->mu) / sig;
    return -g->w * z / sig * norm_pdf(v, a * g->mu, sig);
  }
  if (const auto* e = std::get_if<ExpPiece>(&p)) {
    const double beta = e->lambda / a;
    const double pdf = piece_pdf_smoothed(p, a, s, v);
    const double edge = (e->c / a) * norm_pdf(v - a * e->x0, 0.0, s);
    // Right piece: f' = (c/a) phi_s(v - y0) - beta f; left piece mirrors.
    return e->dir > 0 ? edge - beta * pdf : beta * pdf - edge;
  }
  const auto& f = std::get<FlatPiece>(p);
  return f.h / a *
         (norm_pdf(v - a * f.lo, 0.0, s) - norm_pdf(v - a * f.hi, 0.0, s));
}

double piece_cdf_smoothed(const Piece& p, double a, double s, double v) {
  if (const auto* g = std::get_if<GaussPiece>(&p)) {
    const double sig = std::hypot(a * g->sigma, s);
    return g->w * norm_cdf((v - a * g->mu) / sig);
  }
  if (const auto* e = std::get_if<ExpPiece>(&p)) {
    const double mass = e->c / e->lambda;
    if (e->dir > 0) {
      const double pdf_n = emg_pdf(v, e->lambda, e->x0, a, s);
      return mass * (norm_cdf((v - a * e->x0) / s) - (a / e->lambda) * pdf_n);
    }
    const double pdf_n = emg_pdf(-v, e->lambda, -e->x0, a, s);
    return mass * (1.0 - norm_cdf((-v + a * e->x0) / s) + (a / e->lambda) * pdf_n);
  }
  const auto& f = std::get<FlatPiece>(p);
  return f.h / a * s *
         (phi_integral((v - a * f.lo) / s) - phi_integral((v - a * f.hi) / s));
}

void append_jumps_raw(const Piece& p, double a, std::vector<Jump>& out) {
  if (const auto* e = std::get_if<ExpPiece>(&p)) {
    out.push_back({a * e->x0, e->dir > 0 ? e->c / a : -e->c / a});
    return;
  }
  if (const auto* f = std::get_if<FlatPiece>(&p)) {
    out.push_back({a * f->lo, f->h / a});
    out.push_back({a * f->hi, -f->h / a});
  }
}

}  // namespace

PiecewiseLaw::PiecewiseLaw(std::string name, std::vector<Piece> pieces,
                           BaseSampler sampler, double a, double s)
    : name_(std::move(name)),
      pieces_(std::move(pieces)),
      base_sampler_(std::move(sampler)),
      a_(a),
      s_(s) {
  if (!(a_ > 0.0) || s_ < 0.0)
    throw DomainError("PiecewiseLaw: need scale > 0 and noise >= 0");
  double mass = 0.0, ex2 = 0.0;
  base_lo_ = kInf;
  base_hi_ = -kInf;
  for (const auto& p : pieces_) {
    const Moments m = piece_moments(p);
    mass += m.mass;
    base_mean_ += m.mean;
    ex2 += m.ex2;
    base_lo_ = std::min(base_lo_, piece_lo(p));
    base_hi_ = std::max(base_hi_, piece_hi(p));
  }
  if (std::fabs(mass - 1.0) > 1e-12)
    throw DomainError(name_ + ": piece masses sum to " + std::to_string(mass));
  base_var_ = ex2 - base_mean_ * base_mean_;
}

double PiecewiseLaw::pdf(double x) const {
  double f = 0.0;
  for (const auto& p : pieces_)
    f += s_ > 0.0 ? piece_pdf_smoothed(p, a_, s_, x) : piece_pdf_raw(p, a_, x);
  return f;
}

double PiecewiseLaw::dpdf(double x) const {
  double d = 0.0;
  for (const auto& p : pieces_)
    d += s_ > 0.0 ? piece_dpdf_smoothed(p, a_, s_, x) : piece_dpdf_raw(p, a_, x);
  return d;
}

double PiecewiseLaw::cdf(double x) const {
  double c = 0.0;
  for (const auto& p : pieces_)
    c += s_ > 0.0 ? piece_cdf_smoothed(p, a_, s_, x) : piece_cdf_raw(p, a_, x);
  return std::min(1.0, std::max(0.0, c));
}

Support PiecewiseLaw::support() const {
  if (s_ > 0.0) return {};
  return {base_lo_ == -kInf ? -kInf : a_ * base_lo_,
          base_hi_ == kInf ? kInf : a_ * base_hi_};
}

double PiecewiseLaw::sample(SampleStream& st) const {
  double x = a_ * base_sampler_(st);
  if (s_ > 0.0) x += s_ * st.next_gaussian();
  return x;
}

std::vector<double> PiecewiseLaw::edge_hints() const {
  std::vector<double> pts;
  for (const auto& p : pieces_) {
    const double lo = piece_lo(p), hi = piece_hi(p);
    if (std::isfinite(lo)) pts.push_back(a_ * lo);
    if (std::isfinite(hi)) pts.push_back(a_ * hi);
  }
  std::sort(pts.begin(), pts.end());
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
  return pts;
}

std::vector<double> PiecewiseLaw::breakpoints() const {
  if (s_ > 0.0) return {};
  return edge_hints();
}

std::vector<Jump> PiecewiseLaw::jumps() const {
  if (s_ > 0.0) return {};
  std::vector<Jump> raw;
  for (const auto& p : pieces_) append_jumps_raw(p, a_, raw);
  std::sort(raw.begin(), raw.end(), [](const Jump& a, const Jump& b) { return a.x < b.x; });
  std::vector<Jump> merged;
  for (const auto& j : raw) {
    if (!merged.empty() && std::fabs(merged.back().x - j.x) < 1e-14)
      merged.back().delta += j.delta;
    else
      merged.push_back(j);
  }
  std::vector<Jump> out;
  for (const auto& j : merged)
    if (std::fabs(j.delta) > 1e-14) out.push_back(j);
  return out;
}

bool PiecewiseLaw::regular_score() const { return jumps().empty(); }

LawPtr PiecewiseLaw::scaled_noisy(double a, double s) const {
  if (!(a > 0.0)) return nullptr;
  auto law = std::make_shared<PiecewiseLaw>(
      name_ + "*", pieces_, base_sampler_, a * a_, std::hypot(a * s_, s));
  return law;
}

}  // namespace steininfo
