#include "steininfo/stein.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <variant>

#include "steininfo/common.hpp"
#include "steininfo/quadrature.hpp"
#include "steininfo/registry.hpp"
#include "steininfo/special.hpp"

namespace steininfo {

namespace {

// Upper partial first moment of one raw piece in base coordinates.
double piece_partial_moment(const Piece& p, double u) {
  if (const auto* g = std::get_if<GaussPiece>(&p)) {
    const double z = (u - g->mu) / g->sigma;
    return g->w * (g->mu * norm_sf(z) + g->sigma * norm_pdf(z));
  }
  if (const auto* e = std::get_if<ExpPiece>(&p)) {
    const double l = e->lambda;
    if (e->dir > 0) {
      const double w = std::max(u - e->x0, 0.0);
      return e->c * std::exp(-l * w) * (w / l + 1.0 / (l * l) + e->x0 / l);
    }
    if (u >= e->x0) return 0.0;
    const double w = e->x0 - u, ew = std::exp(-l * w);
    return e->c * (e->x0 * (1.0 - ew) / l - 1.0 / (l * l) + ew * (w / l + 1.0 / (l * l)));
  }
  const auto& f = std::get<FlatPiece>(p);
  const double c = std::clamp(u, f.lo, f.hi);
  return f.h * (f.hi * f.hi - c * c) / 2.0;
}

// Gaussian atom parameters of a piece after x -> a*x + s*Z, when Gaussian.
bool smoothed_gauss_atom(const Piece& p, double a, double s, double* w,
                         double* m, double* sig) {
  const auto* g = std::get_if<GaussPiece>(&p);
  if (!g) return false;
  *w = g->w;
  *m = a * g->mu;
  *sig = std::hypot(a * g->sigma, s);
  return true;
}

// Natural cubic spline table for the cached quadrature path.
class MomentTable {
 public:
  // tail is \int_hi^sup y f(y) dy, the sweep's starting value.
  MomentTable(const Law1D& law, double lo, double hi, std::size_t n, double tail)
      : lo_(lo), step_((hi - lo) / static_cast<double>(n - 1)), v_(n), m_(n, 0.0) {
    QuadRule gl = gauss_legendre(15);
    v_[n - 1] = tail;
    for (std::size_t i = n - 1; i-- > 0;) {
      const double a = lo_ + step_ * static_cast<double>(i);
      double panel = 0.0;
      for (std::size_t k = 0; k < gl.x.size(); ++k) {
        const double x = a + step_ * 0.5 * (gl.x[k] + 1.0);
        panel += gl.w[k] * x * law.pdf(x);
      }
      v_[i] = v_[i + 1] + panel * step_ * 0.5;
    }
    if (n >= 3) {
      std::vector<double> c(n, 0.0), d(n, 0.0);
      const double diag = 2.0 * step_ / 3.0, off = step_ / 6.0;
      for (std::size_t i = 1; i + 1 < n; ++i) {
        const double rhs = (v_[i + 1] - 2.0 * v_[i] + v_[i - 1]) / step_;
        const double denom = diag - off * c[i - 1];
        c[i] = off / denom;
        d[i] = (rhs - off * d[i - 1]) / denom;
      }
      for (std::size_t i = n - 2; i >= 1; --i) m_[i] = d[i] - c[i] * m_[i + 1];
    }
  }

  double lo() const { return lo_; }
  double hi() const { return lo_ + step_ * static_cast<double>(v_.size() - 1); }
  double at_lo() const { return v_.front(); }

  double eval(double x) const {
    std::size_t j = static_cast<std::size_t>((x - lo_) / step_);
    j = std::min(j, v_.size() - 2);
    const double a = lo_ + step_ * static_cast<double>(j);
    const double u = x - a, w = step_ - u;
    return m_[j] * w * w * w / (6.0 * step_) + m_[j + 1] * u * u * u / (6.0 * step_) +
           (v_[j] / step_ - m_[j] * step_ / 6.0) * w +
           (v_[j + 1] / step_ - m_[j + 1] * step_ / 6.0) * u;
  }

 private:
  double lo_, step_;
  std::vector<double> v_, m_;
};

}  // namespace

SteinKernel1D::SteinKernel1D(LawPtr model) : model_(std::move(model)) {
  if (!model_) throw DomainError("stein kernel needs a model");
  const auto pw = as_piecewise(model_);

  if (pw && pw->closed_form_kernel()) {
    closed_ = pw->closed_form_kernel();
    LawPtr law = model_;
    auto cf = closed_;
    moment_ = [law, cf](double x) { return cf(x) * law->pdf(x); };
    prov_ = KernelProvenance::ClosedForm;
    return;
  }

  if (pw && pw->noise_sigma() == 0.0) {
    const double a = pw->base_scale();
    const auto pieces = pw->pieces();
    moment_ = [a, pieces](double x) {
      double h = 0.0;
      for (const Piece& p : pieces) h += piece_partial_moment(p, x / a);
      return a * h;
    };
    prov_ = KernelProvenance::ClosedForm;
    return;
  }

  if (pw) {
    bool all_gauss = true;
    std::vector<std::array<double, 3>> atoms;
    for (const Piece& p : pw->pieces()) {
      double w, m, sig;
      if (!smoothed_gauss_atom(p, pw->base_scale(), pw->noise_sigma(), &w, &m, &sig)) {
        all_gauss = false;
        break;
      }
      atoms.push_back({w, m, sig});
    }
    if (all_gauss) {
      moment_ = [atoms](double x) {
        double h = 0.0;
        for (const auto& [w, m, sig] : atoms) {
          const double z = (x - m) / sig;
          h += w * (m * norm_sf(z) + sig * norm_pdf(z));
        }
        return h;
      };
      prov_ = KernelProvenance::ClosedForm;
      return;
    }
  }

  // Cached cumulative quadrature of y*f(y), exact adaptive fallback in the
  // far tails where the table would lose relative accuracy.
  const double sd = model_->std_dev(), mu = model_->mean();
  const Support sup = model_->support();
  const double lo = std::max(sup.lo, mu - 10.0 * sd);
  const double hi = std::min(sup.hi, mu + 10.0 * sd);
  const double far = std::min(sup.hi, mu + kSigmaTruncation * sd);
  LawPtr law = model_;
  QuadratureSpec spec;
  spec.abs_tol = 1e-13;
  auto integrand = [law](double y) { return y * law->pdf(y); };
  const double tail =
      hi >= far ? 0.0 : integrate(integrand, hi, far, spec, law->breakpoints());
  auto table = std::make_shared<MomentTable>(*model_, lo, hi, 4096, tail);
  moment_ = [table, law, integrand, spec, far](double x) {
    if (x >= table->hi())
      return x >= far ? 0.0 : integrate(integrand, x, far, spec, law->breakpoints());
    if (x < table->lo())
      return table->at_lo() +
             integrate(integrand, x, table->lo(), spec, law->breakpoints());
    return table->eval(x);
  };
  prov_ = KernelProvenance::Quadrature;
}

double SteinKernel1D::partial_first_moment(double x) const { return moment_(x); }

double SteinKernel1D::operator()(double x) const {
  if (closed_) return closed_(x) + shift_;
  const double f = model_->pdf(x);
  if (f < kDensityFloor)
    throw NumericError("stein kernel: density below positivity floor at x=" +
                       std::to_string(x));
  return moment_(x) / f + shift_;
}

SteinKernel1D SteinKernel1D::perturbed(double delta) const {
  SteinKernel1D k(*this);
  k.shift_ += delta;
  return k;
}

std::vector<TestFunction> test_suite(const Law1D& model) {
  const double sd = model.std_dev(), mu = model.mean();
  const Support sup = model.support();
  const double a = std::max(sup.lo, mu - 6.0 * sd);
  const double b = std::min(sup.hi, mu + 6.0 * sd);
  const double mid = 0.5 * (a + b), half = 0.5 * (b - a);

  auto bump = [mid, half](double x) {
    const double u = (x - mid) / half;
    const double g = 1.0 - u * u;
    return g <= 1e-12 ? 0.0 : std::exp(1.0 - 1.0 / g);
  };
  auto dbump = [mid, half, bump](double x) {
    const double u = (x - mid) / half;
    const double g = 1.0 - u * u;
    if (g <= 1e-12) return 0.0;
    return bump(x) * (-2.0 * u / (g * g)) / half;
  };

  std::vector<TestFunction> suite;
  for (int k = 0; k <= 4; ++k) {
    TestFunction tf;
    tf.lo = a;
    tf.hi = b;
    tf.value = [k, bump](double x) { return std::pow(x, k) * bump(x); };
    tf.deriv = [k, bump, dbump](double x) {
      const double poly = std::pow(x, k);
      const double dpoly = k == 0 ? 0.0 : k * std::pow(x, k - 1);
      return dpoly * bump(x) + poly * dbump(x);
    };
    suite.push_back(std::move(tf));
  }
  return suite;
}

IdentityCheck verify_score_identity(const Law1D& model) {
  QuadratureSpec spec;
  spec.abs_tol = 1e-12;
  const Support sup = model.support();
  IdentityCheck out;
  for (const TestFunction& tf : test_suite(model)) {
    const double r = integrate(
        [&](double x) {
          // Window edges may sit on the support boundary, where the test
          // function vanishes to all orders; the integrand limit is zero.
          if (!sup.contains(x)) return 0.0;
          return (model.score(x) * tf.value(x) + tf.deriv(x)) * model.pdf(x);
        },
        tf.lo, tf.hi, spec, model.breakpoints());
    out.per_function.push_back(r);
    out.max_residual = std::max(out.max_residual, std::fabs(r));
  }
  return out;
}

IdentityCheck verify_stein_identity(const SteinKernel1D& kernel) {
  const Law1D& model = kernel.model();
  QuadratureSpec spec;
  spec.abs_tol = 1e-12;
  IdentityCheck out;
  for (const TestFunction& tf : test_suite(model)) {
    const double r = integrate(
        [&](double x) {
          return (kernel(x) * tf.deriv(x) - x * tf.value(x)) * model.pdf(x);
        },
        tf.lo, tf.hi, spec, model.breakpoints());
    out.per_function.push_back(r);
    out.max_residual = std::max(out.max_residual, std::fabs(r));
  }
  return out;
}

double kernel_discrepancy(const LawPtr& law) {
  const Law1D& model = *law;
  SteinKernel1D kernel(law);
  const double sd = model.std_dev(), mu = model.mean();
  const Support sup = model.support();
  const double a = std::max(sup.lo, mu - kSigmaTruncation * sd);
  const double b = std::min(sup.hi, mu + kSigmaTruncation * sd);
  QuadratureSpec spec;
  spec.abs_tol = 1e-11;
  std::vector<double> cuts = model.breakpoints();
  for (const Jump& j : model.jumps()) cuts.push_back(j.x);
  return integrate(
      [&](double x) {
        const double fx = model.pdf(x);
        // Skip tail points whose density has underflowed; the kernel ratio
        // is undefined there and the mass contributes nothing.
        if (fx < 1e-280) return 0.0;
        const double d = 1.0 - kernel(x);
        return d * d * fx;
      },
      a, b, spec, cuts);
}

}  // namespace steininfo
