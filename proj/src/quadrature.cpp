#include "steininfo/quadrature.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <sstream>

#include "steininfo/special.hpp"

namespace steininfo {

namespace {

double safe_eval(const RealFn& f, double x, double lo, double hi) {
  double v = f(x);
  if (std::isfinite(v)) return v;
  // Shift evaluation inward from a bad panel edge by machine-scaled offsets.
  const double span = hi - lo;
  double off = span * 0x1.0p-46;
  for (int k = 0; k < 26 && !std::isfinite(v); ++k, off *= 2.0) {
    double xs = x;
    if (x - lo < span * 0.5) xs = x + off;
    else xs = x - off;
    v = f(xs);
  }
  if (!std::isfinite(v)) {
    std::ostringstream msg;
    msg << "integrate: non-finite integrand near x=" << x;
    throw NumericError(msg.str());
  }
  return v;
}

struct PanelState {
  double worst_err = 0.0;
  bool exhausted = false;
};

double simpson_rec(const RealFn& f, double a, double fa, double b, double fb,
                   double m, double fm, double whole, double tol, int depth,
                   double lo, double hi, PanelState& st) {
  const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
  const double flm = safe_eval(f, lm, lo, hi), frm = safe_eval(f, rm, lo, hi);
  const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  const double err = (left + right - whole) / 15.0;
  if (std::fabs(err) <= tol || (b - a) < 1e-14 * (hi - lo)) {
    return left + right + err;
  }
  if (depth <= 0) {
    st.exhausted = true;
    st.worst_err = std::max(st.worst_err, std::fabs(err));
    return left + right + err;
  }
  return simpson_rec(f, a, fa, m, fm, lm, flm, left, 0.5 * tol, depth - 1, lo, hi, st) +
         simpson_rec(f, m, fm, b, fb, rm, frm, right, 0.5 * tol, depth - 1, lo, hi, st);
}

double simpson_panel(const RealFn& f, double a, double b, double tol,
                     int max_depth, PanelState& st) {
  // Pre-split every panel so narrow features away from the midpoint are seen.
  const int init = 8;
  double total = 0.0;
  for (int i = 0; i < init; ++i) {
    const double pa = a + (b - a) * i / init;
    const double pb = a + (b - a) * (i + 1) / init;
    const double pm = 0.5 * (pa + pb);
    const double fa = safe_eval(f, pa, a, b);
    const double fb = safe_eval(f, pb, a, b);
    const double fm = safe_eval(f, pm, a, b);
    const double whole = (pb - pa) / 6.0 * (fa + 4.0 * fm + fb);
    total += simpson_rec(f, pa, fa, pb, fb, pm, fm, whole, tol / init,
                         max_depth, a, b, st);
  }
  return total;
}

}  // namespace

double integrate(const RealFn& f, double a, double b, const QuadratureSpec& spec,
                 const std::vector<double>& breakpoints) {
  if (a == b) return 0.0;
  if (a > b) return -integrate(f, b, a, spec, breakpoints);
  if (!std::isfinite(a) || !std::isfinite(b))
    throw DomainError("integrate: endpoints must be finite (truncate first)");

  std::vector<double> cuts;
  cuts.push_back(a);
  for (double c : breakpoints)
    if (c > a && c < b) cuts.push_back(c);
  cuts.push_back(b);
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());

  PanelState st;
  const double panel_tol = spec.abs_tol / static_cast<double>(cuts.size() - 1);
  double total = 0.0;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i)
    total += simpson_panel(f, cuts[i], cuts[i + 1], panel_tol, spec.max_depth, st);

  if (st.exhausted && st.worst_err > spec.abs_tol) {
    std::ostringstream msg;
    msg << "integrate: depth exhausted; achieved error estimate "
        << st.worst_err << " exceeds tolerance " << spec.abs_tol;
    throw NumericError(msg.str());
  }
  return total;
}

namespace {

QuadRule golub_welsch(const Eigen::VectorXd& offdiag, double weight_total) {
  const int n = static_cast<int>(offdiag.size()) + 1;
  Eigen::MatrixXd J = Eigen::MatrixXd::Zero(n, n);
  for (int i = 0; i + 1 < n; ++i) {
    J(i, i + 1) = offdiag(i);
    J(i + 1, i) = offdiag(i);
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(J);
  QuadRule rule;
  rule.x.resize(n);
  rule.w.resize(n);
  for (int i = 0; i < n; ++i) {
    rule.x[i] = es.eigenvalues()(i);
    const double v0 = es.eigenvectors()(0, i);
    rule.w[i] = weight_total * v0 * v0;
  }
  return rule;
}

}  // namespace

QuadRule gauss_legendre(int n) {
  if (n < 1) throw DomainError("gauss_legendre: need n >= 1");
  Eigen::VectorXd off(n - 1);
  for (int k = 1; k < n; ++k) off(k - 1) = k / std::sqrt(4.0 * k * k - 1.0);
  return golub_welsch(off, 2.0);
}

QuadRule gauss_legendre(int n, double a, double b) {
  QuadRule r = gauss_legendre(n);
  const double c = 0.5 * (a + b), h = 0.5 * (b - a);
  for (int i = 0; i < n; ++i) {
    r.x[i] = c + h * r.x[i];
    r.w[i] *= h;
  }
  return r;
}

QuadRule gauss_hermite(int n) {
  if (n < 1) throw DomainError("gauss_hermite: need n >= 1");
  Eigen::VectorXd off(n - 1);
  for (int k = 1; k < n; ++k) off(k - 1) = std::sqrt(0.5 * k);
  return golub_welsch(off, std::sqrt(M_PI));
}

double gauss_hermite_expectation(const RealFn& g, int n) {
  const QuadRule r = gauss_hermite(n);
  double s = 0.0;
  for (std::size_t i = 0; i < r.x.size(); ++i)
    s += r.w[i] * g(kSqrt2 * r.x[i]);
  return s / std::sqrt(M_PI);
}

}  // namespace steininfo
