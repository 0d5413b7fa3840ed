#pragma once

#include "steininfo/density.hpp"
#include "steininfo/quadrature.hpp"

namespace steininfo {

/* Integration cut points for a law: interior kinks, density jumps, and for
   noise-smoothed models a few multiples of the noise width around each
   underlying edge, so adaptive panels resolve narrow transition layers. */
std::vector<double> law_cuts(const Law1D& model);

// \int g(x) f(x) dx over the support intersected with mean +- 40 sd.
double law_expectation(const Law1D& model, const RealFn& g,
                       double abs_tol = 1e-10);

// p-quantile by bisection on the cdf, p in (0, 1).
double law_quantile(const Law1D& model, double p);

/* Score-quadratic functionals. A density jump puts a point mass into the
   distributional derivative of log f; the absolutely continuous part
   reported here is then only a lower bound and the usual identities
   (e.g. E[rho] = 0) fail. boundary_divergent flags that case. */
struct ScoreFunctional {
  double value = 0.0;
  bool boundary_divergent = false;
};

// E[rho(X)^2] with rho = f'/f on the interior.
ScoreFunctional fisher_information(const LawPtr& model, double abs_tol = 1e-10);

struct RelFisherReport {
  double j_rel = 0.0;  // E[(rho(X) + (X - m)/B)^2], B = Var X
  double j_st = 0.0;   // B * j_rel, invariant under scaling
  bool boundary_divergent = false;
};

// Fisher distance to the moment-matched Gaussian.
RelFisherReport relative_fisher(const LawPtr& model, double abs_tol = 1e-10);

// Scale-invariant relative Fisher information only.
double jst_quadrature(const LawPtr& model, double abs_tol = 1e-10);

// D(X || N(m, B)) = \int f log(f / phi_{m,B}), nonnegative, zero iff Gaussian.
double relative_entropy(const LawPtr& model, double abs_tol = 1e-10);

// d_tv(X, N(m, B)) = 1/2 \int |f - phi_{m,B}|, via sign-change isolation.
double total_variation(const LawPtr& model, double abs_tol = 1e-12);

/* Law of sqrt(t) X + sqrt(1-t) Z along the variance-preserving Gaussian
   channel, t in (0, 1). Throws CapabilityError when the model cannot
   produce its smoothed law in closed form. */
LawPtr channel_law(const LawPtr& base, double t);

/* Relative entropy recovered by integrating the relative Fisher information
   along the channel: D = \int_0^1 jst(X_t) / (2t) dt. The substitutions
   t = u^2 at the left end and u = 1 - y^2 at the right end make the
   integrand analytic on each panel even for bases with density jumps, and
   keep every node strictly inside (0, 1). nodes is the Gauss-Legendre order
   per panel. */
double debruijn_entropy(const LawPtr& base, int nodes = 16);

}  // namespace steininfo
