#pragma once

#include <functional>
#include <vector>

#include "steininfo/common.hpp"

namespace steininfo {

/* Rule selection is honored by expectation-style callers: full-line
   Gaussian-weighted integrands may go through the Hermite rule, everything
   else through the adaptive panels of integrate(). */
struct QuadratureSpec {
  enum class Rule { AdaptiveSimpson, GaussHermite };
  Rule rule = Rule::AdaptiveSimpson;
  double abs_tol = 1e-10;
  int max_depth = 48;
  int nodes = 64;  // order used when rule == GaussHermite
};

using RealFn = std::function<double(double)>;

/* Integrates f over [a, b]. Interior breakpoints split the range into
   panels so kinks, jumps and known spike locations are resolved; each panel
   receives a share of the absolute tolerance. Non-finite evaluations at a
   panel edge are retried slightly inward; depth exhaustion raises
   NumericError carrying the achieved error estimate. */
double integrate(const RealFn& f, double a, double b,
                 const QuadratureSpec& spec = {},
                 const std::vector<double>& breakpoints = {});

struct QuadRule {
  std::vector<double> x, w;
};

QuadRule gauss_legendre(int n);         // weight 1 on [-1, 1]
QuadRule gauss_legendre(int n, double a, double b);
QuadRule gauss_hermite(int n);          // weight exp(-x^2) on the line

// Expectation of g under the standard normal via an n-node Hermite rule.
double gauss_hermite_expectation(const RealFn& g, int n = 64);

}  // namespace steininfo
