#pragma once

#include <memory>
#include <string>
#include <vector>

#include "steininfo/common.hpp"
#include "steininfo/rng.hpp"

namespace steininfo {

struct Support {
  double lo = -kInf;
  double hi = kInf;
  bool contains(double x) const { return x > lo && x < hi; }  // open interior
  bool bounded_below() const { return lo > -kInf; }
  bool bounded_above() const { return hi < kInf; }
};

// Density discontinuity: f(x+) - f(x-) = delta.
struct Jump {
  double x;
  double delta;
};

class Law1D;
using LawPtr = std::shared_ptr<const Law1D>;

/* A one-dimensional law. Immutable after construction. pdf/dpdf/cdf are
   defined on the whole line (zero off the support); score only on the open
   interior of the support. */
class Law1D {
 public:
  virtual ~Law1D() = default;

  virtual std::string name() const = 0;
  virtual double pdf(double x) const = 0;
  virtual double dpdf(double x) const = 0;  // a.e. derivative of the density
  virtual double cdf(double x) const = 0;
  virtual double mean() const = 0;
  virtual double variance() const = 0;
  virtual Support support() const = 0;
  virtual double sample(SampleStream& s) const = 0;

  // Interior points where the density is continuous but not smooth.
  virtual std::vector<double> breakpoints() const { return {}; }
  // Density discontinuities, including ones at finite support edges.
  virtual std::vector<Jump> jumps() const { return {}; }
  /* True when the score is a genuine weak derivative of log f on the whole
     line, i.e. the integration-by-parts identity holds for every smooth
     compactly supported test function, with no boundary mass. */
  virtual bool regular_score() const { return true; }

  // Law of a*X + s*Z in closed form when available (Z standard normal).
  virtual LawPtr scaled_noisy(double a, double s) const {
    (void)a;
    (void)s;
    return nullptr;
  }

  double log_pdf(double x) const {
    const double f = pdf(x);
    return std::log(f < kDensityFloor ? kDensityFloor : f);
  }

  double score(double x) const {
    if (!support().contains(x))
      throw DomainError(name() + ": score evaluated outside the open support at x=" +
                        std::to_string(x));
    const double f = pdf(x);
    if (f < kDensityFloor) return 0.0;
    return dpdf(x) / f;
  }

  double std_dev() const { return std::sqrt(variance()); }
};

}  // namespace steininfo
