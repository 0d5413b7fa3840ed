#pragma once

#include <memory>
#include <vector>

#include "steininfo/density.hpp"
#include "steininfo/quadrature.hpp"

namespace steininfo {

struct GridSpec {
  std::size_t points = 4096;
  double sigma_span = 12.0;
};

// Density tabulated on a uniform grid with natural cubic spline
// interpolation. Normalized to unit trapezoid mass at construction.
class GridDensity {
 public:
  GridDensity(double lo, double hi, std::vector<double> values,
              std::vector<double> hints = {});

  double pdf(double x) const;
  double dpdf(double x) const;
  double log_pdf(double x) const;
  double score(double x) const;
  // Mass below x under the interpolating spline, rescaled to end at 1.
  double cdf(double x) const;

  double lo() const { return lo_; }
  double hi() const { return hi_; }
  double step() const { return step_; }
  std::size_t size() const { return v_.size(); }
  double node(std::size_t i) const { return lo_ + step_ * static_cast<double>(i); }
  const std::vector<double>& values() const { return v_; }
  // Interior points carried over from construction where the density has
  // limited smoothness; downstream quadrature uses them as panel cuts.
  const std::vector<double>& hints() const { return hints_; }

  double mass_before_normalization() const { return raw_mass_; }
  double mean() const { return mean_; }
  double variance() const { return var_; }

  // Density of c*X (exact coordinate change).
  GridDensity scaled(double c) const;

 private:
  double lo_, hi_, step_;
  std::vector<double> v_;
  std::vector<double> m_;    // spline second derivatives
  std::vector<double> cum_;  // exact spline mass below each node
  std::vector<double> hints_;
  double raw_mass_ = 0.0, mean_ = 0.0, var_ = 0.0;

  void build();
};

// A convolution factor: either an analytic law (evaluated exactly under the
// integral) or a previously computed grid density.
class DensitySource {
 public:
  DensitySource(LawPtr law);            // NOLINT(google-explicit-constructor)
  DensitySource(GridDensity grid);      // NOLINT(google-explicit-constructor)
  DensitySource(std::shared_ptr<const GridDensity> grid);

  double pdf(double x) const;
  double lo() const;
  double hi() const;
  double mean() const;
  double variance() const;
  std::vector<double> cuts() const;  // kinks + jumps, for quadrature panels

  // Null when the source wraps an analytic law.
  std::shared_ptr<const GridDensity> grid_ptr() const { return grid_; }

 private:
  LawPtr law_;
  std::shared_ptr<const GridDensity> grid_;
};

// Density of scale_a*X + scale_b*Y for independent X ~ f, Y ~ g, by per-node
// quadrature of the convolution integral. Grid lattice is aligned so that 0
// is a node whenever it lies in range. Throws NumericError when more than
// 1e-6 of the mass falls outside the grid.
GridDensity convolve_densities(const DensitySource& f, const DensitySource& g,
                               double scale_a, double scale_b,
                               const GridSpec& gs = {});

}  // namespace steininfo
