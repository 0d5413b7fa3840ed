#pragma once

#include <functional>
#include <string>
#include <vector>

#include "steininfo/density.hpp"
#include "steininfo/grid_density.hpp"

namespace steininfo {

/* Law backed by a tabulated density together with an exact sampling recipe
   and exactly tracked first two moments. Produced by the factories below;
   the variance-preserving channel works on it through one further grid
   convolution with the Gaussian. */
class GridLaw final : public Law1D {
 public:
  using Sampler = std::function<double(SampleStream&)>;

  GridLaw(std::string name, std::shared_ptr<const GridDensity> grid,
          Sampler sampler, double mean, double variance);

  std::string name() const override { return name_; }
  double pdf(double x) const override { return grid_->pdf(x); }
  double dpdf(double x) const override { return grid_->dpdf(x); }
  double cdf(double x) const override { return grid_->cdf(x); }
  double mean() const override { return mean_; }
  double variance() const override { return var_; }
  Support support() const override { return {grid_->lo(), grid_->hi()}; }
  double sample(SampleStream& s) const override { return sampler_(s); }
  std::vector<double> breakpoints() const override;
  LawPtr scaled_noisy(double a, double s) const override;

  const GridDensity& grid() const { return *grid_; }

 private:
  std::string name_;
  std::shared_ptr<const GridDensity> grid_;
  Sampler sampler_;
  double mean_, var_;
};

/* Standardized i.i.d. sum (X_1 + ... + X_n)/sqrt(n), density by repeated
   grid convolution over a binary splitting of n. n = 1 returns base. */
LawPtr sum_law(const LawPtr& base, int n, const GridSpec& gs = {});

// Sums for several n at once, sharing intermediate convolutions.
std::vector<LawPtr> sum_laws(const LawPtr& base, const std::vector<int>& ns,
                             const GridSpec& gs = {});

// Law of a*X + b*Y for independent X, Y (a, b nonzero).
LawPtr combine_laws(const LawPtr& x, const LawPtr& y, double a, double b,
                    const GridSpec& gs = {});

}  // namespace steininfo
