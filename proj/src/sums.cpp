#include "steininfo/sums.hpp"

#include <cmath>
#include <cstdio>
#include <map>
#include <utility>

#include "steininfo/registry.hpp"

namespace steininfo {

GridLaw::GridLaw(std::string name, std::shared_ptr<const GridDensity> grid,
                 Sampler sampler, double mean, double variance)
    : name_(std::move(name)),
      grid_(std::move(grid)),
      sampler_(std::move(sampler)),
      mean_(mean),
      var_(variance) {
  if (!grid_ || !sampler_) throw DomainError("grid law needs a density and a sampler");
  if (!(var_ > 0.0)) throw DomainError("grid law needs positive variance");
}

std::vector<double> GridLaw::breakpoints() const {
  std::vector<double> out;
  for (double h : grid_->hints())
    if (h > grid_->lo() && h < grid_->hi()) out.push_back(h);
  return out;
}

LawPtr GridLaw::scaled_noisy(double a, double s) const {
  if (!(a > 0.0) || s < 0.0) return nullptr;
  const Sampler base = sampler_;
  if (s == 0.0) {
    auto scaled = std::make_shared<GridDensity>(grid_->scaled(a));
    return std::make_shared<GridLaw>(
        name_ + "*", std::move(scaled),
        [base, a](SampleStream& st) { return a * base(st); }, a * mean_,
        a * a * var_);
  }
  auto grid = std::make_shared<GridDensity>(convolve_densities(
      DensitySource(grid_), DensitySource(model_by_name("gaussian")), a, s));
  return std::make_shared<GridLaw>(
      name_ + "*", std::move(grid),
      [base, a, s](SampleStream& st) {
        const double x = base(st);
        return a * x + s * st.next_gaussian();
      },
      a * mean_, a * a * var_ + s * s);
}

namespace {

DensitySource source_for(const LawPtr& base, int n, const GridSpec& gs,
                         std::map<int, DensitySource>& memo) {
  if (const auto it = memo.find(n); it != memo.end()) return it->second;
  DensitySource src = [&]() -> DensitySource {
    if (n == 1) return {base};
    const int k = n / 2, m = n - k;
    const double dn = n;
    return {std::make_shared<GridDensity>(convolve_densities(
        source_for(base, k, gs, memo), source_for(base, m, gs, memo),
        std::sqrt(k / dn), std::sqrt(m / dn), gs))};
  }();
  memo.emplace(n, src);
  return src;
}

LawPtr wrap_sum(const LawPtr& base, int n,
                std::shared_ptr<const GridDensity> grid) {
  const double rn = std::sqrt(static_cast<double>(n));
  auto sampler = [base, n, rn](SampleStream& st) {
    double t = 0.0;
    for (int i = 0; i < n; ++i) t += base->sample(st);
    return t / rn;
  };
  return std::make_shared<GridLaw>(
      "sum" + std::to_string(n) + "(" + base->name() + ")", std::move(grid),
      std::move(sampler), rn * base->mean(), base->variance());
}

}  // namespace

LawPtr sum_law(const LawPtr& base, int n, const GridSpec& gs) {
  if (!base) throw DomainError("null summand");
  if (n < 1) throw DomainError("sum needs n >= 1");
  if (n == 1) return base;
  std::map<int, DensitySource> memo;
  return wrap_sum(base, n, source_for(base, n, gs, memo).grid_ptr());
}

std::vector<LawPtr> sum_laws(const LawPtr& base, const std::vector<int>& ns,
                             const GridSpec& gs) {
  if (!base) throw DomainError("null summand");
  std::map<int, DensitySource> memo;
  std::vector<LawPtr> out;
  out.reserve(ns.size());
  for (int n : ns) {
    if (n < 1) throw DomainError("sum needs n >= 1");
    out.push_back(n == 1 ? base
                         : wrap_sum(base, n,
                                    source_for(base, n, gs, memo).grid_ptr()));
  }
  return out;
}

LawPtr combine_laws(const LawPtr& x, const LawPtr& y, double a, double b,
                    const GridSpec& gs) {
  if (!x || !y) throw DomainError("null combination factor");
  auto grid = std::make_shared<GridDensity>(
      convolve_densities(DensitySource(x), DensitySource(y), a, b, gs));
  auto sampler = [x, y, a, b](SampleStream& st) {
    const double u = x->sample(st);
    return a * u + b * y->sample(st);
  };
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6g,%.6g", a, b);
  return std::make_shared<GridLaw>(
      "comb(" + x->name() + "," + y->name() + ";" + buf + ")", std::move(grid),
      std::move(sampler), a * x->mean() + b * y->mean(),
      a * a * x->variance() + b * b * y->variance());
}

}  // namespace steininfo
