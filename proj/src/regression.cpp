#include "steininfo/regression.hpp"

#include <algorithm>
#include <cmath>

#include "steininfo/common.hpp"
#include "steininfo/parallel.hpp"

namespace steininfo {

namespace {
constexpr double kKernelSpan = 8.0;  // Gaussian kernel truncation, in bandwidths
}

ConditionalFit ConditionalFit::fit(
    const RegressorSpec& spec, std::uint64_t seed, std::size_t n, int jobs,
    const std::function<std::pair<double, double>(std::size_t, SampleStream&)>&
        draw) {
  if (n < 1000) throw DomainError("conditional fit needs at least 1000 samples");
  ConditionalFit out;
  out.spec_ = spec;
  out.n_ = n;
  out.nblocks_ = (n + kReductionBlock - 1) / kReductionBlock;

  // First pass: range and spread of the conditioning variable.
  struct RangeStat {
    double lo = kInf, hi = -kInf, s1 = 0.0, s2 = 0.0;
  };
  std::vector<RangeStat> per_block(out.nblocks_);
  parallel_for(out.nblocks_, jobs, [&](std::size_t b) {
    RangeStat r;
    const std::size_t lo = b * kReductionBlock;
    const std::size_t hi = std::min(lo + kReductionBlock, n);
    for (std::size_t i = lo; i < hi; ++i) {
      SampleStream st(seed, i);
      const double w = draw(i, st).first;
      if (!std::isfinite(w))
        throw NumericError("non-finite conditioning value at index " +
                           std::to_string(i));
      r.lo = std::min(r.lo, w);
      r.hi = std::max(r.hi, w);
      r.s1 += w;
      r.s2 += w * w;
    }
    per_block[b] = r;
  });
  RangeStat all;
  for (const RangeStat& r : per_block) {
    all.lo = std::min(all.lo, r.lo);
    all.hi = std::max(all.hi, r.hi);
    all.s1 += r.s1;
    all.s2 += r.s2;
  }
  const double nn = static_cast<double>(n);
  const double mean = all.s1 / nn;
  const double sd = std::sqrt(std::max(0.0, (all.s2 - nn * mean * mean) / (nn - 1.0)));
  out.lo_ = all.lo;
  out.bin_w_ = (all.hi - all.lo) / static_cast<double>(spec.bins);
  if (!(out.bin_w_ > 0.0)) throw NumericError("degenerate conditioning variable");
  out.h_ = spec.bandwidth > 0.0
               ? spec.bandwidth
               : 1.06 * sd * std::pow(nn, -0.2) * spec.bandwidth_scale;

  // Second pass: per-block bin sums.
  const std::size_t nb = spec.bins;
  out.blk_cnt_.assign(out.nblocks_ * nb, 0.0);
  out.blk_sum_.assign(out.nblocks_ * nb, 0.0);
  parallel_for(out.nblocks_, jobs, [&](std::size_t b) {
    double* cnt = out.blk_cnt_.data() + b * nb;
    double* sum = out.blk_sum_.data() + b * nb;
    const std::size_t lo = b * kReductionBlock;
    const std::size_t hi = std::min(lo + kReductionBlock, n);
    for (std::size_t i = lo; i < hi; ++i) {
      SampleStream st(seed, i);
      const auto [w, y] = draw(i, st);
      if (!std::isfinite(y))
        throw NumericError("non-finite regression target at index " +
                           std::to_string(i));
      auto k = static_cast<std::size_t>((w - out.lo_) / out.bin_w_);
      k = std::min(k, nb - 1);
      cnt[k] += 1.0;
      sum[k] += y;
    }
  });
  out.cnt_.assign(nb, 0.0);
  out.sum_.assign(nb, 0.0);
  for (std::size_t b = 0; b < out.nblocks_; ++b)
    for (std::size_t k = 0; k < nb; ++k) {
      out.cnt_[k] += out.blk_cnt_[b * nb + k];
      out.sum_[k] += out.blk_sum_[b * nb + k];
    }
  out.cum_.assign(nb + 1, 0.0);
  for (std::size_t k = 0; k < nb; ++k) out.cum_[k + 1] = out.cum_[k] + out.cnt_[k];
  out.clamp_lo_ = out.quantile(0.01);
  out.clamp_hi_ = out.quantile(0.99);
  return out;
}

double ConditionalFit::quantile(double p) const {
  const double target = p * static_cast<double>(n_);
  const auto it = std::lower_bound(cum_.begin(), cum_.end(), target);
  const std::size_t k = it == cum_.begin()
                            ? 0
                            : static_cast<std::size_t>(it - cum_.begin()) - 1;
  return lo_ + (static_cast<double>(std::min(k, spec_.bins - 1)) + 0.5) * bin_w_;
}

std::size_t ConditionalFit::block_samples(std::size_t b) const {
  const std::size_t lo = b * kReductionBlock;
  return std::min(kReductionBlock, n_ - lo);
}

double ConditionalFit::eval_bins(double w, const double* cnt,
                                 const double* sum, bool clamp) const {
  if (clamp) w = std::clamp(w, clamp_lo_, clamp_hi_);
  if (spec_.method == RegressorSpec::Method::BinnedMean) {
    auto k = static_cast<std::size_t>((w - lo_) / bin_w_);
    k = std::min(k, spec_.bins - 1);
    return cnt[k] > 0.0 ? sum[k] / cnt[k] : 0.0;
  }
  const double span = kKernelSpan * h_;
  const auto k_lo = static_cast<std::size_t>(
      std::max(0.0, std::floor((w - span - lo_) / bin_w_)));
  const auto k_hi = std::min(
      spec_.bins,
      static_cast<std::size_t>(std::max(0.0, std::ceil((w + span - lo_) / bin_w_))) + 1);
  double num = 0.0, den = 0.0;
  for (std::size_t k = k_lo; k < k_hi; ++k) {
    if (cnt[k] == 0.0) continue;
    const double z = (w - (lo_ + (static_cast<double>(k) + 0.5) * bin_w_)) / h_;
    const double kw = std::exp(-0.5 * z * z);
    num += kw * sum[k];
    den += kw * cnt[k];
  }
  if (den <= 0.0) return 0.0;  // no local mass; caller sees a flat zero
  return num / den;
}

double ConditionalFit::operator()(double w) const {
  return eval_bins(w, cnt_.data(), sum_.data(), true);
}

ConditionalFit::LeaveOneOut ConditionalFit::without_block(std::size_t b) const {
  const std::size_t nb = spec_.bins;
  LeaveOneOut view;
  view.fit_ = this;
  view.cnt_.resize(nb);
  view.sum_.resize(nb);
  for (std::size_t k = 0; k < nb; ++k) {
    view.cnt_[k] = cnt_[k] - blk_cnt_[b * nb + k];
    view.sum_[k] = sum_[k] - blk_sum_[b * nb + k];
  }
  return view;
}

}  // namespace steininfo
