#pragma once

#include <cstdint>
#include <functional>
#include <utility>
#include <vector>

#include "steininfo/monte_carlo.hpp"

namespace steininfo {

struct RegressorSpec {
  enum class Method { NadarayaWatson, BinnedMean };
  Method method = Method::NadarayaWatson;
  double bandwidth = 0.0;        // explicit value; 0 selects Silverman's rule
  double bandwidth_scale = 1.0;  // multiplier applied to the rule value
  std::size_t bins = 2048;
};

/* Conditional mean estimate w -> E[y | w] built from binned sample sums.
   Samples are regenerated from (seed, index), accumulated into per-block bin
   sums, so fits are bit-identical for any worker count and leave-one-block-
   out refits are cheap. Evaluations outside the [1%, 99%] sample quantile
   range clamp to the boundary value. */
class ConditionalFit {
 public:
  static ConditionalFit fit(
      const RegressorSpec& spec, std::uint64_t seed, std::size_t n, int jobs,
      const std::function<std::pair<double, double>(std::size_t, SampleStream&)>&
          draw);

  double operator()(double w) const;
  bool clamps(double w) const { return w < clamp_lo_ || w > clamp_hi_; }

  /* Fit with one block's samples removed. Materializes the reduced bin sums
     once so repeated evaluations cost the same as the full fit. */
  class LeaveOneOut {
   public:
    double operator()(double w) const {
      return fit_->eval_bins(w, cnt_.data(), sum_.data(), true);
    }
    /* Raw kernel estimate, no tail clamp. Product averages pair each sample
       with a fit that never saw it; clamping the 2% tail mass would bias the
       average, while the extra tail variance only enters linearly. */
    double unclamped(double w) const {
      return fit_->eval_bins(w, cnt_.data(), sum_.data(), false);
    }

   private:
    friend class ConditionalFit;
    const ConditionalFit* fit_ = nullptr;
    std::vector<double> cnt_, sum_;
  };
  LeaveOneOut without_block(std::size_t b) const;

  double bandwidth() const { return h_; }
  double clamp_lo() const { return clamp_lo_; }
  double clamp_hi() const { return clamp_hi_; }
  double quantile(double p) const;  // bin-resolution sample quantile of w

  std::size_t n() const { return n_; }
  std::size_t bins() const { return spec_.bins; }
  std::size_t blocks() const { return nblocks_; }
  double bin_center(std::size_t k) const { return lo_ + (k + 0.5) * bin_w_; }
  double bin_width() const { return bin_w_; }
  double count(std::size_t k) const { return cnt_[k]; }
  double count_without_block(std::size_t k, std::size_t b) const {
    return cnt_[k] - blk_cnt_[b * spec_.bins + k];
  }
  std::size_t block_samples(std::size_t b) const;

 private:
  RegressorSpec spec_;
  std::size_t n_ = 0, nblocks_ = 0;
  double lo_ = 0.0, bin_w_ = 0.0, h_ = 0.0;
  double clamp_lo_ = 0.0, clamp_hi_ = 0.0;
  std::vector<double> cnt_, sum_;          // totals per bin
  std::vector<double> blk_cnt_, blk_sum_;  // per block * bin
  std::vector<double> cum_;                // cumulative counts for quantiles

  double eval_bins(double w, const double* cnt, const double* sum,
                   bool clamp) const;
};

}  // namespace steininfo
