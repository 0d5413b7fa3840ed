#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "steininfo/common.hpp"
#include "steininfo/density.hpp"
#include "steininfo/rng.hpp"

namespace steininfo {

// Samples are reduced in fixed-size blocks so the merge order never depends
// on the worker count; per-sample streams make the values themselves
// placement independent.
inline constexpr std::size_t kReductionBlock = 4096;

struct MCSpec {
  std::uint64_t seed = 20260814;
  std::size_t n_samples = 200000;
  int n_streams = 0;  // 0 -> default_jobs()
};

struct EstimatorReport {
  double value = 0.0;
  double std_error = 0.0;
  std::size_t n = 0;
  std::string method;
  std::uint64_t seed = 0;
};

// Per-block partial sums of a fixed-width statistic vector. acc is called
// once per sample index in increasing order within each block and must add
// its contribution into out[0..width).
struct BlockSums {
  std::size_t width = 0;
  std::size_t n = 0;
  std::vector<std::vector<double>> blocks;  // blocks[b] has length width
  std::vector<double> total;                // ordered sum over blocks
  std::size_t block_count() const { return blocks.size(); }
  std::size_t block_size(std::size_t b) const {
    const std::size_t lo = b * kReductionBlock;
    return std::min(kReductionBlock, n - lo);
  }
};

BlockSums accumulate_blocks(
    std::size_t n_samples, std::size_t width, int jobs,
    const std::function<void(std::size_t index, double* out)>& acc);

// Leave-one-block-out standard error of F(total sums, n). F must be a pure
// function of the aggregated statistics.
double jackknife_se(
    const BlockSums& sums,
    const std::function<double(const std::vector<double>&, std::size_t)>& F);

EstimatorReport mc_expectation_stream(
    const std::function<double(SampleStream&)>& draw, const MCSpec& spec,
    const std::string& method = "mc");

EstimatorReport mc_expectation(const Law1D& model,
                               const std::function<double(double)>& g,
                               const MCSpec& spec,
                               const std::string& method = "mc");

}  // namespace steininfo
