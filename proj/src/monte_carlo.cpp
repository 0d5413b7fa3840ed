#include "steininfo/monte_carlo.hpp"

#include <atomic>
#include <cmath>
#include <stdexcept>

#include "steininfo/parallel.hpp"

namespace steininfo {

BlockSums accumulate_blocks(
    std::size_t n_samples, std::size_t width, int jobs,
    const std::function<void(std::size_t index, double* out)>& acc) {
  if (n_samples == 0) throw DomainError("accumulate_blocks: empty sample set");
  BlockSums out;
  out.width = width;
  out.n = n_samples;
  const std::size_t nblocks = (n_samples + kReductionBlock - 1) / kReductionBlock;
  out.blocks.assign(nblocks, {});
  parallel_for(nblocks, jobs, [&](std::size_t b) {
    std::vector<double> sums(width, 0.0);
    const std::size_t lo = b * kReductionBlock;
    const std::size_t hi = std::min(lo + kReductionBlock, n_samples);
    for (std::size_t i = lo; i < hi; ++i) acc(i, sums.data());
    out.blocks[b] = std::move(sums);
  });
  out.total.assign(width, 0.0);
  for (const auto& blk : out.blocks)
    for (std::size_t k = 0; k < width; ++k) out.total[k] += blk[k];
  return out;
}

double jackknife_se(
    const BlockSums& sums,
    const std::function<double(const std::vector<double>&, std::size_t)>& F) {
  const std::size_t B = sums.block_count();
  if (B < 2) return 0.0;
  std::vector<double> loo(B);
  std::vector<double> partial(sums.width);
  double mean = 0.0;
  for (std::size_t b = 0; b < B; ++b) {
    for (std::size_t k = 0; k < sums.width; ++k)
      partial[k] = sums.total[k] - sums.blocks[b][k];
    loo[b] = F(partial, sums.n - sums.block_size(b));
    mean += loo[b];
  }
  mean /= static_cast<double>(B);
  double ss = 0.0;
  for (double v : loo) ss += (v - mean) * (v - mean);
  return std::sqrt(ss * static_cast<double>(B - 1) / static_cast<double>(B));
}

EstimatorReport mc_expectation_stream(
    const std::function<double(SampleStream&)>& draw, const MCSpec& spec,
    const std::string& method) {
  std::atomic<std::size_t> first_bad{spec.n_samples};
  const BlockSums sums = accumulate_blocks(
      spec.n_samples, 2, spec.n_streams, [&](std::size_t i, double* out) {
        SampleStream st(spec.seed, i);
        const double v = draw(st);
        if (!std::isfinite(v)) {
          std::size_t cur = first_bad.load();
          while (i < cur && !first_bad.compare_exchange_weak(cur, i)) {
          }
          return;
        }
        out[0] += v;
        out[1] += v * v;
      });
  if (first_bad.load() != spec.n_samples)
    throw NumericError("non-finite sample value at index " +
                       std::to_string(first_bad.load()));
  const double n = static_cast<double>(spec.n_samples);
  const double mean = sums.total[0] / n;
  const double var = std::max(0.0, (sums.total[1] - n * mean * mean) / (n - 1.0));
  EstimatorReport rep;
  rep.value = mean;
  rep.std_error = std::sqrt(var / n);
  rep.n = spec.n_samples;
  rep.method = method;
  rep.seed = spec.seed;
  return rep;
}

EstimatorReport mc_expectation(const Law1D& model,
                               const std::function<double(double)>& g,
                               const MCSpec& spec, const std::string& method) {
  return mc_expectation_stream(
      [&](SampleStream& st) { return g(model.sample(st)); }, spec, method);
}

}  // namespace steininfo
