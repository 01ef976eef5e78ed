#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "aicrowd/core.hpp"

namespace aicrowd {

struct BootstrapConfig {
  int n_resamples = 1000;
  double level = 0.95;
  std::uint64_t seed = 0;
};

// Seeded nonparametric bootstrap over instance indices.
//
// point = statistic on the identity index set. Each replicate draws
// instance_count indices with replacement from its own child seed, so the
// result is bit-identical at any `threads` value and any replicate
// evaluation order. Bounds are percentiles of the replicate values with
// linear interpolation between order statistics; se is the sample standard
// deviation of the replicates (divisor n_resamples - 1, exactly 0 when all
// replicates are equal).
//
// The statistic must be a pure function of the index multiset.
EstimateWithCI bootstrap(
    std::size_t instance_count,
    const std::function<double(const std::vector<std::size_t>&)>& statistic,
    const BootstrapConfig& cfg, int threads = 1);

// q in [0, 1] over a sorted sample; linear interpolation between order
// statistics (h = q * (n - 1)).
double percentile_linear(const std::vector<double>& sorted, double q);

}  // namespace aicrowd
