#include "aicrowd/bootstrap.hpp"

#include <algorithm>
#include <cmath>
#include <thread>

#include "aicrowd/error.hpp"
#include "aicrowd/random.hpp"

namespace aicrowd {

double percentile_linear(const std::vector<double>& sorted, double q) {
  if (sorted.empty()) {
    throw Error(ErrorCode::EmptyInput, "percentile of an empty sample");
  }
  const double h = q * static_cast<double>(sorted.size() - 1);
  const std::size_t lo = static_cast<std::size_t>(h);
  if (lo + 1 >= sorted.size()) return sorted.back();
  const double frac = h - static_cast<double>(lo);
  return sorted[lo] + frac * (sorted[lo + 1] - sorted[lo]);
}

EstimateWithCI bootstrap(
    std::size_t instance_count,
    const std::function<double(const std::vector<std::size_t>&)>& statistic,
    const BootstrapConfig& cfg, int threads) {
  if (instance_count == 0) {
    throw Error(ErrorCode::DegenerateInput, "bootstrap over zero instances");
  }
  if (cfg.n_resamples < 2) {
    throw Error(ErrorCode::ConfigError, "n_resamples must be at least 2");
  }
  if (!(cfg.level > 0.0 && cfg.level < 1.0)) {
    throw Error(ErrorCode::ConfigError, "confidence level must lie in (0, 1)");
  }

  std::vector<std::size_t> identity(instance_count);
  for (std::size_t i = 0; i < instance_count; ++i) identity[i] = i;
  const double point = statistic(identity);

  // Every replicate draws from its own child seed, so the values are the
  // same whatever the thread count or evaluation order.
  const std::size_t n_resamples = static_cast<std::size_t>(cfg.n_resamples);
  std::vector<double> values(n_resamples);
  auto run_range = [&](std::size_t begin, std::size_t end) {
    std::vector<std::size_t> indices(instance_count);
    for (std::size_t r = begin; r < end; ++r) {
      std::mt19937_64 rng(child_seed(cfg.seed, r));
      for (std::size_t i = 0; i < instance_count; ++i) {
        indices[i] = static_cast<std::size_t>(uniform_below(rng, instance_count));
      }
      values[r] = statistic(indices);
    }
  };

  const std::size_t workers =
      std::min<std::size_t>(std::max(threads, 1), n_resamples);
  if (workers <= 1) {
    run_range(0, n_resamples);
  } else {
    std::vector<std::thread> pool;
    pool.reserve(workers);
    const std::size_t chunk = (n_resamples + workers - 1) / workers;
    for (std::size_t w = 0; w < workers; ++w) {
      const std::size_t begin = w * chunk;
      const std::size_t end = std::min(begin + chunk, n_resamples);
      if (begin >= end) break;
      pool.emplace_back(run_range, begin, end);
    }
    for (std::thread& t : pool) t.join();
  }

  std::vector<double> sorted = values;
  std::sort(sorted.begin(), sorted.end());
  const double tail = (1.0 - cfg.level) / 2.0;

  EstimateWithCI est;
  est.point = point;
  est.lower = percentile_linear(sorted, tail);
  est.upper = percentile_linear(sorted, 1.0 - tail);
  est.n_resamples = cfg.n_resamples;
  est.level = cfg.level;

  const bool all_equal = sorted.front() == sorted.back();
  if (all_equal) {
    est.se = 0.0;  // exact, not subject to FP accumulation noise
  } else {
    double mean = 0.0;
    for (double v : values) mean += v;
    mean /= static_cast<double>(n_resamples);
    double ss = 0.0;
    for (double v : values) {
      const double d = v - mean;
      ss += d * d;
    }
    est.se = std::sqrt(ss / static_cast<double>(n_resamples - 1));
  }
  return est;
}

}  // namespace aicrowd
