#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <functional>
#include <mutex>
#include <span>
#include <string>
#include <thread>
#include <vector>

#include <json.hpp>

namespace crossfbm {

struct ConfidenceInterval {
  double level = 0.95;
  double low = 0.0;
  double high = 0.0;

  bool contains(double x) const noexcept { return low <= x && x <= high; }
};

struct MonteCarloSummary {
  std::string estimand;
  double estimate = 0.0;
  double std_error = 0.0;
  double sample_std = 0.0;
  ConfidenceInterval ci;
  std::size_t paths = 0;
  std::uint64_t seed = 0;
  nlohmann::json config;
  nlohmann::json diagnostics;
  double wall_seconds = 0.0;
};

nlohmann::json to_json(const MonteCarloSummary& s);

/// Pairwise (cascade) summation; the result depends only on the order of xs.
double pairwise_sum(std::span<const double> xs);

/// Mean, sample std, std error sample_std / sqrt(M) and a normal CI.
MonteCarloSummary summarize(std::string estimand, std::span<const double> samples, double ci_level = 0.95);

/// Two-sided standard normal quantile for a confidence level.
double ci_z(double level);

/// Worker settings. threads = 0 uses the hardware concurrency; strict_sequential
/// forces one worker. Results are stored by index, so aggregation never
/// depends on scheduling.
struct ParallelOptions {
  unsigned threads = 0;
  bool strict_sequential = false;

  unsigned resolved_threads() const noexcept {
    if (strict_sequential) return 1;
    const unsigned hw = std::max(1u, std::thread::hardware_concurrency());
    return threads == 0 ? hw : threads;
  }
};

/// Evaluates fn(i) for i in [0, count) on a worker pool, results in index order.
template <class R, class Fn>
std::vector<R> parallel_map(std::size_t count, const ParallelOptions& opts, Fn&& fn) {
  std::vector<R> out(count);
  const unsigned workers = static_cast<unsigned>(std::min<std::size_t>(opts.resolved_threads(), count));
  if (workers <= 1) {
    for (std::size_t i = 0; i < count; ++i) out[i] = fn(i);
    return out;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  {
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (unsigned w = 0; w < workers; ++w) {
      pool.emplace_back([&] {
        for (std::size_t i = next++; i < count; i = next++) {
          try {
            out[i] = fn(i);
          } catch (...) {
            std::lock_guard lock(error_mutex);
            if (!error) error = std::current_exception();
            next = count;
          }
        }
      });
    }
  }
  if (error) std::rethrow_exception(error);
  return out;
}

}  // namespace crossfbm
