#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <cstdint>
#include <exception>
#include <map>
#include <mutex>
#include <span>
#include <string>
#include <thread>
#include <vector>

namespace canlab::mc {

/// A point estimate with its standard error. n_effective is the sample count
/// corrected for autocorrelation (never above the raw count n).
struct Summary {
  double mean = 0.0;
  double std_error = 0.0;
  double n_effective = 0.0;
  std::size_t n = 0;
};

/// Mean and standard error of independent values.
Summary mean_stderr(std::span<const double> values);

/// Weighted mean of a correlated sequence with a batch-means standard error.
/// Consecutive samples are grouped into at most `max_batches` batches of at
/// least `min_batch` samples; with fewer than two full batches the error is
/// reported as infinite. Empty `weights` means equal weights.
Summary batch_means(std::span<const double> values, std::span<const double> weights,
                    std::size_t min_batch = 50, std::size_t max_batches = 64);

/// Least-squares slope of y against x.
double ls_slope(std::span<const double> x, std::span<const double> y);

/// Runs fn(i) for i in [0, count) on up to `jobs` threads (0 = hardware
/// concurrency). Each index is processed exactly once; results must be
/// written to per-index slots so the outcome does not depend on scheduling.
/// The first exception thrown by a worker is rethrown.
template <class F>
void parallel_for(unsigned jobs, std::size_t count, F&& fn) {
  if (jobs == 0) jobs = std::max(1u, std::thread::hardware_concurrency());
  jobs = static_cast<unsigned>(std::min<std::size_t>(jobs, count));
  if (jobs <= 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  std::vector<std::thread> pool;
  pool.reserve(jobs);
  for (unsigned w = 0; w < jobs; ++w) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < count; i = next++) {
        try {
          fn(i);
        } catch (...) {
          std::lock_guard lock(error_mutex);
          if (!error) error = std::current_exception();
          next = count;
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

/// Estimate plus provenance, as reported by every estimator.
struct EstimatorReport {
  double estimate = 0.0;
  double std_error = 0.0;
  double n_effective = 0.0;
  std::uint64_t seed = 0;
  std::map<std::string, std::string> parameters;
};

}  // namespace canlab::mc
