#include "canlab/statistics.hpp"

#include <cmath>
#include <limits>

#include "canlab/error.hpp"

namespace canlab::mc {

Summary mean_stderr(std::span<const double> values) {
  Summary s;
  s.n = values.size();
  if (values.empty()) return s;
  double sum = 0.0;
  for (double v : values) sum += v;
  s.mean = sum / static_cast<double>(s.n);
  s.n_effective = static_cast<double>(s.n);
  if (s.n < 2) {
    s.std_error = std::numeric_limits<double>::infinity();
    return s;
  }
  double ss = 0.0;
  for (double v : values) ss += (v - s.mean) * (v - s.mean);
  s.std_error = std::sqrt(ss / static_cast<double>(s.n - 1) / static_cast<double>(s.n));
  return s;
}

Summary batch_means(std::span<const double> values, std::span<const double> weights,
                    std::size_t min_batch, std::size_t max_batches) {
  if (!weights.empty() && weights.size() != values.size())
    throw ValidationError("weights and values differ in length");
  Summary s;
  s.n = values.size();
  if (values.empty()) return s;
  auto w = [&](std::size_t i) { return weights.empty() ? 1.0 : weights[i]; };

  double wsum = 0.0, sum = 0.0;
  for (std::size_t i = 0; i < s.n; ++i) {
    wsum += w(i);
    sum += w(i) * values[i];
  }
  if (!(wsum > 0.0)) throw ValidationError("total weight must be positive");
  s.mean = sum / wsum;

  min_batch = std::max<std::size_t>(min_batch, 1);
  std::size_t batches = std::min(max_batches, s.n / min_batch);
  if (batches < 2) {
    s.std_error = std::numeric_limits<double>::infinity();
    s.n_effective = 1.0;
    return s;
  }
  const std::size_t len = s.n / batches;
  // Batch means, with the leftover samples folded into the last batch.
  std::vector<double> bm(batches), bw(batches);
  for (std::size_t b = 0; b < batches; ++b) {
    const std::size_t lo = b * len;
    const std::size_t hi = b + 1 == batches ? s.n : lo + len;
    double bs = 0.0, bws = 0.0;
    for (std::size_t i = lo; i < hi; ++i) {
      bs += w(i) * values[i];
      bws += w(i);
    }
    bw[b] = bws;
    bm[b] = bws > 0.0 ? bs / bws : s.mean;
  }
  double var = 0.0, wb = 0.0, wb2 = 0.0;
  for (std::size_t b = 0; b < batches; ++b) {
    var += bw[b] * (bm[b] - s.mean) * (bm[b] - s.mean);
    wb += bw[b];
    wb2 += bw[b] * bw[b];
  }
  // Weighted variance of batch means over the effective batch count.
  const double nb = wb * wb / wb2;
  const double batch_var = var / wb * nb / (nb - 1.0);
  s.std_error = std::sqrt(batch_var / nb);

  double raw = 0.0;
  for (std::size_t i = 0; i < s.n; ++i) raw += w(i) * (values[i] - s.mean) * (values[i] - s.mean);
  raw /= wsum;
  const double ratio = s.std_error > 0.0 ? raw / (s.std_error * s.std_error) : static_cast<double>(s.n);
  s.n_effective = std::clamp(ratio, 1.0, static_cast<double>(s.n));
  return s;
}

double ls_slope(std::span<const double> x, std::span<const double> y) {
  const std::size_t n = std::min(x.size(), y.size());
  if (n < 2) return std::numeric_limits<double>::quiet_NaN();
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= static_cast<double>(n);
  my /= static_cast<double>(n);
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
  }
  return sxx > 0.0 ? sxy / sxx : std::numeric_limits<double>::quiet_NaN();
}

}  // namespace canlab::mc
