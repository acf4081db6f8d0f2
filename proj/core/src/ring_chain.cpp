#include <algorithm>
#include <bit>
#include <cmath>
#include <map>

#include "canlab/error.hpp"
#include "canlab/exact.hpp"

namespace canlab::exact {

std::uint32_t RingTransition::image(std::uint32_t x) const noexcept {
  std::uint32_t out = 0;
  for (const auto& [row, cols] : rows)
    if (std::popcount(x & cols) & 1) out |= row;
  return out;
}

RingModel RingModel::from_table(const RateTable& rt, int n) {
  if (n <= 0 || n > 31) throw CapacityError("ring size must lie in [1, 31]");
  if (n <= 2 * rt.max_span())
    throw ValidationError("ring of " + std::to_string(n) + " sites is too small for shapes of span " +
                          std::to_string(rt.max_span()));
  RingModel model;
  model.n = n;
  model.parity = rt.lattice();
  for (const auto& e : rt.entries()) {
    for (int k = 0; k < n; ++k) {
      std::map<std::uint32_t, std::uint32_t> rows;
      for (const auto& entry : e.shape.entries()) {
        const auto r = static_cast<int>(floor_mod(entry.row.position() + k, n));
        const auto c = static_cast<int>(floor_mod(entry.col.position() + k, n));
        rows[std::uint32_t{1} << r] ^= std::uint32_t{1} << c;
      }
      RingTransition tr;
      tr.rate = e.rate;
      for (const auto& [row, cols] : rows)
        if (cols != 0) tr.rows.emplace_back(row, cols);
      model.transitions.push_back(std::move(tr));
    }
  }
  return model;
}

double Generator::max_row_sum_error() const {
  double worst = 0.0;
  for (std::size_t s = 0; s < states(); ++s) {
    double sum = -exit_rates[s];
    for (std::size_t k = offsets[s]; k < offsets[s + 1]; ++k) sum += rates[k];
    worst = std::max(worst, std::abs(sum));
  }
  return worst;
}

Generator build_generator(const RingModel& model) {
  if (model.n > kMaxRingSites)
    throw CapacityError("exact generator limited to " + std::to_string(kMaxRingSites) + " sites");
  const std::size_t states = std::size_t{1} << model.n;
  Generator gen;
  gen.n = model.n;
  gen.offsets.reserve(states + 1);
  gen.exit_rates.assign(states, 0.0);
  gen.offsets.push_back(0);
  std::vector<std::pair<std::uint32_t, double>> row;
  for (std::size_t s = 0; s < states; ++s) {
    const auto x = static_cast<std::uint32_t>(s);
    row.clear();
    for (const auto& tr : model.transitions) {
      const std::uint32_t ax = tr.image(x);
      if (ax != 0) row.emplace_back(x ^ ax, tr.rate);
    }
    std::sort(row.begin(), row.end());
    double exit = 0.0;
    for (std::size_t k = 0; k < row.size();) {
      const std::uint32_t target = row[k].first;
      double rate = 0.0;
      for (; k < row.size() && row[k].first == target; ++k) rate += row[k].second;
      gen.targets.push_back(target);
      gen.rates.push_back(rate);
      exit += rate;
    }
    gen.exit_rates[s] = exit;
    gen.offsets.push_back(gen.targets.size());
  }
  return gen;
}

Distribution Distribution::point_mass(int n, std::uint32_t state) {
  Distribution d;
  d.p.assign(std::size_t{1} << n, 0.0);
  d.p[state] = 1.0;
  return d;
}

double Distribution::total() const noexcept {
  double s = 0.0;
  for (double v : p) s += v;
  return s;
}

Distribution transient(const Generator& gen, const Distribution& p0, double t, double eps) {
  if (t < 0.0) throw ValidationError("time must be non-negative");
  if (!(eps > 0.0)) throw ValidationError("eps must be positive");
  if (p0.p.size() != gen.states()) throw ValidationError("distribution size does not match generator");
  const double uniform_rate = *std::max_element(gen.exit_rates.begin(), gen.exit_rates.end());
  if (t == 0.0 || uniform_rate == 0.0) return p0;

  const double lambda = uniform_rate * t;
  const std::size_t states = gen.states();
  std::vector<double> cur = p0.p;
  std::vector<double> next(states);
  std::vector<double> acc(states, 0.0);

  double mass = 0.0;
  for (std::size_t k = 0;; ++k) {
    const double log_w = -lambda + static_cast<double>(k) * std::log(lambda) -
                         std::lgamma(static_cast<double>(k) + 1.0);
    const double w = std::exp(log_w);
    for (std::size_t s = 0; s < states; ++s) acc[s] += w * cur[s];
    mass += w;
    if (1.0 - mass < eps && static_cast<double>(k) >= lambda) break;
    // Guards against eps below the rounding floor of `mass`.
    if (static_cast<double>(k) > lambda + 40.0 * std::sqrt(lambda) + 200.0) break;
    // One step of the uniformized kernel P = I + Q / uniform_rate.
    for (std::size_t s = 0; s < states; ++s) next[s] = cur[s] * (1.0 - gen.exit_rates[s] / uniform_rate);
    for (std::size_t s = 0; s < states; ++s) {
      const double ps = cur[s];
      if (ps == 0.0) continue;
      for (std::size_t j = gen.offsets[s]; j < gen.offsets[s + 1]; ++j)
        next[gen.targets[j]] += ps * gen.rates[j] / uniform_rate;
    }
    cur.swap(next);
  }
  Distribution out;
  out.p = std::move(acc);
  const double total = out.total();
  for (double& v : out.p) v /= total;
  return out;
}

}  // namespace canlab::exact
