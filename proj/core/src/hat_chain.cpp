#include <algorithm>
#include <bit>
#include <cmath>
#include <unordered_map>

#include "canlab/error.hpp"
#include "canlab/exact.hpp"

namespace canlab::exact {

namespace {

struct ShapeRows {
  std::vector<std::pair<int, std::vector<int>>> rows;  // (row offset, column offsets)
  std::vector<int> cols;                               // distinct column offsets
  double rate;
};

struct Move {
  std::uint32_t target;
  double rate;
};

// Successors of one normalized state; positions are kept in a 64-bit word
// shifted by `offset` so translates reaching left of the origin stay in range.
class HatMoves {
 public:
  HatMoves(const RateTable& rt, int K) : K_(K) {
    for (const auto& e : rt.entries()) {
      ShapeRows s;
      s.rate = e.rate;
      for (const auto& [row, cols] : e.shape.rows()) {
        std::vector<int> cs;
        for (const auto& c : cols) {
          cs.push_back(static_cast<int>(c.position()));
          s.cols.push_back(static_cast<int>(c.position()));
        }
        s.rows.emplace_back(static_cast<int>(row.position()), std::move(cs));
      }
      std::sort(s.cols.begin(), s.cols.end());
      s.cols.erase(std::unique(s.cols.begin(), s.cols.end()), s.cols.end());
      shapes_.push_back(std::move(s));
    }
    const auto span = static_cast<int>(rt.max_span());
    offset_ = span + 1;
    if (K + 2 * offset_ + 1 > 63) throw CapacityError("K plus twice the shape span must stay below 62");
  }

  // Appends moves to `out`; returns the total rate of moves leaving [0, K].
  double successors(std::uint32_t state, std::vector<Move>& out) const {
    out.clear();
    const std::uint64_t word = static_cast<std::uint64_t>(state) << offset_;
    particles.clear();
    for (std::uint32_t m = state; m != 0; m &= m - 1) particles.push_back(std::countr_zero(m));

    double leak = 0.0;
    for (const auto& s : shapes_) {
      shifts.clear();
      for (int p : particles)
        for (int c : s.cols) shifts.push_back(p - c);
      std::sort(shifts.begin(), shifts.end());
      shifts.erase(std::unique(shifts.begin(), shifts.end()), shifts.end());
      for (int k : shifts) {
        std::uint64_t flip = 0;
        for (const auto& [r, cols] : s.rows) {
          bool v = false;
          for (int c : cols) {
            const int pos = c + k + offset_;
            if (pos >= 0 && pos < 64) v ^= (word >> pos) & 1u;
          }
          if (v) flip |= std::uint64_t{1} << (r + k + offset_);
        }
        if (flip == 0) continue;
        const std::uint64_t next = word ^ flip;
        // A parity-preserving move from an odd configuration keeps it nonempty.
        const int lo = std::countr_zero(next);
        const int hi = 63 - std::countl_zero(next);
        if (hi - lo > K_) {
          leak += s.rate;
          continue;
        }
        const auto normalized = static_cast<std::uint32_t>(next >> lo);
        if (normalized == state) continue;
        out.push_back({normalized, s.rate});
      }
    }
    return leak;
  }

 private:
  int K_;
  int offset_ = 0;
  mutable std::vector<int> particles;
  mutable std::vector<int> shifts;
  std::vector<ShapeRows> shapes_;
};

}  // namespace

double HatChainAnalysis::p_delta0() const {
  for (std::size_t k = 0; k < states.size(); ++k)
    if (states[k] == 1u) return stationary[k];
  return 0.0;
}

double HatChainAnalysis::mean_size() const {
  double m = 0.0;
  for (std::size_t k = 0; k < states.size(); ++k) m += stationary[k] * std::popcount(states[k]);
  return m;
}

std::vector<double> HatChainAnalysis::size_distribution(int m_max) const {
  std::vector<double> out(static_cast<std::size_t>(m_max + 1), 0.0);
  for (std::size_t k = 0; k < states.size(); ++k) {
    const int m = (std::popcount(states[k]) - 1) / 2;
    if (m <= m_max) out[static_cast<std::size_t>(m)] += stationary[k];
  }
  return out;
}

HatChainAnalysis truncated_hatY_analysis(const RateTable& interface_rt, int K, double tol,
                                         int max_sweeps) {
  if (!interface_rt.pp_table())
    throw ValidationError("the interface chain needs a parity-preserving table");
  if (K < 0 || K > 30) throw CapacityError("K must lie in [0, 30]");
  const HatMoves moves(interface_rt, K);

  // State index: a flat table over all (K+1)-bit masks for moderate K, a
  // hash map beyond that.
  constexpr std::uint32_t kNone = ~std::uint32_t{0};
  const bool flat = K <= 22;
  std::vector<std::uint32_t> flat_index(flat ? (std::size_t{1} << (K + 1)) : 0, kNone);
  std::unordered_map<std::uint32_t, std::uint32_t> hashed;
  auto find = [&](std::uint32_t mask) -> std::uint32_t {
    if (flat) return flat_index[mask];
    const auto it = hashed.find(mask);
    return it == hashed.end() ? kNone : it->second;
  };
  auto insert = [&](std::uint32_t mask, std::uint32_t id) {
    if (flat)
      flat_index[mask] = id;
    else
      hashed.emplace(mask, id);
  };

  // Breadth-first enumeration of the states reachable from the single
  // particle, recording outgoing moves in CSR form.
  HatChainAnalysis res;
  res.K = K;
  std::vector<std::size_t> out_offsets{0};
  std::vector<std::uint32_t> out_targets;
  std::vector<double> out_rates;
  std::vector<double> leak;
  std::vector<Move> buf;
  res.states.push_back(1u);
  insert(1u, 0u);
  for (std::size_t k = 0; k < res.states.size(); ++k) {
    const double l = moves.successors(res.states[k], buf);
    if (k == 0 && l > 0.0)
      throw CapacityError("K = " + std::to_string(K) + " is too small: the single-particle state leaks");
    leak.push_back(l);
    for (const auto& mv : buf) {
      std::uint32_t id = find(mv.target);
      if (id == kNone) {
        id = static_cast<std::uint32_t>(res.states.size());
        insert(mv.target, id);
        res.states.push_back(mv.target);
      }
      out_targets.push_back(id);
      out_rates.push_back(mv.rate);
    }
    out_offsets.push_back(out_targets.size());
  }

  // Incoming transitions in CSR form; leaked mass is sent to the
  // single-particle state (index 0).
  const std::size_t count = res.states.size();
  std::vector<double> exit(count, 0.0);
  std::vector<std::size_t> in_offsets(count + 1, 0);
  for (std::size_t s = 0; s < count; ++s) {
    for (std::size_t j = out_offsets[s]; j < out_offsets[s + 1]; ++j) ++in_offsets[out_targets[j] + 1];
    if (leak[s] > 0.0) ++in_offsets[1];
  }
  for (std::size_t s = 0; s < count; ++s) in_offsets[s + 1] += in_offsets[s];
  std::vector<std::uint32_t> in_sources(in_offsets.back());
  std::vector<double> in_rates(in_offsets.back());
  std::vector<std::size_t> fill(in_offsets.begin(), in_offsets.end() - 1);
  for (std::size_t s = 0; s < count; ++s) {
    for (std::size_t j = out_offsets[s]; j < out_offsets[s + 1]; ++j) {
      const std::size_t slot = fill[out_targets[j]]++;
      in_sources[slot] = static_cast<std::uint32_t>(s);
      in_rates[slot] = out_rates[j];
      exit[s] += out_rates[j];
    }
    if (leak[s] > 0.0) {
      const std::size_t slot = fill[0]++;
      in_sources[slot] = static_cast<std::uint32_t>(s);
      in_rates[slot] = leak[s];
      exit[s] += leak[s];
    }
  }
  out_targets = {};
  out_rates = {};

  res.stationary.assign(count, 0.0);
  if (count == 1) {
    res.stationary[0] = 1.0;
    return res;
  }
  // Gauss-Seidel sweeps on the balance equations pi(y) exit(y) = inflow(y).
  std::vector<double>& pi = res.stationary;
  std::fill(pi.begin(), pi.end(), 1.0 / static_cast<double>(count));
  for (int sweep = 1; sweep <= max_sweeps; ++sweep) {
    double change = 0.0;
    for (std::size_t y = 0; y < count; ++y) {
      if (exit[y] == 0.0) continue;
      double inflow = 0.0;
      for (std::size_t j = in_offsets[y]; j < in_offsets[y + 1]; ++j) inflow += pi[in_sources[j]] * in_rates[j];
      const double v = inflow / exit[y];
      change = std::max(change, std::abs(v - pi[y]));
      pi[y] = v;
    }
    double total = 0.0;
    for (double v : pi) total += v;
    for (double& v : pi) v /= total;
    res.sweeps = sweep;
    res.residual = change / total;
    if (res.residual < tol) break;
  }

  for (std::size_t s = 0; s < count; ++s) res.leak_flow += pi[s] * leak[s];
  return res;
}

}  // namespace canlab::exact
