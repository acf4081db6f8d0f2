#include <algorithm>
#include <bit>
#include <cmath>

#include "canlab/error.hpp"
#include "canlab/exact.hpp"
#include "canlab/rng.hpp"

namespace canlab::exact {

namespace {

bool odd(std::uint32_t v) { return (std::popcount(v) & 1) != 0; }

std::uint32_t ring_mask(int n) { return n == 32 ? ~0u : ((1u << n) - 1u); }

// Bit b of the result is bit (b + 1) mod n of x.
std::uint32_t rotate_down(std::uint32_t x, int n) {
  return ((x >> 1) | (x << (n - 1))) & ring_mask(n);
}

// Bit b of the result is bit (b - 1) mod n of x.
std::uint32_t rotate_up(std::uint32_t x, int n) {
  return ((x << 1) | (x >> (n - 1))) & ring_mask(n);
}

// R is the range actually used by the shapes, not the declared bound.
void require_ring_size(const RateTable& rt, int n) {
  std::int64_t range = 0;
  for (const auto& e : rt.entries()) range = std::max(range, e.shape.range());
  if (n < 4 * range + 2)
    throw ValidationError("duality checks need n >= 4R + 2 (n = " + std::to_string(n) +
                          ", R = " + std::to_string(range) + ")");
}

// E[f(Z_t)] for Z started at `start`.
template <class F>
double expectation(const Generator& gen, std::uint32_t start, double t, double eps, F&& f) {
  const Distribution law = transient(gen, Distribution::point_mass(gen.n, start), t, eps);
  double e = 0.0;
  for (std::size_t z = 0; z < law.p.size(); ++z)
    if (law.p[z] != 0.0 && f(static_cast<std::uint32_t>(z))) e += law.p[z];
  return e;
}

}  // namespace

bool ring_H(std::uint32_t x, std::uint32_t x_dual, int n) {
  // grad x on half-integer slot b is x[b] xor x[b+1]; grad x' on integer
  // slot b is x'[b-1] xor x'[b].
  const bool lhs = odd((x ^ rotate_down(x, n)) & x_dual);
  const bool rhs = odd(x & (x_dual ^ rotate_up(x_dual, n)));
  if (lhs != rhs) throw std::logic_error("ring H expressions disagree");
  return lhs;
}

DualityReport check_duality(const RateTable& rt, int n, double t, int trials, double eps,
                            std::uint64_t seed) {
  require_ring_size(rt, n);
  const Generator gx = build_generator(RingModel::from_table(rt, n));
  const Generator gy = build_generator(RingModel::from_table(dual_table(rt), n));
  Rng rng(seed, 0x6475616cu);
  DualityReport rep{"dual", n, t, eps, trials, 0.0};
  const std::uint64_t states = std::uint64_t{1} << n;
  for (int k = 0; k < trials; ++k) {
    const auto x = static_cast<std::uint32_t>(rng.below(states));
    const auto y = static_cast<std::uint32_t>(rng.below(states));
    const double lhs = expectation(gy, y, t, eps, [x](std::uint32_t z) { return odd(x & z); });
    const double rhs = expectation(gx, x, t, eps, [y](std::uint32_t z) { return odd(z & y); });
    rep.max_deviation = std::max(rep.max_deviation, std::abs(lhs - rhs));
  }
  return rep;
}

DualityReport check_H_duality(const RateTable& rt, int n, double t, int trials, double eps,
                              std::uint64_t seed) {
  require_ring_size(rt, n);
  const RateTable partner = dual_table(interface_table(rt));
  require_ring_size(partner, n);
  const Generator gx = build_generator(RingModel::from_table(rt, n));
  const Generator gd = build_generator(RingModel::from_table(partner, n));
  const bool x_on_integers = rt.lattice() == Parity::Integer;
  auto H = [&](std::uint32_t x, std::uint32_t xd) {
    return x_on_integers ? ring_H(x, xd, n) : ring_H(xd, x, n);
  };
  Rng rng(seed, 0x48647561u);
  DualityReport rep{"H", n, t, eps, trials, 0.0};
  const std::uint64_t states = std::uint64_t{1} << n;
  for (int k = 0; k < trials; ++k) {
    const auto x = static_cast<std::uint32_t>(rng.below(states));
    const auto xd = static_cast<std::uint32_t>(rng.below(states));
    const double lhs = expectation(gx, x, t, eps, [&](std::uint32_t z) { return H(z, xd); });
    const double rhs = expectation(gd, xd, t, eps, [&](std::uint32_t w) { return H(x, w); });
    rep.max_deviation = std::max(rep.max_deviation, std::abs(lhs - rhs));
  }
  return rep;
}

}  // namespace canlab::exact
