#include <gtest/gtest.h>

#include <bit>
#include <cmath>

#include "canlab/error.hpp"
#include "canlab/exact.hpp"

using namespace canlab;
using namespace canlab::exact;

namespace {

LocalOp op(std::initializer_list<std::pair<std::int64_t, std::int64_t>> doubled) {
  return LocalOp::from_doubled(doubled);
}

double odd_mass(const Distribution& d) {
  double m = 0.0;
  for (std::size_t s = 0; s < d.p.size(); ++s)
    if (std::popcount(static_cast<std::uint32_t>(s)) & 1) m += d.p[s];
  return m;
}

}  // namespace

TEST(Generator, SingleEntryTable) {
  const RateTable rt(Parity::Integer, 1, {{op({{0, 0}, {0, 2}}), 1.5}});
  const Generator g = build_generator(RingModel::from_table(rt, 3));
  EXPECT_EQ(g.states(), 8u);
  EXPECT_LT(g.max_row_sum_error(), 1e-12);
  // From 001 (site 0 occupied): translates flipping a site whose right
  // neighbour differs. Sites 0 and 2 differ from their right neighbours.
  const std::uint32_t x = 0b001;
  std::vector<std::uint32_t> targets(g.targets.begin() + static_cast<long>(g.offsets[x]),
                                     g.targets.begin() + static_cast<long>(g.offsets[x + 1]));
  EXPECT_EQ(targets, (std::vector<std::uint32_t>{0b000, 0b101}));
  EXPECT_DOUBLE_EQ(g.exit_rates[x], 3.0);
}

TEST(Generator, EmptyTableIsZero) {
  const Generator g = build_generator(RingModel::from_table(RateTable(), 5));
  EXPECT_TRUE(g.targets.empty());
  for (double r : g.exit_rates) EXPECT_EQ(r, 0.0);
}

TEST(Generator, VoterExitRateCountsDisagreements) {
  const Generator g = build_generator(RingModel::from_table(voter_table(), 4));
  // 0101: every site disagrees with both neighbours, 8 indicators at 1/2.
  EXPECT_DOUBLE_EQ(g.exit_rates[0b0101], 4.0);
  EXPECT_DOUBLE_EQ(g.exit_rates[0b0011], 2.0);
  EXPECT_DOUBLE_EQ(g.exit_rates[0b0000], 0.0);
  EXPECT_THROW(build_generator(RingModel::from_table(voter_table(), 15)), CapacityError);
}

TEST(Transient, ZeroTimeAndEmptyTable) {
  const Generator g = build_generator(RingModel::from_table(rebellious_table(0.4), 6));
  const Distribution p0 = Distribution::point_mass(6, 0b010110);
  EXPECT_EQ(transient(g, p0, 0.0, 1e-12).p, p0.p);
  const Generator e = build_generator(RingModel::from_table(RateTable(), 6));
  EXPECT_EQ(transient(e, p0, 5.0, 1e-12).p, p0.p);
}

TEST(Transient, TwoStateExponential) {
  // A single site on a ring of 3 flipped by {(0,0)} at rate r: the state
  // of site 0 alone is a two-state chain that leaves 1 at rate r.
  const double r = 0.7;
  const RateTable rt(Parity::Integer, 0, {{op({{0, 0}}), r}});
  const Generator g = build_generator(RingModel::from_table(rt, 3));
  for (double t : {0.1, 1.0, 3.0}) {
    const Distribution d = transient(g, Distribution::point_mass(3, 0b001), t, 1e-12);
    EXPECT_NEAR(d.p[0b001], std::exp(-r * t), 1e-11);
    EXPECT_NEAR(d.total(), 1.0, 1e-12);
  }
}

TEST(Transient, ParityPreservingTablesKeepParity) {
  const RateTable y = interface_table(rebellious_table(0.6));
  const Generator g = build_generator(RingModel::from_table(y, 10));
  const Distribution d = transient(g, Distribution::point_mass(10, 0b0000100101), 2.0, 1e-12);
  EXPECT_NEAR(odd_mass(d), 1.0, 1e-12);
}

TEST(Transient, TypeSymmetryCommutesWithComplement) {
  const int n = 9;
  const Generator g = build_generator(RingModel::from_table(rebellious_table(0.35), n));
  const std::uint32_t x = 0b010011010, mask = (1u << n) - 1;
  const Distribution a = transient(g, Distribution::point_mass(n, x), 1.5, 1e-12);
  const Distribution b = transient(g, Distribution::point_mass(n, x ^ mask), 1.5, 1e-12);
  for (std::uint32_t s = 0; s <= mask; ++s) EXPECT_NEAR(a.p[s], b.p[s ^ mask], 1e-12);
}

TEST(Duality, ZeroTimeIsExact) {
  EXPECT_EQ(check_duality(rebellious_table(0.3), 10, 0.0, 20, 1e-10, 1).max_deviation, 0.0);
  EXPECT_EQ(check_H_duality(rebellious_table(0.3), 10, 0.0, 20, 1e-10, 1).max_deviation, 0.0);
}

TEST(Duality, VoterAndRebellious) {
  EXPECT_LE(check_duality(voter_table(), 8, 1.0, 30, 1e-10, 2).max_deviation, 1e-8);
  EXPECT_LE(check_H_duality(voter_table(), 8, 1.0, 30, 1e-10, 2).max_deviation, 1e-8);
  EXPECT_LE(check_duality(rebellious_table(0.7), 10, 1.0, 10, 1e-10, 2).max_deviation, 1e-8);
  EXPECT_LE(check_H_duality(rebellious_table(0.7), 10, 1.0, 10, 1e-10, 2).max_deviation, 1e-8);
}

TEST(Duality, RejectsSmallRings) {
  EXPECT_THROW(check_duality(rebellious_table(0.5), 9, 1.0, 1, 1e-10, 1), ValidationError);
}

TEST(Duality, DetectsAWrongPartner) {
  // The exact machinery must see a difference when the identity is false:
  // pair the rebellious model with itself instead of its dual.
  const RateTable x = rebellious_table(0.2);
  const Generator gx = build_generator(RingModel::from_table(x, 10));
  const std::uint32_t a = 0b0000011101, b = 0b0110000001;
  auto parity_expect = [&](std::uint32_t start, std::uint32_t other) {
    const Distribution d = transient(gx, Distribution::point_mass(10, start), 1.0, 1e-12);
    double e = 0.0;
    for (std::size_t s = 0; s < d.p.size(); ++s)
      if (std::popcount(static_cast<std::uint32_t>(s) & other) & 1) e += d.p[s];
    return e;
  };
  EXPECT_GT(std::abs(parity_expect(a, b) - parity_expect(b, a)), 1e-4);
}

TEST(RingH, MatchesLineDefinition) {
  const int n = 7;
  for (std::uint32_t x = 0; x < (1u << n); x += 3) {
    for (std::uint32_t y = 0; y < (1u << n); y += 5) {
      // Line evaluation on the ring literals.
      std::string xs(n, '0'), ys(n, '0');
      for (int b = 0; b < n; ++b) {
        xs[static_cast<std::size_t>(b)] = (x >> b) & 1u ? '1' : '0';
        ys[static_cast<std::size_t>(b)] = (y >> b) & 1u ? '1' : '0';
      }
      const Config cx = Config::from_bits(LatticeTag::ring(n, Parity::Integer), 0, xs);
      const Config cy = Config::from_bits(LatticeTag::ring(n, Parity::HalfInteger), 0, ys);
      EXPECT_EQ(ring_H(x, y, n), parity_norm(pointwise_product(grad(cx), cy)));
    }
  }
}

TEST(HatChain, VoterIsDeltaZero) {
  const HatChainAnalysis a = truncated_hatY_analysis(interface_table(voter_table()), 4);
  ASSERT_EQ(a.states.size(), 1u);
  EXPECT_EQ(a.p_delta0(), 1.0);
  EXPECT_EQ(a.leak_flow, 0.0);
  EXPECT_EQ(a.mean_size(), 1.0);
}

TEST(HatChain, EmptyTableIsAbsorbing) {
  const RateTable empty(Parity::HalfInteger, 0, {});
  const HatChainAnalysis a = truncated_hatY_analysis(empty, 3);
  ASSERT_EQ(a.states.size(), 1u);
  EXPECT_EQ(a.p_delta0(), 1.0);
}

TEST(HatChain, RebelliousSmallWindow) {
  const RateTable y = interface_table(rebellious_table(0.9));
  const HatChainAnalysis a = truncated_hatY_analysis(y, 10);
  EXPECT_GT(a.p_delta0(), 0.0);
  EXPECT_LT(a.p_delta0(), 1.0);
  double total = 0.0;
  for (double p : a.stationary) total += p;
  EXPECT_NEAR(total, 1.0, 1e-12);
  for (auto s : a.states) {
    EXPECT_EQ(s & 1u, 1u);
    EXPECT_EQ(std::popcount(s) % 2, 1);
    EXPECT_LT(s, 1u << 11);
  }
  const auto dist = a.size_distribution(5);
  EXPECT_NEAR(dist[0], a.p_delta0(), 1e-15);
  EXPECT_GT(a.leak_flow, 0.0);
  // Larger windows leak less.
  EXPECT_LT(truncated_hatY_analysis(y, 14).leak_flow, a.leak_flow);
  EXPECT_LT(a.residual, 1e-13);
}

TEST(HatChain, Errors) {
  EXPECT_THROW(truncated_hatY_analysis(rebellious_table(0.5), 10), ValidationError);
  EXPECT_THROW(truncated_hatY_analysis(interface_table(rebellious_table(0.5)), 1), CapacityError);
}
