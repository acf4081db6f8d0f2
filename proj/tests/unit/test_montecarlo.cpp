#include <gtest/gtest.h>

#include <bit>
#include <cmath>

#include "canlab/error.hpp"
#include "canlab/estimators.hpp"
#include "canlab/exact.hpp"
#include "canlab/simulator.hpp"
#include "generators.hpp"

using namespace canlab;
using namespace canlab::mc;

namespace {

Config delta(Parity p, std::int64_t position = 0) {
  const DoubledIndex s = DoubledIndex::at(p, position);
  return Config::from_sites(LatticeTag::line(p), std::span(&s, 1));
}

Config ring_config(std::int64_t n, Parity p, std::uint32_t mask) {
  std::string s(static_cast<std::size_t>(n), '0');
  for (std::int64_t b = 0; b < n; ++b)
    if ((mask >> b) & 1u) s[static_cast<std::size_t>(b)] = '1';
  return Config::from_bits(LatticeTag::ring(n, p), 0, s);
}

HatYSample sample(std::vector<std::int32_t> offsets, double w = 1.0) { return {std::move(offsets), w}; }

}  // namespace

TEST(Simulator, EmptyTableAdvancesToHorizon) {
  const Config x = Config::from_bits(LatticeTag::line(Parity::Integer), 0, "1101");
  Simulator sim(make_dynamics(RateTable()), x, Rng(1, 0));
  EXPECT_FALSE(sim.step(10.0));
  EXPECT_EQ(sim.time(), 10.0);
  EXPECT_EQ(sim.config(), x);
  EXPECT_TRUE(sim.trapped());
}

TEST(Simulator, VoterFromHeavisideMovesTheInterface) {
  const Config x = Config::heaviside(Parity::Integer, DoubledIndex::site(0));
  Simulator sim(make_dynamics(voter_table()), x, Rng(2, 0));
  sim.set_debug_checks(true);
  int left = 0, right = 0;
  for (int k = 0; k < 2000; ++k) {
    // Exactly two active transitions of rate 1/2: the two sites next to the step.
    EXPECT_EQ(sim.active_anchors(), 2);
    EXPECT_DOUBLE_EQ(sim.total_rate(), 1.0);
    const auto before = grad(sim.config()).support();
    ASSERT_TRUE(sim.step(1e18));
    const auto after = grad(sim.config()).support();
    ASSERT_EQ(before.size(), 1u);
    ASSERT_EQ(after.size(), 1u);
    const auto d = after[0].value() - before[0].value();
    ASSERT_TRUE(d == 2 || d == -2);
    (d > 0 ? right : left)++;
  }
  EXPECT_NEAR(static_cast<double>(right) / 2000.0, 0.5, 0.05);
}

TEST(Simulator, ParityPreservingTablesKeepParity) {
  const RateTable y = interface_table(rebellious_table(0.4));
  Simulator sim(make_dynamics(y), delta(Parity::HalfInteger), Rng(3, 0));
  sim.set_debug_checks(true);
  for (int k = 0; k < 3000; ++k) {
    ASSERT_TRUE(sim.step(1e18));
    ASSERT_EQ(sim.ones() % 2, 1);
  }
}

TEST(Simulator, TrapsNeverFire) {
  const auto dyn = make_dynamics(rebellious_table(0.3));
  Simulator zeros(dyn, Config::zeros(LatticeTag::line(Parity::Integer)), Rng(4, 0));
  EXPECT_FALSE(zeros.step(100.0));
  Simulator ones(dyn, Config::ones(LatticeTag::line(Parity::Integer)), Rng(4, 1));
  EXPECT_FALSE(ones.step(100.0));
  Simulator ring(dyn, ring_config(16, Parity::Integer, 0xFFFF), Rng(4, 2));
  EXPECT_FALSE(ring.step(100.0));
  // A non-type-symmetric table has infinitely many active sites on all-ones.
  EXPECT_THROW(Simulator(make_dynamics(interface_table(voter_table())),
                         Config::ones(LatticeTag::line(Parity::HalfInteger)), Rng(4, 3)),
               ValidationError);
}

TEST(Simulator, FiniteSupportStaysFinite) {
  Simulator sim(make_dynamics(rebellious_table(0.2)), Config::from_bits(LatticeTag::line(Parity::Integer), 0, "11"),
                Rng(5, 0));
  sim.set_debug_checks(true);
  for (int k = 0; k < 5000 && sim.step(1e18); ++k) {
    ASSERT_TRUE(sim.config().is_finite());
    ASSERT_EQ(sim.ones(), sim.config().count());
  }
}

TEST(Simulator, IsDeterministic) {
  auto run = [](std::uint64_t seed) {
    Simulator sim(make_dynamics(rebellious_table(0.5)), Config::heaviside(Parity::Integer, DoubledIndex::site(0)),
                  Rng(seed, 9));
    sim.run_until(50.0);
    return std::make_pair(sim.events(), sim.config().to_string());
  };
  EXPECT_EQ(run(17), run(17));
  EXPECT_NE(run(17), run(18));
}

TEST(Simulator, FlipDynamicsMatchRates) {
  const auto model = FlipRateModel::make(FlipModelKind::NeuhauserPacala, 0.5, 3);
  Rng rng(6, 0);
  const Config x = gen::random_finite(rng, Parity::Integer, 30);
  Simulator sim(make_dynamics(model), x, Rng(6, 1));
  double expected = 0.0;
  for (std::int64_t p = x.bits().first() - 10; p < x.bits().end() + 10; ++p)
    expected += flip_rate(model, x, DoubledIndex::site(p));
  EXPECT_NEAR(sim.total_rate(), expected, 1e-12);
  sim.set_debug_checks(true);
  for (int k = 0; k < 2000 && sim.step(1e18); ++k) {
  }
}

TEST(Simulator, TableRatesMatchFlipRatesForRebellious) {
  Rng rng(7, 0);
  for (int k = 0; k < 20; ++k) {
    const double alpha = rng.uniform();
    const Config x = gen::random_finite(rng, Parity::Integer, 30);
    Simulator a(make_dynamics(rebellious_table(alpha)), x, Rng(1, 1));
    Simulator b(make_dynamics(FlipRateModel::make(FlipModelKind::Rebellious, alpha)), x, Rng(1, 1));
    EXPECT_NEAR(a.total_rate(), b.total_rate(), 1e-12);
  }
}

TEST(HatY, VoterGivesOnlyDeltaZero) {
  HatYOptions o;
  o.horizon = 200.0;
  o.seed = 3;
  const HatYRun run = simulate_hatY(interface_table(voter_table()), o);
  EXPECT_FALSE(run.cap_abort);
  EXPECT_EQ(run.samples.size(), 200u);
  for (const auto& s : run.samples) EXPECT_TRUE(s.is_delta0());
  const TightnessReport rep = interface_tightness_report(run.samples);
  EXPECT_EQ(rep.p_delta0.mean, 1.0);
  EXPECT_EQ(rep.mean_size.mean, 1.0);
  for (std::size_t n = 1; n < rep.tail.size(); ++n) EXPECT_EQ(rep.tail[n].mean, 0.0);
}

TEST(HatY, SamplesAreNormalized) {
  HatYOptions o;
  o.burn_in = 10.0;
  o.horizon = 300.0;
  o.thin = 0.5;
  o.seed = 4;
  const HatYRun run = simulate_hatY(interface_table(rebellious_table(0.8)), o);
  ASSERT_FALSE(run.cap_abort);
  EXPECT_EQ(run.samples.size(), 600u);
  bool saw_more = false;
  for (const auto& s : run.samples) {
    ASSERT_EQ(s.offsets.front(), 0);
    ASSERT_EQ(s.offsets.size() % 2, 1u);
    ASSERT_TRUE(std::is_sorted(s.offsets.begin(), s.offsets.end()));
    saw_more |= !s.is_delta0();
  }
  EXPECT_TRUE(saw_more);
}

TEST(HatY, GrowthRegimeHitsTheCap) {
  HatYOptions o;
  o.horizon = 1e6;
  o.cap = 64;
  o.seed = 5;
  const HatYRun run = simulate_hatY(interface_table(rebellious_table(0.2)), o);
  EXPECT_TRUE(run.cap_abort);
  EXPECT_GT(run.max_span, 64);
}

TEST(HatY, ViaXMatchesInterfaceTable) {
  // The interface of X simulated from a Heaviside state has the law of Y
  // simulated from a single particle; compare P[δ0] loosely.
  HatYOptions o;
  o.burn_in = 50.0;
  o.horizon = 20000.0;
  o.seed = 6;
  const auto direct = interface_tightness_report(simulate_hatY(interface_table(rebellious_table(0.85)), o).samples);
  o.seed = 7;
  const auto via_x = interface_tightness_report(
      simulate_hatY_via_x(make_dynamics(rebellious_table(0.85)), o).samples);
  const double se = std::hypot(direct.p_delta0.std_error, via_x.p_delta0.std_error);
  EXPECT_LT(std::abs(direct.p_delta0.mean - via_x.p_delta0.mean), 4.0 * se);
}

TEST(Tightness, SyntheticSamples) {
  const std::vector<HatYSample> s{sample({0}, 0.5), sample({0, 1, 2}, 0.5)};
  const TightnessReport rep = interface_tightness_report(s);
  EXPECT_DOUBLE_EQ(rep.mean_size.mean, 2.0);
  EXPECT_DOUBLE_EQ(rep.p_delta0.mean, 0.5);
  EXPECT_DOUBLE_EQ(rep.tail[1].mean, 0.5);
  EXPECT_THROW(interface_tightness_report(std::vector<HatYSample>{}), ValidationError);
}

TEST(Harmonic, DeltaSamplesGiveCount) {
  const std::vector<HatYSample> s(10, sample({0}));
  Rng rng(8, 0);
  for (int k = 0; k < 20; ++k) {
    const Config x = gen::random_finite(rng, Parity::HalfInteger);
    EXPECT_EQ(estimate_h(s, x).estimate, static_cast<double>(x.count()));
  }
  EXPECT_EQ(estimate_h(s, Config::zeros(LatticeTag::line(Parity::HalfInteger))).estimate, 0.0);
}

TEST(Harmonic, ThreeParticleSample) {
  const std::vector<HatYSample> s{sample({0, 1, 2})};
  for (std::int64_t j : {-5, 0, 7}) EXPECT_EQ(estimate_h(s, delta(Parity::HalfInteger, j)).estimate, 3.0);
}

TEST(Harmonic, FastOverlapMatchesBruteForce) {
  Rng rng(9, 0);
  for (int k = 0; k < 300; ++k) {
    std::vector<std::int32_t> offs{0};
    const int m = static_cast<int>(rng.below(3));
    std::int32_t at = 0;
    for (int j = 0; j < 2 * m; ++j) offs.push_back(at += 1 + static_cast<std::int32_t>(rng.below(70)));
    std::vector<std::int64_t> pos;
    std::int64_t p = static_cast<std::int64_t>(rng.below(50)) - 25;
    const int count = 1 + static_cast<int>(rng.below(8));
    for (int j = 0; j < count; ++j) pos.push_back(p += 1 + static_cast<std::int64_t>(rng.below(80)));
    std::int64_t brute = 0;
    for (std::int64_t i = pos.front() - offs.back(); i <= pos.back(); ++i) {
      int parity = 0;
      for (auto o : offs)
        parity ^= std::find(pos.begin(), pos.end(), i + o) != pos.end();
      brute += parity;
    }
    ASSERT_EQ(shifted_overlap_count(offs, pos), brute);
  }
}

TEST(Harmonic, BoundsHold) {
  HatYOptions o;
  o.horizon = 2000.0;
  o.seed = 10;
  const auto run = simulate_hatY(interface_table(rebellious_table(0.7)), o);
  const HarmonicFunction h = HarmonicFunction::from_samples(run.samples);
  Rng rng(10, 1);
  for (int k = 0; k < 30; ++k) {
    const Config x = gen::random_finite(rng, Parity::HalfInteger);
    const double v = h(x);
    const auto n = static_cast<double>(x.count());
    EXPECT_GE(v, h.c() * n - 1e-9);
    EXPECT_LE(v, h.C() * n + 1e-9);
    EXPECT_NEAR(estimate_h(run.samples, x).estimate, v, 1e-9 * std::max(1.0, v));
  }
}

TEST(Martingale, VoterCountIsAMartingale) {
  const std::vector<HatYSample> s{sample({0})};
  const HarmonicFunction h = HarmonicFunction::from_samples(s);
  const RateTable xdual = diagram_closure(voter_table()).x_dual;
  const Config x0 = Config::from_bits(LatticeTag::line(Parity::HalfInteger), 0, "1011");
  const std::vector<double> times{1.0, 5.0, 20.0};
  const MartingaleResult r = martingale_test(xdual, h, x0, times, 400, 11, 2);
  EXPECT_EQ(r.h0, 3.0);
  for (const auto& p : r.points) EXPECT_LE(std::abs(p.z), 4.0);
}

TEST(Martingale, FrozenTableHasZeroScore) {
  const std::vector<HatYSample> s{sample({0}), sample({0, 2, 3})};
  const HarmonicFunction h = HarmonicFunction::from_samples(s);
  const RateTable frozen(Parity::HalfInteger, 0, {});
  const Config x0 = Config::from_bits(LatticeTag::line(Parity::HalfInteger), 0, "11");
  const std::vector<double> times{1.0, 2.0};
  for (const auto& p : martingale_test(frozen, h, x0, times, 10, 1).points) EXPECT_EQ(p.z, 0.0);
}

TEST(Clustering, InitialDensityAndZeroStart) {
  const std::vector<double> t0{0.0};
  const auto c = clustering_curve(make_dynamics(voter_table()), 256, 0.5, t0, 50, 12);
  EXPECT_NEAR(c[0].value.mean, 0.5, 4.0 * c[0].value.std_error);
  const std::vector<double> ts{0.0, 1.0, 10.0};
  for (const auto& p : clustering_curve(make_dynamics(voter_table()), 64, 0.0, ts, 5, 12))
    EXPECT_EQ(p.value.mean, 0.0);
}

TEST(CrossEngine, ClusteringMatchesExactOnSmallRing) {
  const int n = 10;
  const RateTable rt = rebellious_table(0.6);
  const exact::Generator g = exact::build_generator(exact::RingModel::from_table(rt, n));
  // Product(1/2) initial law is uniform on the 2^n states.
  exact::Distribution p0;
  p0.p.assign(std::size_t{1} << n, 1.0 / static_cast<double>(std::size_t{1} << n));
  const std::vector<double> ts{0.5, 2.0};
  const auto mc = clustering_curve(make_dynamics(rt), n, 0.5, ts, 4000, 13);
  for (std::size_t k = 0; k < ts.size(); ++k) {
    const exact::Distribution d = exact::transient(g, p0, ts[k], 1e-12);
    double e = 0.0;
    for (std::uint32_t s = 0; s < d.p.size(); ++s) {
      const std::uint32_t rot = ((s >> 1) | (s << (n - 1))) & ((1u << n) - 1);
      e += d.p[s] * std::popcount(s ^ rot) / static_cast<double>(n);
    }
    EXPECT_LT(std::abs(mc[k].value.mean - e), 3.0 * mc[k].value.std_error) << "t=" << ts[k];
  }
}

TEST(CrossEngine, SurvivalMatchesExactOnSmallRing) {
  const int n = 10;
  const RateTable rt = dual_table(voter_table());  // annihilating walks
  // An even number of walkers can annihilate completely on the ring.
  const std::uint32_t x0 = 0b0000010001;
  const exact::Generator g = exact::build_generator(exact::RingModel::from_table(rt, n));
  const double t = 3.0;
  const exact::Distribution d = exact::transient(g, exact::Distribution::point_mass(n, x0), t, 1e-12);
  const double exact_survival = 1.0 - d.p[0];
  const EstimatorReport r = survival_probability(make_dynamics(rt), ring_config(n, Parity::Integer, x0), t, 4000, 14);
  EXPECT_LT(std::abs(r.estimate - exact_survival), 3.0 * r.std_error);
}

TEST(Survival, SpecExamples) {
  const auto frozen = make_dynamics(RateTable(Parity::Integer, 0, {}));
  EXPECT_EQ(survival_probability(frozen, delta(Parity::Integer), 100.0, 10, 1).estimate, 1.0);
  // Two adjacent annihilating walkers die out.
  const auto arw = make_dynamics(interface_table(voter_table()));
  const Config pair = Config::from_bits(LatticeTag::line(Parity::HalfInteger), 0, "11");
  EXPECT_LT(survival_probability(arw, pair, 1e4, 200, 2).estimate, 0.1);
  // The rebellious dual at small alpha survives with positive probability.
  const auto reb = make_dynamics(diagram_closure(rebellious_table(0.2)).x_dual);
  EXPECT_GT(survival_probability(reb, delta(Parity::HalfInteger), 200.0, 200, 3).estimate, 0.2);
}

TEST(EstimateP, SpecExamples) {
  const std::vector<HatYSample> d0(2000, sample({0}));
  const EstimatorReport r = estimate_p(product_law(0.3), d0, 15);
  EXPECT_NEAR(r.estimate, 0.3, 4.0 * r.std_error);
  EXPECT_EQ(estimate_p(product_law(0.0), d0, 15).estimate, 0.0);
  EXPECT_EQ(estimate_p(product_law(1.0), d0, 15).estimate, 1.0);
}

TEST(Statistics, BatchMeans) {
  std::vector<double> v(1000);
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = static_cast<double>(i % 2);
  const Summary s = batch_means(v, {});
  EXPECT_DOUBLE_EQ(s.mean, 0.5);
  EXPECT_GE(s.std_error, 0.0);
  EXPECT_LE(s.n_effective, 1000.0);
  const Summary few = batch_means(std::vector<double>{1.0, 2.0}, {});
  EXPECT_TRUE(std::isinf(few.std_error));
}

TEST(Statistics, ParallelForIsDeterministic) {
  std::vector<double> a(100), b(100);
  parallel_for(1, a.size(), [&](std::size_t i) { a[i] = Rng(5, i).uniform(); });
  parallel_for(8, b.size(), [&](std::size_t i) { b[i] = Rng(5, i).uniform(); });
  EXPECT_EQ(a, b);
  EXPECT_THROW(parallel_for(4, 10, [](std::size_t i) {
                 if (i == 7) throw std::runtime_error("x");
               }),
               std::runtime_error);
}
