#include <gtest/gtest.h>

#include "canlab/error.hpp"
#include "canlab/local_op.hpp"
#include "generators.hpp"

using namespace canlab;

namespace {

const LatticeTag kZ = LatticeTag::line(Parity::Integer);
const LatticeTag kH = LatticeTag::line(Parity::HalfInteger);

LocalOp op(std::initializer_list<std::pair<std::int64_t, std::int64_t>> doubled) {
  return LocalOp::from_doubled(doubled);
}
Config sites(LatticeTag lattice, std::vector<std::int64_t> doubled) {
  std::vector<DoubledIndex> s;
  for (auto v : doubled) s.emplace_back(v);
  return Config::from_sites(lattice, s);
}

// Shapes in doubled coordinates.
const LocalOp kLeftVoter = op({{0, -2}, {0, 0}});
const LocalOp kDisagreement = op({{0, -2}, {0, 2}});
const LocalOp kHop = op({{-1, -1}, {1, -1}});
const LocalOp kExclusion = op({{-1, -1}, {-1, 1}, {1, -1}, {1, 1}});

}  // namespace

TEST(Apply, SpecExamples) {
  EXPECT_EQ(apply(kLeftVoter, sites(kZ, {-2})), sites(kZ, {0}));
  EXPECT_EQ(apply(kLeftVoter, sites(kZ, {-2, 0})), Config::zeros(kZ));
  EXPECT_EQ(apply(LocalOp(), sites(kZ, {0, 2, 6})), Config::zeros(kZ));
  EXPECT_THROW(apply(kLeftVoter, Config::zeros(kH)), LatticeMismatch);
}

TEST(Apply, IsLinear) {
  Rng rng(10, 0);
  for (int k = 0; k < 300; ++k) {
    const Parity p = gen::random_parity(rng);
    const LocalOp a = gen::random_ts_op(rng, p);
    const Config x = gen::random_config(rng, p), y = gen::random_config(rng, p);
    EXPECT_EQ(apply(a, x ^ y), apply(a, x) ^ apply(a, y));
  }
}

TEST(Adjoint, SpecExamples) {
  EXPECT_EQ(adjoint(kLeftVoter), op({{-2, 0}, {0, 0}}));
  EXPECT_EQ(adjoint(LocalOp()), LocalOp());
  EXPECT_EQ(adjoint(op({{1, -1}})), op({{-1, 1}}));
}

TEST(Adjoint, BilinearIdentity) {
  Rng rng(11, 0);
  for (int k = 0; k < 500; ++k) {
    const Parity p = gen::random_parity(rng);
    const LocalOp a = rng.bernoulli(0.5) ? gen::random_ts_op(rng, p) : gen::random_pp_op(rng, p);
    EXPECT_EQ(adjoint(adjoint(a)), a);
    const Config x = gen::random_config(rng, p), y = gen::random_finite(rng, p);
    EXPECT_EQ(parity_norm(pointwise_product(x, apply(a, y))), parity_norm(pointwise_product(apply(adjoint(a), x), y)));
  }
}

TEST(Translate, SpecExamples) {
  EXPECT_EQ(translate(op({{0, 0}, {0, 2}}), 2), op({{4, 4}, {4, 6}}));
  EXPECT_EQ(translate(kExclusion, 0), kExclusion);
  EXPECT_EQ(translate(translate(kExclusion, 7), -7), kExclusion);
  EXPECT_EQ(anchored(translate(kHop, -3)), anchored(kHop));
}

TEST(Predicates, SpecExamples) {
  EXPECT_TRUE(is_type_symmetric(kLeftVoter));
  EXPECT_FALSE(is_parity_preserving(kLeftVoter));
  EXPECT_FALSE(is_type_symmetric(kHop));
  EXPECT_TRUE(is_parity_preserving(kHop));
  EXPECT_TRUE(is_type_symmetric(kExclusion));
  EXPECT_TRUE(is_parity_preserving(kExclusion));
}

TEST(Psi, SpecExamples) {
  EXPECT_EQ(psi(kLeftVoter), kHop);
  EXPECT_EQ(psi(kDisagreement), kExclusion);
  EXPECT_EQ(psi(LocalOp()), LocalOp(Parity::HalfInteger, Parity::HalfInteger));
  EXPECT_THROW(psi(kHop), ValidationError);
}

TEST(PsiInv, SpecExamples) {
  EXPECT_EQ(psi_inv(kHop), kLeftVoter);
  EXPECT_EQ(psi_inv(LocalOp()), LocalOp(Parity::HalfInteger, Parity::HalfInteger));
  EXPECT_EQ(psi_inv(kExclusion), kDisagreement);
  EXPECT_THROW(psi_inv(kLeftVoter), ValidationError);
}

TEST(Psi, ConjugatesGrad) {
  Rng rng(12, 0);
  for (int k = 0; k < 200; ++k) {
    const Parity p = gen::random_parity(rng);
    const LocalOp a = gen::random_ts_op(rng, p);
    const LocalOp b = psi(a);
    EXPECT_TRUE(is_parity_preserving(b));
    for (int j = 0; j < 20; ++j) {
      const Config x = gen::random_config(rng, p);
      EXPECT_EQ(grad(apply(a, x)), apply(b, grad(x)));
    }
  }
}

TEST(Psi, IsABijectionAndExchangesAdjoints) {
  Rng rng(13, 0);
  for (int k = 0; k < 500; ++k) {
    const Parity p = gen::random_parity(rng);
    const LocalOp a = gen::random_ts_op(rng, p);
    EXPECT_EQ(psi_inv(psi(a)), a);
    EXPECT_EQ(adjoint(psi(a)), psi_inv(adjoint(a)));
    const LocalOp b = gen::random_pp_op(rng, p);
    EXPECT_TRUE(is_type_symmetric(psi_inv(b)));
    EXPECT_EQ(psi(psi_inv(b)), b);
  }
}

TEST(Psi, DisagreementChainCloses) {
  // Disagreement -> exclusion (ts and pp) -> psi again: the adjoint of the
  // disagreement shape, i.e. double branching, up to translation.
  const LocalOp ex = psi(kDisagreement);
  ASSERT_TRUE(is_type_symmetric(ex));
  ASSERT_TRUE(is_parity_preserving(ex));
  EXPECT_EQ(anchored(psi(ex)), anchored(adjoint(kDisagreement)));
  EXPECT_EQ(anchored(psi_inv(adjoint(ex))), anchored(adjoint(psi(ex))));
}

TEST(Psi, RingConjugation) {
  Rng rng(14, 0);
  for (int k = 0; k < 100; ++k) {
    const LocalOp a = gen::random_ts_op(rng, Parity::Integer, 3, 8);
    const std::int64_t n = 2 * a.span() + 1 + static_cast<std::int64_t>(rng.below(6));
    std::string bits(static_cast<std::size_t>(n), '0');
    for (auto& b : bits) b = rng.bernoulli(0.5) ? '1' : '0';
    const Config x = Config::from_bits(LatticeTag::ring(n, Parity::Integer), 0, bits);
    const LocalOp b = psi(a);
    if (2 * b.span() >= n) continue;
    EXPECT_EQ(grad(apply(a, x)), apply(b, grad(x)));
  }
}

TEST(DualityH, SpecExamples) {
  EXPECT_TRUE(duality_H(sites(kZ, {0}), sites(kH, {1})));
  EXPECT_TRUE(duality_H(Config::heaviside(Parity::Integer, DoubledIndex::site(0)), sites(kH, {-1})));
  EXPECT_FALSE(duality_H(Config::ones(kZ), Config::zeros(kH)));
  EXPECT_FALSE(duality_H(sites(kZ, {0, 4}), Config::zeros(kH)));
  EXPECT_THROW(duality_H(sites(kZ, {0}), sites(kZ, {0})), LatticeMismatch);
}

TEST(DualityH, FormulasAgree) {
  Rng rng(15, 0);
  int checked = 0;
  for (int k = 0; k < 1000; ++k) {
    const Config x = gen::random_config(rng, Parity::Integer);
    const Config y = gen::random_config(rng, Parity::HalfInteger);
    if (!pairing_admissible(x, y)) continue;
    EXPECT_NO_THROW(duality_H(x, y));
    ++checked;
  }
  EXPECT_GT(checked, 100);
}
