#include <gtest/gtest.h>

#include <vector>

#include "canlab/error.hpp"
#include "canlab/gf2.hpp"
#include "generators.hpp"

using namespace canlab;

namespace {

const LatticeTag kZ = LatticeTag::line(Parity::Integer);
const LatticeTag kH = LatticeTag::line(Parity::HalfInteger);

Config sites(LatticeTag lattice, std::vector<DoubledIndex> s) { return Config::from_sites(lattice, s); }
DoubledIndex z(std::int64_t i) { return DoubledIndex::site(i); }
// Site i + 1/2.
DoubledIndex h(std::int64_t i) { return DoubledIndex::half_site(i); }

}  // namespace

TEST(DoubledIndex, RationalRoundTrip) {
  for (std::int64_t v = -41; v <= 41; ++v) {
    const DoubledIndex d(v);
    const auto [num, den] = d.to_rational();
    EXPECT_EQ(DoubledIndex::from_rational(num, den), d);
    EXPECT_EQ(d.parity() == Parity::HalfInteger, (v % 2) != 0);
  }
  EXPECT_EQ(DoubledIndex::from_rational(-1, 2).value(), -1);
  EXPECT_EQ(DoubledIndex::from_rational(3, 1).value(), 6);
  EXPECT_EQ(h(-1).to_string(), "-1/2");
  EXPECT_THROW(DoubledIndex::from_rational(1, 3), ValidationError);
}

TEST(BitLine, GrowsAndTrims) {
  BitLine b(0, 4, false, true);
  b.set(-100, true);
  b.set(200, false);
  EXPECT_TRUE(b.get(-100));
  EXPECT_FALSE(b.get(200));
  EXPECT_TRUE(b.get(10'000));
  EXPECT_FALSE(b.get(-10'000));
  b.trim(2);
  EXPECT_TRUE(b.get(-100));
  EXPECT_FALSE(b.get(200));
  EXPECT_TRUE(b.get(201));
  EXPECT_LE(b.first(), -102);
}

TEST(ParityNorm, SpecExamples) {
  EXPECT_FALSE(parity_norm(Config::zeros(kZ)));
  EXPECT_TRUE(parity_norm(sites(kZ, {z(0), z(1), z(3)})));
  EXPECT_TRUE(parity_norm(sites(kZ, {z(0)})));
  EXPECT_THROW(parity_norm(Config::heaviside(Parity::Integer, z(0))), BoundaryClassError);
}

TEST(ParityNorm, IsLinear) {
  Rng rng(1, 0);
  for (int k = 0; k < 500; ++k) {
    const Parity p = gen::random_parity(rng);
    const Config x = gen::random_finite(rng, p), y = gen::random_finite(rng, p);
    EXPECT_EQ(parity_norm(x ^ y), parity_norm(x) != parity_norm(y));
  }
}

TEST(PointwiseProduct, SpecExamples) {
  EXPECT_EQ(pointwise_product(sites(kZ, {z(0), z(1)}), sites(kZ, {z(1), z(2)})), sites(kZ, {z(1)}));
  EXPECT_EQ(pointwise_product(Config::heaviside(Parity::Integer, z(0)), sites(kZ, {z(-1)})), Config::zeros(kZ));
  EXPECT_EQ(pointwise_product(Config::ones(kZ), Config::zeros(kZ)), Config::zeros(kZ));
  EXPECT_THROW(pointwise_product(Config::zeros(kZ), Config::zeros(kH)), LatticeMismatch);
}

TEST(Grad, SpecExamples) {
  EXPECT_EQ(grad(sites(kZ, {z(0)})), sites(kH, {h(-1), h(0)}));
  EXPECT_EQ(grad(sites(kZ, {z(0), z(1)})), sites(kH, {h(-1), h(1)}));
  const Config ring_ones = Config::ones(LatticeTag::ring(7, Parity::Integer));
  EXPECT_EQ(grad(ring_ones), Config::zeros(LatticeTag::ring(7, Parity::HalfInteger)));
  // Heaviside has a single interface at its step.
  EXPECT_EQ(grad(Config::heaviside(Parity::Integer, z(1))), sites(kH, {h(0)}));
}

TEST(GradInv, SpecExamples) {
  EXPECT_EQ(grad_inv(sites(kH, {h(-1), h(0)}), Side::Minus), sites(kZ, {z(0)}));
  EXPECT_EQ(grad_inv(sites(kH, {h(0)}), Side::Minus), Config::heaviside(Parity::Integer, z(1)));
  EXPECT_EQ(grad_inv(Config::zeros(kH), Side::Minus), Config::zeros(kZ));
  EXPECT_EQ(grad_inv(Config::zeros(kH), Side::Plus), Config::zeros(kZ));
  EXPECT_THROW(grad_inv(Config::heaviside(Parity::HalfInteger, h(0), false), Side::Minus), BoundaryClassError);
  EXPECT_THROW(grad_inv(Config::heaviside(Parity::HalfInteger, h(0), true), Side::Plus), BoundaryClassError);
  EXPECT_THROW(grad_inv(Config::from_bits(LatticeTag::ring(5, Parity::Integer), 0, "10000"), Side::Minus),
               BoundaryClassError);
}

TEST(GradInv, InvertsGradOnFiniteConfigs) {
  Rng rng(2, 0);
  for (int k = 0; k < 500; ++k) {
    const Parity p = gen::random_parity(rng);
    const Config x = gen::random_finite(rng, p);
    EXPECT_EQ(grad_inv(grad(x), Side::Minus), x);
    EXPECT_EQ(grad_inv(grad(x), Side::Plus), x);
  }
}

TEST(GradInv, SidesAgreeOnEvenAndDifferByOnesOnOdd) {
  Rng rng(3, 0);
  for (int k = 0; k < 500; ++k) {
    const Parity p = gen::random_parity(rng);
    const Config y = gen::random_finite(rng, p);
    const Config lo = grad_inv(y, Side::Minus), hi = grad_inv(y, Side::Plus);
    EXPECT_EQ(grad(lo), y);
    EXPECT_EQ(grad(hi), y);
    if (parity_norm(y))
      EXPECT_EQ(lo ^ hi, Config::ones(LatticeTag::line(opposite(p))));
    else
      EXPECT_EQ(lo, hi);
  }
}

TEST(Grad, IsSelfAdjointForTheParityPairing) {
  Rng rng(4, 0);
  for (int k = 0; k < 500; ++k) {
    const Config x = gen::random_finite(rng, Parity::Integer);
    const Config y = gen::random_finite(rng, Parity::HalfInteger);
    EXPECT_EQ(parity_norm(pointwise_product(grad(x), y)), parity_norm(pointwise_product(x, grad(y))));
  }
}

TEST(Grad, RingGradientHasEvenParityAndInverts) {
  Rng rng(5, 0);
  for (int k = 0; k < 200; ++k) {
    const std::int64_t n = 3 + static_cast<std::int64_t>(rng.below(12));
    std::string bits(static_cast<std::size_t>(n), '0');
    for (auto& b : bits) b = rng.bernoulli(0.5) ? '1' : '0';
    const Config x = Config::from_bits(LatticeTag::ring(n, Parity::Integer), 0, bits);
    const Config y = grad(x);
    EXPECT_FALSE(parity_norm(y));
    const Config back = grad_inv(y, Side::Minus);
    EXPECT_TRUE(back == x || (back ^ x) == Config::ones(x.lattice()));
  }
}

TEST(PairingAdmissible, SpecExamples) {
  EXPECT_TRUE(pairing_admissible(Config::heaviside(Parity::Integer, z(0), true),
                                 Config::heaviside(Parity::Integer, z(0), false)));
  EXPECT_FALSE(pairing_admissible(Config::ones(kZ), Config::ones(kZ)));
  EXPECT_TRUE(pairing_admissible(sites(kZ, {z(3)}), Config::ones(kZ)));
  EXPECT_TRUE(pairing_admissible(Config::ones(kZ), Config::zeros(kH)));
}

TEST(Config, LiteralAndClasses) {
  const Config x = Config::from_bits(kZ, -1, "1101");
  EXPECT_TRUE(x.at(z(-1)));
  EXPECT_TRUE(x.at(z(0)));
  EXPECT_FALSE(x.at(z(1)));
  EXPECT_TRUE(x.at(z(2)));
  EXPECT_EQ(x.count(), 3);
  EXPECT_TRUE(x.is_finite());
  EXPECT_THROW(x.at(h(0)), LatticeMismatch);
  const Config hv = Config::heaviside(Parity::Integer, z(0));
  EXPECT_TRUE(hv.in_s_minus());
  EXPECT_FALSE(hv.in_s_plus());
  EXPECT_THROW(Config::from_bits(LatticeTag::ring(4, Parity::Integer), 0, "101"), ValidationError);
  EXPECT_EQ(sites(kZ, {z(2), z(2)}), Config::zeros(kZ));
}
