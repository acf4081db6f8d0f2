#pragma once

#include <compare>
#include <cstdint>
#include <string>
#include <utility>

namespace canlab {

/// Which of the two interleaved lattices a site belongs to.
enum class Parity : std::uint8_t { Integer = 0, HalfInteger = 1 };

constexpr Parity opposite(Parity p) noexcept {
  return p == Parity::Integer ? Parity::HalfInteger : Parity::Integer;
}

constexpr std::int64_t floor_div(std::int64_t a, std::int64_t b) noexcept {
  std::int64_t q = a / b;
  if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
  return q;
}

constexpr std::int64_t floor_mod(std::int64_t a, std::int64_t b) noexcept {
  return a - b * floor_div(a, b);
}

/// A site of Z or Z+1/2 stored as twice its value, so site i lives at 2i.
/// Even values are integer sites and odd values are half-integer sites.
class DoubledIndex {
 public:
  constexpr DoubledIndex() noexcept = default;
  constexpr explicit DoubledIndex(std::int64_t twice) noexcept : value_(twice) {}

  /// The integer site i.
  static constexpr DoubledIndex site(std::int64_t i) noexcept { return DoubledIndex(2 * i); }
  /// The half-integer site i + 1/2.
  static constexpr DoubledIndex half_site(std::int64_t i) noexcept {
    return DoubledIndex(2 * i + 1);
  }
  /// The site at `position` on a lattice of the given parity.
  static constexpr DoubledIndex at(Parity p, std::int64_t position) noexcept {
    return DoubledIndex(2 * position + static_cast<std::int64_t>(p));
  }

  constexpr std::int64_t value() const noexcept { return value_; }
  constexpr Parity parity() const noexcept {
    return floor_mod(value_, 2) == 0 ? Parity::Integer : Parity::HalfInteger;
  }
  /// floor of the rational site; for i+1/2 this is i.
  constexpr std::int64_t position() const noexcept { return floor_div(value_, 2); }

  /// Rational site as numerator/denominator with denominator 1 or 2.
  constexpr std::pair<std::int64_t, std::int64_t> to_rational() const noexcept {
    if (parity() == Parity::Integer) return {value_ / 2, 1};
    return {value_, 2};
  }
  /// Inverse of to_rational; den must be 1 or 2.
  static DoubledIndex from_rational(std::int64_t num, std::int64_t den);

  constexpr DoubledIndex shifted(std::int64_t sites) const noexcept {
    return DoubledIndex(value_ + 2 * sites);
  }

  std::string to_string() const;

  constexpr auto operator<=>(const DoubledIndex&) const noexcept = default;

 private:
  std::int64_t value_ = 0;
};

/// Z, Z+1/2, or a ring of n sites carrying one of the two parities.
/// On a ring of size n the doubled indices are taken modulo 2n.
struct LatticeTag {
  Parity parity = Parity::Integer;
  std::int64_t ring_size = 0;  // 0 means the infinite line

  static constexpr LatticeTag line(Parity p) noexcept { return {p, 0}; }
  static constexpr LatticeTag ring(std::int64_t n, Parity p) noexcept { return {p, n}; }

  constexpr bool is_ring() const noexcept { return ring_size > 0; }
  constexpr LatticeTag dual() const noexcept { return {opposite(parity), ring_size}; }

  std::string to_string() const;

  constexpr bool operator==(const LatticeTag&) const noexcept = default;
};

}  // namespace canlab
