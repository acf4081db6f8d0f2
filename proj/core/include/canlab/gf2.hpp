#pragma once

// Two-valued configurations on Z, Z+1/2 and finite rings, viewed as vectors
// over the field {0,1}, together with the parity norm, pointwise products,
// the interface operator grad and its one-sided inverses.

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "canlab/bit_line.hpp"
#include "canlab/lattice.hpp"

namespace canlab {

/// Which one-sided inverse of grad to use: prefix parity (Minus) or suffix
/// parity (Plus).
enum class Side : std::uint8_t { Minus, Plus };

/// An immutable configuration x : lattice -> {0,1}.
///
/// On the line the configuration is described by a finite window of explicit
/// bits plus a constant bit on each side; this covers finite configurations,
/// Heaviside states and their complements. Ring configurations store exactly
/// n bits and have no boundary.
class Config {
 public:
  Config() = default;

  static Config zeros(LatticeTag lattice);
  static Config ones(LatticeTag lattice);
  /// Finite configuration with ones exactly at `sites` (all on `lattice`).
  static Config from_sites(LatticeTag lattice, std::span<const DoubledIndex> sites);
  /// 1_{i >= from} (ones_right) or 1_{i <= from} on the line of the given parity.
  static Config heaviside(Parity parity, DoubledIndex from, bool ones_right = true);
  /// Explicit bits starting at lattice position `first_position` (site
  /// first_position on Z, first_position + 1/2 on Z+1/2, slot index on a ring).
  static Config from_bits(LatticeTag lattice, std::int64_t first_position, std::string_view bits,
                          bool left = false, bool right = false);
  /// Wraps an existing bit line; positions are lattice positions.
  static Config from_line(Parity parity, BitLine bits);

  const LatticeTag& lattice() const noexcept { return lattice_; }
  Parity parity() const noexcept { return lattice_.parity; }
  bool is_ring() const noexcept { return lattice_.is_ring(); }

  /// Value at a site; the site must carry this configuration's parity.
  bool at(DoubledIndex site) const;
  /// Value at a lattice position (ring positions are reduced mod n).
  bool at_position(std::int64_t position) const noexcept;

  bool left_boundary() const noexcept { return bits_.left(); }
  bool right_boundary() const noexcept { return bits_.right(); }
  bool in_s_minus() const noexcept { return is_ring() || !bits_.left(); }
  bool in_s_plus() const noexcept { return is_ring() || !bits_.right(); }
  bool is_finite() const noexcept { return in_s_minus() && in_s_plus(); }

  /// Sites carrying a one inside the window (all of them when finite).
  std::vector<DoubledIndex> support() const;
  /// |x|; requires a finite or ring configuration.
  std::int64_t count() const;

  const BitLine& bits() const noexcept { return bits_; }

  /// Pointwise sum modulo 2.
  Config operator^(const Config& other) const;
  /// Equality as functions on the lattice, independent of window layout.
  bool operator==(const Config& other) const;

  /// "...0[1101]0..." style rendering with the first window site noted.
  std::string to_string() const;

 private:
  Config(LatticeTag lattice, BitLine bits) : lattice_(lattice), bits_(std::move(bits)) {}

  LatticeTag lattice_{};
  BitLine bits_{};
};

/// ||x|| = |x| mod 2 for a finite or ring configuration.
bool parity_norm(const Config& x);

/// Pointwise product; boundary bits multiply.
Config pointwise_product(const Config& x, const Config& y);

/// (grad x)(i) = x(i - 1/2) xor x(i + 1/2), living on the opposite parity.
Config grad(const Config& x);

/// One-sided inverse of grad. Side::Minus is the prefix parity
/// (sum over j < i) and needs y in S_-, Side::Plus the suffix parity
/// (sum over j > i) and needs y in S_+. On a ring y must have even parity.
Config grad_inv(const Config& y, Side side);

/// True when (x, y) satisfies one of the four conditions under which
/// ||x y|| is well defined (x in S_- and y in S_+, x in S_+ and y in S_-,
/// x finite, or y finite). Works across the two parities.
bool pairing_admissible(const Config& x, const Config& y) noexcept;

}  // namespace canlab
