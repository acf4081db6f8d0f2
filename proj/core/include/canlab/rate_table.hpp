#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "canlab/gf2.hpp"
#include "canlab/local_op.hpp"

namespace canlab {

struct RateEntry {
  LocalOp shape;  // anchored translate
  double rate;    // per unit time, strictly positive

  bool operator==(const RateEntry&) const = default;
};

/// Translation-invariant rates r(A) of a cancellative system x -> x xor Ax.
///
/// Each entry stands for the whole translation class of its shape. Shapes are
/// stored anchored (smallest row at position 0) and sorted, so two tables
/// describing the same dynamics compare equal. Zero-rate entries are dropped.
class RateTable {
 public:
  RateTable() = default;

  /// Validates: square shapes on `lattice`, distinct translation classes,
  /// non-negative finite rates, every |i - j| <= range.
  RateTable(Parity lattice, std::int64_t range, std::vector<RateEntry> entries);

  Parity lattice() const noexcept { return lattice_; }
  std::int64_t range() const noexcept { return range_; }
  const std::vector<RateEntry>& entries() const noexcept { return entries_; }
  bool empty() const noexcept { return entries_.empty(); }

  /// Every shape is type-symmetric / parity-preserving.
  bool ts_table() const noexcept { return ts_; }
  bool pp_table() const noexcept { return pp_; }

  /// Rate of the translation class of `shape`, 0 when absent.
  double rate_of(const LocalOp& shape) const;

  /// max over shapes of LocalOp::span().
  std::int64_t max_span() const noexcept;

  std::string to_string() const;

  /// Same lattice and same (shape, rate) entries; the declared range is
  /// metadata and does not take part.
  bool operator==(const RateTable& other) const {
    return lattice_ == other.lattice_ && entries_ == other.entries_;
  }

 private:
  Parity lattice_ = Parity::Integer;
  std::int64_t range_ = 0;
  std::vector<RateEntry> entries_;
  bool ts_ = true;
  bool pp_ = true;
};

/// The rebellious voter model as a cancellative table on Z with range 2:
/// {(0,-1),(0,0)} and {(0,0),(0,1)} at alpha/2, {(0,-2),(0,-1)} and
/// {(0,1),(0,2)} at (1-alpha)/2.
RateTable rebellious_table(double alpha);

/// The nearest-neighbour voter model (rebellious at alpha = 1).
RateTable voter_table();

/// Pure disagreement dynamics {(0,-1),(0,1)} at the given rate.
RateTable disagreement_table(double rate = 1.0);

/// r'(A) = r(A^dagger).
RateTable dual_table(const RateTable& rt);

/// r_Y(A) = r_X(psi^{-1}(A)), i.e. each shape replaced by psi(shape).
/// Lives on the opposite lattice; requires a type-symmetric table.
RateTable interface_table(const RateTable& rt);

/// Inverse of interface_table on parity-preserving tables.
RateTable uninterface_table(const RateTable& rt);

/// Mirror image of every shape.
RateTable reflect_table(const RateTable& rt);

/// Moves a table to the other lattice by a half-site shift.
RateTable shift_half(const RateTable& rt);

/// The four corners of the commutative square: X, its interface model Y,
/// the dual Y' of X and the dual X' of Y, with interface(X') == Y' checked.
struct DiagramClosure {
  RateTable x;
  RateTable y;
  RateTable x_dual;
  RateTable y_dual;
};

/// Throws std::logic_error if interface(X') differs from Y'.
DiagramClosure diagram_closure(const RateTable& rt);

/// True if the table holds {(0,0),(0,1)} or {(0,-1),(0,0)} at positive rate.
bool has_nn_voter_component(const RateTable& rt);

/// Total rate at which `site` flips in state x: the sum of r(A) over all
/// translates A of table shapes with (A x)(site) = 1. Rates are accumulated
/// per distinct rate value, then summed in ascending order.
double table_flip_rate(const RateTable& rt, const Config& x, DoubledIndex site);

}  // namespace canlab
