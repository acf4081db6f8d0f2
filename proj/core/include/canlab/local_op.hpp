#pragma once

// Finite GF(2) operators A, identified with the set {(i, j) : A(i, j) = 1}.

#include <compare>
#include <cstdint>
#include <initializer_list>
#include <map>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include "canlab/gf2.hpp"
#include "canlab/lattice.hpp"

namespace canlab {

struct OpEntry {
  DoubledIndex row;
  DoubledIndex col;
  constexpr auto operator<=>(const OpEntry&) const noexcept = default;
};

/// A local operator: a finite, canonically ordered set of (row, col) pairs.
/// Rows share one parity and columns share one parity.
class LocalOp {
 public:
  /// The zero operator between the given lattices.
  explicit LocalOp(Parity row_parity = Parity::Integer, Parity col_parity = Parity::Integer)
      : row_parity_(row_parity), col_parity_(col_parity) {}

  /// Throws ValidationError on duplicates or mixed parities.
  LocalOp(Parity row_parity, Parity col_parity, std::vector<OpEntry> entries);

  /// Square operator from doubled-coordinate pairs, e.g. {{0,-2},{0,0}} for
  /// {(0,-1),(0,0)}. The parity is taken from the entries; `parity` is used
  /// only when the list is empty.
  static LocalOp from_doubled(std::initializer_list<std::pair<std::int64_t, std::int64_t>> pairs,
                              Parity parity = Parity::Integer);
  static LocalOp from_doubled(const std::vector<std::pair<std::int64_t, std::int64_t>>& pairs,
                              Parity parity = Parity::Integer);

  const std::vector<OpEntry>& entries() const noexcept { return entries_; }
  std::size_t size() const noexcept { return entries_.size(); }
  bool empty() const noexcept { return entries_.empty(); }
  Parity row_parity() const noexcept { return row_parity_; }
  Parity col_parity() const noexcept { return col_parity_; }
  bool is_square() const noexcept { return row_parity_ == col_parity_; }

  bool contains(DoubledIndex row, DoubledIndex col) const noexcept;

  /// Row index -> sorted columns.
  std::map<DoubledIndex, std::vector<DoubledIndex>> rows() const;
  /// Column index -> sorted rows.
  std::map<DoubledIndex, std::vector<DoubledIndex>> columns() const;

  /// max |i - j| over entries, in site units (0 for the zero operator).
  std::int64_t range() const noexcept;
  /// max minus min over all row and column indices, in site units.
  std::int64_t span() const noexcept;

  std::string to_string() const;

  bool operator==(const LocalOp&) const = default;
  auto operator<=>(const LocalOp& other) const {
    return std::tie(row_parity_, col_parity_, entries_) <=>
           std::tie(other.row_parity_, other.col_parity_, other.entries_);
  }

 private:
  Parity row_parity_;
  Parity col_parity_;
  std::vector<OpEntry> entries_;
};

/// (Ax)(i) = xor over j of A(i, j) x(j). On a ring, indices are taken mod n
/// and n must exceed twice the operator span.
Config apply(const LocalOp& a, const Config& x);

/// A^dagger(i, j) = A(j, i).
LocalOp adjoint(const LocalOp& a);

/// T_k(A) = {(i + k, j + k)} for an integer shift k.
LocalOp translate(const LocalOp& a, std::int64_t k);

/// {(-i, -j)}: the spatial mirror image.
LocalOp reflect(const LocalOp& a);

/// Adds `doubled_offset` to every index; an odd offset moves the operator to
/// the other lattice.
LocalOp shift_doubled(const LocalOp& a, std::int64_t doubled_offset);

/// Canonical translate: the smallest row sits at position 0.
LocalOp anchored(const LocalOp& a);

/// Every row has an even number of entries.
bool is_type_symmetric(const LocalOp& a);
/// Every column has an even number of entries.
bool is_parity_preserving(const LocalOp& a);

/// The interface operator of a type-symmetric A: the unique B with
/// grad(A x) = B grad(x). Computed row by row as grad * A * grad_inv(-).
LocalOp psi(const LocalOp& a);

/// Inverse of psi on parity-preserving operators, grad_inv(-) * A * grad,
/// computed column by column.
LocalOp psi_inv(const LocalOp& a);

/// H(x, x') = ||grad(x) x'|| = ||x grad(x')|| for x, x' on opposite parities.
/// Both expressions are evaluated; a disagreement raises std::logic_error.
bool duality_H(const Config& x, const Config& x_dual);

}  // namespace canlab
