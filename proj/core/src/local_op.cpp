#include "canlab/local_op.hpp"

#include <algorithm>
#include <set>
#include <sstream>
#include <stdexcept>

#include "canlab/error.hpp"

namespace canlab {

namespace {

std::vector<DoubledIndex> odd_intervals(const std::vector<DoubledIndex>& sorted) {
  // Points l on the opposite lattice with an odd number of entries above l:
  // the open intervals (k1, k2), (k3, k4), ... of the sorted list. The list
  // length is even, so the scan terminates inside the operator's support.
  std::vector<DoubledIndex> out;
  for (std::size_t a = 0; a + 1 < sorted.size(); a += 2)
    for (std::int64_t l = sorted[a].value() + 1; l < sorted[a + 1].value(); l += 2)
      out.emplace_back(l);
  return out;
}

// XOR-accumulate a (key -> set) map, dropping keys that cancel out.
using Toggles = std::map<DoubledIndex, std::set<DoubledIndex>>;

void toggle(Toggles& m, DoubledIndex key, DoubledIndex value) {
  auto& s = m[key];
  if (!s.erase(value)) s.insert(value);
}

std::vector<DoubledIndex> sorted_values(const std::set<DoubledIndex>& s) {
  return {s.begin(), s.end()};
}

}  // namespace

LocalOp::LocalOp(Parity row_parity, Parity col_parity, std::vector<OpEntry> entries)
    : row_parity_(row_parity), col_parity_(col_parity), entries_(std::move(entries)) {
  std::sort(entries_.begin(), entries_.end());
  if (std::adjacent_find(entries_.begin(), entries_.end()) != entries_.end())
    throw ValidationError("operator entries must be distinct");
  for (const auto& e : entries_) {
    if (e.row.parity() != row_parity_ || e.col.parity() != col_parity_)
      throw ValidationError("operator entry (" + e.row.to_string() + "," + e.col.to_string() +
                            ") does not match the operator's lattices");
  }
}

LocalOp LocalOp::from_doubled(std::initializer_list<std::pair<std::int64_t, std::int64_t>> pairs,
                              Parity parity) {
  return from_doubled(std::vector<std::pair<std::int64_t, std::int64_t>>(pairs), parity);
}

LocalOp LocalOp::from_doubled(const std::vector<std::pair<std::int64_t, std::int64_t>>& pairs,
                              Parity parity) {
  std::vector<OpEntry> entries;
  entries.reserve(pairs.size());
  for (auto [r, c] : pairs) entries.push_back({DoubledIndex(r), DoubledIndex(c)});
  Parity rp = parity;
  Parity cp = parity;
  if (!entries.empty()) {
    rp = entries.front().row.parity();
    cp = entries.front().col.parity();
  }
  return LocalOp(rp, cp, std::move(entries));
}

bool LocalOp::contains(DoubledIndex row, DoubledIndex col) const noexcept {
  return std::binary_search(entries_.begin(), entries_.end(), OpEntry{row, col});
}

std::map<DoubledIndex, std::vector<DoubledIndex>> LocalOp::rows() const {
  std::map<DoubledIndex, std::vector<DoubledIndex>> out;
  for (const auto& e : entries_) out[e.row].push_back(e.col);
  return out;
}

std::map<DoubledIndex, std::vector<DoubledIndex>> LocalOp::columns() const {
  std::map<DoubledIndex, std::vector<DoubledIndex>> out;
  for (const auto& e : entries_) out[e.col].push_back(e.row);
  for (auto& [_, v] : out) std::sort(v.begin(), v.end());
  return out;
}

std::int64_t LocalOp::range() const noexcept {
  std::int64_t r = 0;
  for (const auto& e : entries_) r = std::max(r, std::abs(e.row.value() - e.col.value()));
  return (r + 1) / 2;
}

std::int64_t LocalOp::span() const noexcept {
  if (entries_.empty()) return 0;
  std::int64_t lo = entries_.front().row.value();
  std::int64_t hi = lo;
  for (const auto& e : entries_) {
    lo = std::min({lo, e.row.value(), e.col.value()});
    hi = std::max({hi, e.row.value(), e.col.value()});
  }
  return (hi - lo + 1) / 2;
}

std::string LocalOp::to_string() const {
  std::ostringstream os;
  os << "{";
  for (std::size_t k = 0; k < entries_.size(); ++k) {
    if (k) os << ",";
    os << "(" << entries_[k].row.to_string() << "," << entries_[k].col.to_string() << ")";
  }
  os << "}";
  return os.str();
}

Config apply(const LocalOp& a, const Config& x) {
  if (a.col_parity() != x.parity())
    throw LatticeMismatch("operator columns live on a different lattice than the configuration");
  const LatticeTag out_lattice{a.row_parity(), x.lattice().ring_size};
  std::vector<DoubledIndex> hits;
  for (const auto& [row, cols] : a.rows()) {
    bool v = false;
    for (const auto& c : cols) v ^= x.at(c);
    if (v) hits.push_back(row);
  }
  if (x.is_ring()) {
    if (x.lattice().ring_size <= 2 * a.span())
      throw ValidationError("ring of size " + std::to_string(x.lattice().ring_size) +
                            " is too small for an operator of span " + std::to_string(a.span()));
  }
  // from_sites xors repeated sites, which is what folding onto a ring needs.
  return Config::from_sites(out_lattice, hits);
}

LocalOp adjoint(const LocalOp& a) {
  std::vector<OpEntry> entries;
  entries.reserve(a.size());
  for (const auto& e : a.entries()) entries.push_back({e.col, e.row});
  return LocalOp(a.col_parity(), a.row_parity(), std::move(entries));
}

LocalOp translate(const LocalOp& a, std::int64_t k) {
  return shift_doubled(a, 2 * k);
}

LocalOp reflect(const LocalOp& a) {
  std::vector<OpEntry> entries;
  entries.reserve(a.size());
  for (const auto& e : a.entries())
    entries.push_back({DoubledIndex(-e.row.value()), DoubledIndex(-e.col.value())});
  return LocalOp(a.row_parity(), a.col_parity(), std::move(entries));
}

LocalOp shift_doubled(const LocalOp& a, std::int64_t doubled_offset) {
  std::vector<OpEntry> entries;
  entries.reserve(a.size());
  for (const auto& e : a.entries())
    entries.push_back({DoubledIndex(e.row.value() + doubled_offset),
                       DoubledIndex(e.col.value() + doubled_offset)});
  const bool flips = floor_mod(doubled_offset, 2) != 0;
  return LocalOp(flips ? opposite(a.row_parity()) : a.row_parity(),
                 flips ? opposite(a.col_parity()) : a.col_parity(), std::move(entries));
}

LocalOp anchored(const LocalOp& a) {
  if (a.empty()) return a;
  return translate(a, -a.entries().front().row.position());
}

bool is_type_symmetric(const LocalOp& a) {
  for (const auto& [_, cols] : a.rows())
    if (cols.size() % 2 != 0) return false;
  return true;
}

bool is_parity_preserving(const LocalOp& a) {
  for (const auto& [_, rows] : a.columns())
    if (rows.size() % 2 != 0) return false;
  return true;
}

LocalOp psi(const LocalOp& a) {
  if (!a.is_square()) throw ValidationError("psi needs rows and columns on the same lattice");
  if (!is_type_symmetric(a)) throw ValidationError("psi needs a type-symmetric operator");

  // Rows of grad*A: row r collects A(r - 1/2, .) xor A(r + 1/2, .).
  Toggles grad_rows;
  for (const auto& e : a.entries()) {
    toggle(grad_rows, DoubledIndex(e.row.value() - 1), e.col);
    toggle(grad_rows, DoubledIndex(e.row.value() + 1), e.col);
  }
  const Parity out = opposite(a.row_parity());
  std::vector<OpEntry> entries;
  for (const auto& [row, cols] : grad_rows)
    for (const auto& l : odd_intervals(sorted_values(cols))) entries.push_back({row, l});
  return LocalOp(out, out, std::move(entries));
}

LocalOp psi_inv(const LocalOp& a) {
  if (!a.is_square()) throw ValidationError("psi_inv needs rows and columns on the same lattice");
  if (!is_parity_preserving(a)) throw ValidationError("psi_inv needs a parity-preserving operator");

  // Columns of A*grad: column j collects A(., j - 1/2) xor A(., j + 1/2).
  Toggles grad_cols;
  for (const auto& e : a.entries()) {
    toggle(grad_cols, DoubledIndex(e.col.value() - 1), e.row);
    toggle(grad_cols, DoubledIndex(e.col.value() + 1), e.row);
  }
  const Parity out = opposite(a.col_parity());
  std::vector<OpEntry> entries;
  for (const auto& [col, rows] : grad_cols)
    for (const auto& i : odd_intervals(sorted_values(rows))) entries.push_back({i, col});
  return LocalOp(out, out, std::move(entries));
}

bool duality_H(const Config& x, const Config& x_dual) {
  if (x.parity() == x_dual.parity())
    throw LatticeMismatch("H pairs configurations on opposite lattices");
  if (!pairing_admissible(x, x_dual))
    throw BoundaryClassError("(x, x') is not an admissible pair for H");
  const bool lhs = parity_norm(pointwise_product(grad(x), x_dual));
  const bool rhs = parity_norm(pointwise_product(x, grad(x_dual)));
  if (lhs != rhs) throw std::logic_error("the two expressions for H disagree");
  return lhs;
}

}  // namespace canlab
