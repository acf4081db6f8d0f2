#include "canlab/rate_table.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>
#include <stdexcept>

#include "canlab/error.hpp"

namespace canlab {

RateTable::RateTable(Parity lattice, std::int64_t range, std::vector<RateEntry> entries)
    : lattice_(lattice), range_(range) {
  if (range < 0) throw ValidationError("range must be non-negative");
  for (auto& e : entries) {
    if (!std::isfinite(e.rate) || e.rate < 0.0)
      throw ValidationError("rates must be finite and non-negative");
    if (e.rate == 0.0 || e.shape.empty()) continue;
    if (!e.shape.is_square() || e.shape.row_parity() != lattice)
      throw ValidationError("shape " + e.shape.to_string() + " is not an operator on the table lattice");
    if (e.shape.range() > range)
      throw ValidationError("shape " + e.shape.to_string() + " exceeds the declared range " +
                            std::to_string(range));
    entries_.push_back({anchored(e.shape), e.rate});
  }
  std::sort(entries_.begin(), entries_.end(),
            [](const RateEntry& a, const RateEntry& b) { return a.shape < b.shape; });
  for (std::size_t k = 1; k < entries_.size(); ++k)
    if (entries_[k].shape == entries_[k - 1].shape)
      throw ValidationError("shape " + entries_[k].shape.to_string() + " listed twice");
  for (const auto& e : entries_) {
    ts_ = ts_ && is_type_symmetric(e.shape);
    pp_ = pp_ && is_parity_preserving(e.shape);
  }
}

double RateTable::rate_of(const LocalOp& shape) const {
  if (shape.empty()) return 0.0;
  const LocalOp key = anchored(shape);
  for (const auto& e : entries_)
    if (e.shape == key) return e.rate;
  return 0.0;
}

std::int64_t RateTable::max_span() const noexcept {
  std::int64_t s = 0;
  for (const auto& e : entries_) s = std::max(s, e.shape.span());
  return s;
}

std::string RateTable::to_string() const {
  std::ostringstream os;
  os << (lattice_ == Parity::Integer ? "Z" : "Z+1/2") << " R=" << range_ << " [";
  for (std::size_t k = 0; k < entries_.size(); ++k) {
    if (k) os << ", ";
    os << entries_[k].shape.to_string() << ":" << entries_[k].rate;
  }
  os << "]";
  return os.str();
}

RateTable rebellious_table(double alpha) {
  if (!(alpha >= 0.0 && alpha <= 1.0)) throw ValidationError("alpha must lie in [0, 1]");
  const double voter = alpha / 2.0;
  const double rebel = (1.0 - alpha) / 2.0;
  return RateTable(Parity::Integer, 2,
                   {{LocalOp::from_doubled({{0, -2}, {0, 0}}), voter},
                    {LocalOp::from_doubled({{0, 0}, {0, 2}}), voter},
                    {LocalOp::from_doubled({{0, -4}, {0, -2}}), rebel},
                    {LocalOp::from_doubled({{0, 2}, {0, 4}}), rebel}});
}

RateTable voter_table() { return rebellious_table(1.0); }

RateTable disagreement_table(double rate) {
  return RateTable(Parity::Integer, 1, {{LocalOp::from_doubled({{0, -2}, {0, 2}}), rate}});
}

namespace {

RateTable map_shapes(const RateTable& rt, Parity lattice, LocalOp (*f)(const LocalOp&)) {
  std::vector<RateEntry> out;
  std::int64_t range = 0;
  for (const auto& e : rt.entries()) {
    LocalOp s = f(e.shape);
    range = std::max(range, s.range());
    out.push_back({std::move(s), e.rate});
  }
  return RateTable(lattice, std::max(range, rt.range()), std::move(out));
}

LocalOp shift_half_op(const LocalOp& a) { return shift_doubled(a, 1); }

}  // namespace

RateTable dual_table(const RateTable& rt) { return map_shapes(rt, rt.lattice(), &adjoint); }

RateTable interface_table(const RateTable& rt) {
  if (!rt.ts_table()) throw ValidationError("interface table needs a type-symmetric table");
  std::vector<RateEntry> out;
  std::int64_t range = 0;
  for (const auto& e : rt.entries()) {
    LocalOp s = psi(e.shape);
    range = std::max(range, s.range());
    out.push_back({std::move(s), e.rate});
  }
  return RateTable(opposite(rt.lattice()), range, std::move(out));
}

RateTable uninterface_table(const RateTable& rt) {
  if (!rt.pp_table()) throw ValidationError("inverse interface table needs a parity-preserving table");
  std::vector<RateEntry> out;
  std::int64_t range = 0;
  for (const auto& e : rt.entries()) {
    LocalOp s = psi_inv(e.shape);
    range = std::max(range, s.range());
    out.push_back({std::move(s), e.rate});
  }
  return RateTable(opposite(rt.lattice()), range, std::move(out));
}

RateTable reflect_table(const RateTable& rt) { return map_shapes(rt, rt.lattice(), &reflect); }

RateTable shift_half(const RateTable& rt) {
  return map_shapes(rt, opposite(rt.lattice()), &shift_half_op);
}

DiagramClosure diagram_closure(const RateTable& rt) {
  DiagramClosure d;
  d.x = rt;
  d.y = interface_table(rt);
  d.y_dual = dual_table(rt);
  d.x_dual = dual_table(d.y);
  if (!d.x_dual.ts_table()) throw std::logic_error("dual of the interface table is not type-symmetric");
  if (!(interface_table(d.x_dual) == d.y_dual))
    throw std::logic_error("interface(X') differs from the dual of X");
  return d;
}

bool has_nn_voter_component(const RateTable& rt) {
  if (rt.lattice() != Parity::Integer) {
    return has_nn_voter_component(shift_half(rt));
  }
  return rt.rate_of(LocalOp::from_doubled({{0, 0}, {0, 2}})) > 0.0 ||
         rt.rate_of(LocalOp::from_doubled({{0, -2}, {0, 0}})) > 0.0;
}

double table_flip_rate(const RateTable& rt, const Config& x, DoubledIndex site) {
  if (x.parity() != rt.lattice() || site.parity() != rt.lattice())
    throw LatticeMismatch("configuration and table live on different lattices");
  std::map<double, std::int64_t> active;
  for (const auto& e : rt.entries()) {
    for (const auto& [row, cols] : e.shape.rows()) {
      // The translate of the shape that puts this row on `site`.
      const std::int64_t shift = site.value() - row.value();
      bool v = false;
      for (const auto& c : cols) v ^= x.at(DoubledIndex(c.value() + shift));
      if (v) ++active[e.rate];
    }
  }
  double total = 0.0;
  for (const auto& [rate, k] : active) total += rate * static_cast<double>(k);
  return total;
}

}  // namespace canlab
