#include "canlab/simulator.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <stdexcept>

#include "canlab/error.hpp"

namespace canlab::mc {

TableDynamics::TableDynamics(const RateTable& rt) : ts_(rt.ts_table()), pp_(rt.pp_table()) {
  lattice_ = rt.lattice();
  description_ = rt.to_string();
  bool first = true;
  for (const auto& e : rt.entries()) {
    Shape s;
    s.rate = e.rate;
    for (const auto& [row, cols] : e.shape.rows()) {
      Row r{static_cast<int>(row.position()), {}};
      for (const auto& c : cols) {
        const int p = static_cast<int>(c.position());
        r.cols.push_back(p);
        if (first) read_lo_ = read_hi_ = p;
        read_lo_ = std::min(read_lo_, p);
        read_hi_ = std::max(read_hi_, p);
        first = false;
      }
      write_lo_ = std::min(write_lo_, r.row);
      write_hi_ = std::max(write_hi_, r.row);
      s.rows.push_back(std::move(r));
    }
    shapes_.push_back(std::move(s));
  }
}

bool TableDynamics::active(const Shape& s, const View& x, std::int64_t k) const {
  for (const auto& r : s.rows) {
    bool v = false;
    for (int c : r.cols) v ^= x(k + c);
    if (v) return true;
  }
  return false;
}

double TableDynamics::anchor_rate(const View& x, std::int64_t k) const {
  double total = 0.0;
  for (const auto& s : shapes_)
    if (active(s, x, k)) total += s.rate;
  return total;
}

void TableDynamics::fire(const View& x, std::int64_t k, double u, std::vector<std::int64_t>& flips) const {
  const double target = u * anchor_rate(x, k);
  const Shape* chosen = nullptr;
  double acc = 0.0;
  for (const auto& s : shapes_) {
    if (!active(s, x, k)) continue;
    chosen = &s;
    acc += s.rate;
    if (target < acc) break;
  }
  if (chosen == nullptr) return;
  // Evaluate every row before writing anything.
  for (const auto& r : chosen->rows) {
    bool v = false;
    for (int c : r.cols) v ^= x(k + c);
    if (v) flips.push_back(k + r.row);
  }
}

FlipDynamics::FlipDynamics(const FlipRateModel& model, Parity lattice) : model_(model) {
  if (model.radius() > 32) throw ValidationError("flip-rate neighbourhoods are limited to radius 32");
  lattice_ = lattice;
  read_lo_ = -model.radius();
  read_hi_ = model.radius();
}

double FlipDynamics::anchor_rate(const View& x, std::int64_t k) const {
  std::array<std::uint8_t, 65> bits{};
  const int r = model_.radius();
  for (int d = -r; d <= r; ++d) bits[static_cast<std::size_t>(d + r)] = x(k + d);
  return flip_rate_from_neighbourhood(model_, std::span<const std::uint8_t>(bits.data(), 2 * r + 1));
}

void FlipDynamics::fire(const View&, std::int64_t k, double, std::vector<std::int64_t>& flips) const {
  flips.push_back(k);
}

std::string FlipDynamics::describe() const {
  return to_string(model_.kind) + "(alpha=" + std::to_string(model_.alpha) +
         ", R=" + std::to_string(model_.range) + ")";
}

std::shared_ptr<const Dynamics> make_dynamics(const RateTable& rt) {
  return std::make_shared<TableDynamics>(rt);
}

std::shared_ptr<const Dynamics> make_dynamics(const FlipRateModel& model, Parity lattice) {
  return std::make_shared<FlipDynamics>(model, lattice);
}

Simulator::Simulator(std::shared_ptr<const Dynamics> dynamics, const Config& x, Rng rng)
    : dyn_(std::move(dynamics)), parity_(x.parity()), rng_(rng) {
  if (!dyn_) throw ValidationError("simulator needs a dynamics");
  if (dyn_->lattice() != x.parity())
    throw LatticeMismatch("configuration on " + x.lattice().to_string() + " but dynamics on the other lattice");
  if (x.is_ring()) {
    ring_ = x.lattice().ring_size;
    const int reach = std::max(dyn_->read_hi(), dyn_->write_hi()) - std::min(dyn_->read_lo(), dyn_->write_lo());
    if (ring_ <= 2 * reach)
      throw ValidationError("ring of " + std::to_string(ring_) + " sites is too small for this neighbourhood");
    bits_ = BitLine(0, static_cast<std::size_t>(ring_), false, false);
    for (std::int64_t p = 0; p < ring_; ++p) bits_.set(p, x.at_position(p));
  } else {
    bits_ = x.bits();
    if (!dyn_->constant_is_trap(bits_.left()) || !dyn_->constant_is_trap(bits_.right()))
      throw ValidationError("a constant boundary of this configuration has infinitely many active transitions");
  }
  finite_ = ring_ > 0 || (!bits_.left() && !bits_.right());
  ones_ = finite_ ? bits_.window_count() : 0;
  parity0_ = (ones_ & 1) != 0;
  rebuild();
}

void Simulator::refresh_tree() {
  const std::size_t m = rate_.size();
  tree_.assign(m + 1, 0.0);
  for (std::size_t i = 1; i <= m; ++i) {
    tree_[i] += rate_[i - 1];
    const std::size_t parent = i + (i & (~i + 1));
    if (parent <= m) tree_[parent] += tree_[i];
  }
  updates_since_rebuild_ = 0;
}

void Simulator::rebuild() {
  std::int64_t lo = 0, hi = 0;  // anchor slots cover [lo, hi)
  if (ring_ > 0) {
    lo = 0;
    hi = ring_;
  } else {
    const bool left = bits_.left(), right = bits_.right();
    const auto fn = bits_.first_nonconstant();
    const auto ln = bits_.last_nonconstant();
    if (left == right && !fn) {
      bits_.trim(0);
      lo = hi = 0;
    } else {
      const std::int64_t a = fn.value_or(bits_.end());
      const std::int64_t b = ln.value_or(bits_.first() - 1);
      const std::int64_t margin = std::max<std::int64_t>(32, (std::max(a, b) - std::min(a, b)) / 2);
      const std::int64_t reach = std::max(dyn_->read_hi(), dyn_->write_hi()) -
                                 std::min(dyn_->read_lo(), dyn_->write_lo());
      bits_.trim(margin + reach + 1);
      lo = std::min(a, b + 1) - dyn_->read_hi() - margin;
      hi = std::max(a, b + 1) - dyn_->read_lo() + margin;
    }
  }
  base_ = lo;
  rate_.assign(static_cast<std::size_t>(hi - lo), 0.0);
  active_ = 0;
  const View v = view();
  for (std::size_t i = 0; i < rate_.size(); ++i) {
    rate_[i] = dyn_->anchor_rate(v, base_ + static_cast<std::int64_t>(i));
    if (rate_[i] > 0.0) ++active_;
  }
  refresh_tree();
}

void Simulator::fenwick_add(std::size_t i, double delta) {
  for (std::size_t j = i + 1; j < tree_.size(); j += j & (~j + 1)) tree_[j] += delta;
}

std::size_t Simulator::fenwick_find(double u) const {
  const std::size_t m = rate_.size();
  std::size_t pos = 0;
  for (std::size_t step = std::bit_floor(m); step > 0; step >>= 1) {
    if (pos + step <= m && tree_[pos + step] <= u) {
      pos += step;
      u -= tree_[pos];
    }
  }
  return std::min(pos, m - 1);
}

double Simulator::total_rate() const noexcept {
  if (active_ == 0) return 0.0;
  double s = 0.0;
  for (std::size_t j = rate_.size(); j > 0; j -= j & (~j + 1)) s += tree_[j];
  return std::max(s, 0.0);
}

void Simulator::update_anchor(std::int64_t k) {
  const auto i = static_cast<std::size_t>(k - base_);
  const double r = dyn_->anchor_rate(view(), k);
  const double old = rate_[i];
  if (r == old) return;
  active_ += (r > 0.0) - (old > 0.0);
  rate_[i] = r;
  fenwick_add(i, r - old);
  ++updates_since_rebuild_;
}

double Simulator::rate_discrepancy() const {
  double s = 0.0;
  const View v = view();
  for (std::size_t i = 0; i < rate_.size(); ++i) s += dyn_->anchor_rate(v, base_ + static_cast<std::int64_t>(i));
  return std::abs(s - total_rate());
}

bool Simulator::step(double horizon) {
  const double total = total_rate();
  if (active_ == 0 || !(total > 0.0)) {
    time_ = std::max(time_, horizon);
    return false;
  }
  const double dt = rng_.exponential(total);
  if (time_ + dt > horizon) {
    time_ = horizon;
    return false;
  }
  time_ += dt;

  std::size_t slot = fenwick_find(rng_.uniform() * total);
  if (rate_[slot] <= 0.0) {
    // Rounding in the partial sums can land on an idle slot next to the
    // intended one; take the closest active slot to the left, else right.
    std::size_t s = slot;
    while (s > 0 && rate_[s] <= 0.0) --s;
    if (rate_[s] <= 0.0) {
      s = slot;
      while (s + 1 < rate_.size() && rate_[s] <= 0.0) ++s;
    }
    slot = s;
  }
  const std::int64_t k = base_ + static_cast<std::int64_t>(slot);
  flips_.clear();
  dyn_->fire(view(), k, rng_.uniform(), flips_);

  for (auto& p : flips_) {
    if (ring_ > 0) p = ((p % ring_) + ring_) % ring_;
    const bool was = bits_.get(p);
    bits_.set(p, !was);
    if (finite_) ones_ += was ? -1 : 1;
  }
  bool need_rebuild = false;
  for (const auto p : flips_) {
    for (std::int64_t a = p - dyn_->read_hi(); a <= p - dyn_->read_lo(); ++a) {
      std::int64_t k2 = a;
      if (ring_ > 0) k2 = ((a % ring_) + ring_) % ring_;
      if (k2 >= base_ && k2 < base_ + static_cast<std::int64_t>(rate_.size())) {
        update_anchor(k2);
      } else if (dyn_->anchor_rate(view(), k2) > 0.0) {
        need_rebuild = true;
      }
    }
  }
  // The guard margin is also refreshed when activity reaches the outer slots.
  if (!need_rebuild && ring_ == 0 && !flips_.empty()) {
    const std::int64_t guard = std::max(dyn_->read_hi() - dyn_->read_lo(), 1) + 1;
    for (const auto p : flips_)
      if (p - dyn_->read_hi() < base_ + guard ||
          p - dyn_->read_lo() >= base_ + static_cast<std::int64_t>(rate_.size()) - guard)
        need_rebuild = true;
  }
  if (need_rebuild) {
    rebuild();
  } else if (updates_since_rebuild_ > 4 * rate_.size() + 65536) {
    refresh_tree();
  }
  ++events_;

  if (debug_) {
    const double d = rate_discrepancy();
    if (d > 1e-9 * std::max(1.0, total_rate()))
      throw std::logic_error("tracked total rate drifted from the recomputed sum by " + std::to_string(d));
    if (finite_ && dyn_->parity_preserving() && ((ones_ & 1) != 0) != parity0_)
      throw std::logic_error("parity of |x| changed under parity-preserving dynamics");
    if (finite_ && ring_ == 0 && ones_ != bits_.window_count())
      throw std::logic_error("particle count out of sync");
  }
  return true;
}

void Simulator::run_until(double t) {
  while (step(t)) {
  }
}

Config Simulator::config() const {
  if (ring_ > 0) {
    std::string s(static_cast<std::size_t>(ring_), '0');
    for (std::int64_t p = 0; p < ring_; ++p)
      if (bits_.get(p)) s[static_cast<std::size_t>(p)] = '1';
    return Config::from_bits(LatticeTag::ring(ring_, parity_), 0, s);
  }
  return Config::from_line(parity_, bits_);
}

}  // namespace canlab::mc
