#pragma once

// Event-driven continuous-time simulation of cancellative and flip-rate
// dynamics on the line (with a growing window) and on rings.

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "canlab/bit_line.hpp"
#include "canlab/flip_rates.hpp"
#include "canlab/gf2.hpp"
#include "canlab/rate_table.hpp"
#include "canlab/rng.hpp"

namespace canlab::mc {

/// Read access to a configuration by lattice position; ring positions wrap.
struct View {
  const BitLine* bits = nullptr;
  std::int64_t ring = 0;

  bool operator()(std::int64_t pos) const noexcept {
    if (ring > 0) {
      pos %= ring;
      if (pos < 0) pos += ring;
    }
    return bits->get(pos);
  }
};

/// A translation-invariant dynamics split into anchors: the transitions
/// attached to anchor k read positions k + read_lo .. k + read_hi and write
/// positions k + write_lo .. k + write_hi.
class Dynamics {
 public:
  virtual ~Dynamics() = default;

  Parity lattice() const noexcept { return lattice_; }
  int read_lo() const noexcept { return read_lo_; }
  int read_hi() const noexcept { return read_hi_; }
  int write_lo() const noexcept { return write_lo_; }
  int write_hi() const noexcept { return write_hi_; }

  /// Total rate of the transitions attached to anchor k.
  virtual double anchor_rate(const View& x, std::int64_t k) const = 0;
  /// Chooses a transition of anchor k with probability proportional to its
  /// rate (u uniform on [0, 1)) and appends the positions it flips.
  virtual void fire(const View& x, std::int64_t k, double u, std::vector<std::int64_t>& flips) const = 0;
  /// True when constant configurations equal to `value` are traps, i.e. every
  /// anchor reading only `value` has zero rate.
  virtual bool constant_is_trap(bool value) const = 0;
  /// True when every transition preserves |x| mod 2.
  virtual bool parity_preserving() const = 0;
  virtual std::string describe() const = 0;

 protected:
  Parity lattice_ = Parity::Integer;
  int read_lo_ = 0, read_hi_ = 0, write_lo_ = 0, write_hi_ = 0;
};

/// x -> x xor Ax at rate r(A) for every translate A of a table shape.
class TableDynamics final : public Dynamics {
 public:
  explicit TableDynamics(const RateTable& rt);

  double anchor_rate(const View& x, std::int64_t k) const override;
  void fire(const View& x, std::int64_t k, double u, std::vector<std::int64_t>& flips) const override;
  bool constant_is_trap(bool value) const override { return !value || ts_; }
  bool parity_preserving() const override { return pp_; }
  std::string describe() const override { return description_; }

 private:
  struct Row {
    int row;
    std::vector<int> cols;
  };
  struct Shape {
    std::vector<Row> rows;
    double rate;
  };
  bool active(const Shape& s, const View& x, std::int64_t k) const;

  std::vector<Shape> shapes_;
  bool ts_ = true;
  bool pp_ = true;
  std::string description_;
};

/// Single-site flips at the rates of a FlipRateModel.
class FlipDynamics final : public Dynamics {
 public:
  explicit FlipDynamics(const FlipRateModel& model, Parity lattice = Parity::Integer);

  double anchor_rate(const View& x, std::int64_t k) const override;
  void fire(const View& x, std::int64_t k, double u, std::vector<std::int64_t>& flips) const override;
  bool constant_is_trap(bool) const override { return true; }
  bool parity_preserving() const override { return false; }
  std::string describe() const override;

 private:
  FlipRateModel model_;
};

std::shared_ptr<const Dynamics> make_dynamics(const RateTable& rt);
std::shared_ptr<const Dynamics> make_dynamics(const FlipRateModel& model, Parity lattice = Parity::Integer);

/// Simulation state: configuration, clock, random stream and a Fenwick tree
/// of per-anchor rates updated incrementally after each event.
///
/// On the line the anchor window follows the non-constant part of the
/// configuration and is rebuilt (re-centred, with fresh sums) whenever an
/// event touches its guard margin. The number of anchors with positive rate
/// is tracked as an integer, so absorption in a trap is detected exactly.
class Simulator {
 public:
  /// Throws ValidationError when the lattice of x differs from the dynamics,
  /// when a line boundary is not a trap of the dynamics, or when a ring is
  /// too small for the neighbourhood.
  Simulator(std::shared_ptr<const Dynamics> dynamics, const Config& x, Rng rng);

  double time() const noexcept { return time_; }
  std::uint64_t events() const noexcept { return events_; }
  bool trapped() const noexcept { return active_ == 0; }
  double total_rate() const noexcept;
  std::int64_t active_anchors() const noexcept { return active_; }

  /// Performs the next event if it happens no later than `horizon` and
  /// returns true; otherwise sets the clock to `horizon` and returns false.
  bool step(double horizon);
  /// Steps until the clock reaches t.
  void run_until(double t);

  const BitLine& bits() const noexcept { return bits_; }
  View view() const noexcept { return {&bits_, ring_}; }
  Config config() const;
  /// Number of ones; requires a finite or ring configuration.
  std::int64_t ones() const noexcept { return ones_; }
  /// Positions flipped by the last event.
  const std::vector<std::int64_t>& last_flips() const noexcept { return flips_; }

  /// Recomputes every anchor rate from scratch; returns |sum - tracked total|.
  double rate_discrepancy() const;
  /// When on, every event checks the total rate (1e-9 relative) and, for
  /// parity-preserving dynamics, the parity of |x|; violations throw
  /// std::logic_error.
  void set_debug_checks(bool on) noexcept { debug_ = on; }

 private:
  void rebuild();
  void refresh_tree();
  void update_anchor(std::int64_t k);
  void fenwick_add(std::size_t i, double delta);
  std::size_t fenwick_find(double u) const;

  std::shared_ptr<const Dynamics> dyn_;
  Parity parity_;
  std::int64_t ring_ = 0;
  BitLine bits_;
  Rng rng_;
  double time_ = 0.0;
  std::uint64_t events_ = 0;
  std::int64_t ones_ = 0;
  bool finite_ = true;
  bool debug_ = false;
  bool parity0_ = false;

  std::int64_t base_ = 0;  // anchor of slot 0
  std::vector<double> rate_;
  std::vector<double> tree_;
  std::int64_t active_ = 0;
  std::uint64_t updates_since_rebuild_ = 0;
  std::vector<std::int64_t> flips_;
};

}  // namespace canlab::mc
