#pragma once

// Exact continuous-time Markov chain computations on small rings: generator
// construction, transient laws by uniformization, exact checks of the two
// duality identities, and the stationary law of a truncated chain for the
// interface seen from its left-most particle.

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "canlab/lattice.hpp"
#include "canlab/rate_table.hpp"

namespace canlab::exact {

inline constexpr int kMaxRingSites = 14;

/// One translate of a table shape folded onto the ring, as bit masks:
/// (A x) has bit `row` set iff popcount(x & cols) is odd.
struct RingTransition {
  std::vector<std::pair<std::uint32_t, std::uint32_t>> rows;  // (row bit, column mask)
  double rate = 0.0;

  std::uint32_t image(std::uint32_t x) const noexcept;  // A x
};

/// A rate table on a ring of n sites; slot b is the site with doubled index
/// 2b + parity (mod 2n). States are n-bit masks.
struct RingModel {
  int n = 0;
  Parity parity = Parity::Integer;
  std::vector<RingTransition> transitions;

  /// Expands every table entry into its n translates. Requires
  /// n > 2 * (widest shape span) and n <= 31.
  static RingModel from_table(const RateTable& rt, int n);
};

/// Off-diagonal part of a conservative generator in CSR form.
struct Generator {
  int n = 0;
  std::vector<std::size_t> offsets;  // size 2^n + 1
  std::vector<std::uint32_t> targets;
  std::vector<double> rates;
  std::vector<double> exit_rates;  // -diagonal

  std::size_t states() const noexcept { return exit_rates.size(); }
  /// max over states of |sum of row|, including the diagonal.
  double max_row_sum_error() const;
};

/// Transitions x -> x xor Ax accumulated over all translates with Ax != 0.
/// Throws CapacityError above kMaxRingSites.
Generator build_generator(const RingModel& model);

/// Probability vector over the 2^n ring states.
struct Distribution {
  std::vector<double> p;

  static Distribution point_mass(int n, std::uint32_t state);
  double total() const noexcept;
};

/// p0 exp(tQ) by uniformization. The Poisson series is cut once the
/// neglected tail mass drops below eps and the result is renormalized, so
/// each entry is within eps of the exact value in total variation.
Distribution transient(const Generator& gen, const Distribution& p0, double t, double eps);

struct DualityReport {
  std::string identity;  // "dual" or "H"
  int n = 0;
  double t = 0.0;
  double eps = 0.0;
  int trials = 0;
  double max_deviation = 0.0;
};

/// max over random (x, y') of |E||X_0 Y'_t|| - E||X_t Y'_0|||, with X driven
/// by rt and Y' by dual_table(rt), both on a ring of n sites. Requires
/// n >= 4R + 2.
DualityReport check_duality(const RateTable& rt, int n, double t, int trials, double eps,
                            std::uint64_t seed);

/// max over random (x, x') of |E H(X_t, x') - E H(x, X'_t)| with
/// X' = dual_table(interface_table(rt)) on the half-integer slots of the ring.
DualityReport check_H_duality(const RateTable& rt, int n, double t, int trials, double eps,
                              std::uint64_t seed);

/// H on the doubled ring: x on slots 2b, x' on slots 2b+1, both n-bit masks.
bool ring_H(std::uint32_t x, std::uint32_t x_dual, int n);

/// Stationary analysis of the interface chain seen from its left-most
/// particle, restricted to states with support in [0, K].
struct HatChainAnalysis {
  int K = 0;
  std::vector<std::uint32_t> states;  // bit k set <=> particle at offset k; bit 0 always set
  std::vector<double> stationary;
  double leak_flow = 0.0;  // sum of pi(y) * (rate of leaving the window from y)
  int sweeps = 0;
  double residual = 0.0;

  double p_delta0() const;
  double mean_size() const;
  /// P[|Y| = 2m + 1] for m = 0..m_max.
  std::vector<double> size_distribution(int m_max) const;
};

/// Transitions leaving the window are redirected to the single-particle
/// state; their stationary flow is reported as leak_flow. Throws
/// ValidationError for a non parity-preserving table and CapacityError when
/// the single-particle state already leaks at this K.
HatChainAnalysis truncated_hatY_analysis(const RateTable& interface_rt, int K, double tol = 1e-14,
                                         int max_sweeps = 200000);

}  // namespace canlab::exact
