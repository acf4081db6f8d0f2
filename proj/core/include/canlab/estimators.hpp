#pragma once

// Monte Carlo estimators for the interface process seen from its left-most
// particle, the harmonic function built from its invariant law, clustering,
// survival and the critical-region scan.

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "canlab/flip_rates.hpp"
#include "canlab/gf2.hpp"
#include "canlab/rate_table.hpp"
#include "canlab/simulator.hpp"
#include "canlab/statistics.hpp"

namespace canlab::mc {

/// Interface state relative to its left-most particle: sorted offsets with
/// offsets[0] == 0 and an odd count, plus its occupation weight.
struct HatYSample {
  std::vector<std::int32_t> offsets;
  double weight = 1.0;

  bool is_delta0() const noexcept { return offsets.size() == 1; }
};

struct HatYOptions {
  double burn_in = 0.0;
  double horizon = 1.0;  // sampling period after burn-in
  double thin = 1.0;     // grid spacing; each sample carries weight `thin`
  std::int64_t cap = 512;  // abort once the interface spans more sites
  std::uint64_t seed = 0;
  std::uint64_t stream = 0;
};

struct HatYRun {
  std::vector<HatYSample> samples;
  bool cap_abort = false;  // "no tightness at this parameter", not an error
  double abort_time = 0.0;
  std::uint64_t events = 0;
  std::int64_t max_span = 0;
};

/// Simulates the interface model Y directly from its table, started from a
/// single particle, recording Ŷ at times burn_in + j * thin, j = 0, 1, ...
/// while the time stays below burn_in + horizon. Requires a parity-preserving
/// table.
HatYRun simulate_hatY(const RateTable& interface_rt, const HatYOptions& opt);

/// Same for a type-symmetric dynamics of X started from the Heaviside state
/// 1_{i >= 1}: the interfaces are the edges (i, i+1) with x(i) != x(i+1).
/// Needed for flip-rate models that have no cancellative table.
HatYRun simulate_hatY_via_x(std::shared_ptr<const Dynamics> x_dynamics, const HatYOptions& opt);

struct TightnessReport {
  Summary p_delta0;
  Summary mean_size;             // E|Ŷ∞|
  std::vector<Summary> tail;     // P[|Ŷ∞| = 2n + 1], n = 0..n_max
  double tail_slope = 0.0;       // slope of log tail against n (descriptive)
  std::size_t samples = 0;
  double total_weight = 0.0;
};

/// Occupation-weighted estimates with batch-means standard errors (batches
/// of at least 50 samples). Throws ValidationError on an empty sample list.
TightnessReport interface_tightness_report(std::span<const HatYSample> samples, int n_max = 10);

/// sum over integer shifts i of ||(y + i) x|| for offsets y and the particle
/// positions of x.
std::int64_t shifted_overlap_count(std::span<const std::int32_t> offsets,
                                   std::span<const std::int64_t> positions);

/// h(x) = sum_i E||(Ŷ∞ + i) x|| with Ŷ∞ distributed as the weighted samples.
/// Equal states are merged, so evaluation cost scales with distinct states.
class HarmonicFunction {
 public:
  static HarmonicFunction from_samples(std::span<const HatYSample> samples);

  /// x must be a finite configuration.
  double operator()(const Config& x) const;
  double at_positions(std::span<const std::int64_t> positions) const;

  double c() const noexcept { return c_; }  // P[Ŷ∞ = δ0]
  double C() const noexcept { return C_; }  // E|Ŷ∞|
  std::size_t states() const noexcept { return states_.size(); }

 private:
  struct State {
    std::vector<std::int32_t> offsets;
    double weight;  // normalized
  };
  std::vector<State> states_;
  double c_ = 0.0;
  double C_ = 0.0;
};

/// Weighted mean of shifted_overlap_count over the samples, with a
/// batch-means error. Checks c|x| <= ĥ(x) <= C|x| and throws std::logic_error
/// if it fails. Returns exactly 0 for an empty x.
EstimatorReport estimate_h(std::span<const HatYSample> samples, const Config& x);

struct MartingalePoint {
  double time = 0.0;
  Summary value;  // h(X'_t) over replicates
  double z = 0.0;  // (mean - h(x0)) / stderr; 0 when both sides agree exactly
};

struct MartingaleResult {
  double h0 = 0.0;
  std::vector<MartingalePoint> points;
};

/// Simulates X' from x0 and reports the z-score of h(X'_t) - h(x0) at each
/// recorded time. x0 must be finite and on the lattice of the table.
MartingaleResult martingale_test(const RateTable& dual_rt, const HarmonicFunction& h, const Config& x0,
                                 std::span<const double> times, std::size_t replicates,
                                 std::uint64_t seed, unsigned jobs = 0);

struct CurvePoint {
  double time = 0.0;
  Summary value;
};

/// Edge-disagreement density P[X_t(i) != X_t(i+1)] on a ring of n sites from
/// product(p), averaged over edges and replicates. Wrap-around effects are
/// small while n is large against sqrt(max time).
std::vector<CurvePoint> clustering_curve(std::shared_ptr<const Dynamics> dynamics, std::int64_t n,
                                         double p, std::span<const double> times,
                                         std::size_t replicates, std::uint64_t seed,
                                         unsigned jobs = 0);

/// Fraction of replicates with X_t != 0 at the horizon. x0 must be finite
/// (or a ring configuration); absorption is detected exactly.
EstimatorReport survival_probability(std::shared_ptr<const Dynamics> dynamics, const Config& x0,
                                     double horizon, std::size_t replicates, std::uint64_t seed,
                                     unsigned jobs = 0);

/// Draws the values of a translation-invariant X_0 at the given offsets.
using InitialLaw = std::function<std::vector<std::uint8_t>(Rng&, std::span<const std::int32_t>)>;

/// Independent Bernoulli(p) values.
InitialLaw product_law(double p);

/// p = E||X_0 Ŷ'∞|| from interface samples of the dual model, averaging
/// `draws_per_sample` independent draws of X_0 for each sample.
EstimatorReport estimate_p(const InitialLaw& law, std::span<const HatYSample> dual_samples,
                           std::uint64_t seed, std::size_t draws_per_sample = 1);

struct ScanOptions {
  std::uint64_t events = 100000;  // per replica
  std::size_t replicas = 20;
  std::int64_t cap = 512;
  std::uint64_t seed = 0;
  unsigned jobs = 0;
  int range = 2;             // R for Neuhauser-Pacala and affine models
  double growth_z = 3.0;     // drift z-score above which growth is flagged
  double growth_ratio = 1.1; // and the minimum late/mid ratio of E|Ŷ|
};

enum class ScanVerdict { Growth, Tight, Inconclusive };
std::string to_string(ScanVerdict v);

struct ScanPoint {
  double alpha = 0.0;
  double mean_mid = 0.0;   // time-averaged |Ŷ| over the third quarter of events
  double mean_late = 0.0;  // and over the last quarter
  double drift_z = 0.0;    // (late - mid) across replicas, in standard errors
  double p_delta0 = 0.0;   // occupation of δ0 over the second half
  double cap_abort_fraction = 0.0;
  ScanVerdict verdict = ScanVerdict::Inconclusive;
};

struct ScanResult {
  std::vector<ScanPoint> points;
  /// [largest growth alpha, smallest tight alpha] when the first lies below
  /// the second.
  std::optional<std::pair<double, double>> bracket;
};

/// Runs `replicas` interface simulations of `events` events at each alpha.
ScanResult alpha_scan(FlipModelKind kind, std::span<const double> alphas, const ScanOptions& opt);

}  // namespace canlab::mc
