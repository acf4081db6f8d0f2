#pragma once

// Direct flip-rate descriptions of the neutral Neuhauser-Pacala, affine voter
// and rebellious voter models. These are simulated site by site; only the
// rebellious model also has a cancellative table (rebellious_table).

#include <cstdint>
#include <span>
#include <string>

#include "canlab/gf2.hpp"

namespace canlab {

enum class FlipModelKind : std::uint8_t { NeuhauserPacala, Affine, Rebellious };

std::string to_string(FlipModelKind kind);

struct FlipRateModel {
  FlipModelKind kind = FlipModelKind::Rebellious;
  double alpha = 1.0;
  int range = 2;  // R for NP/affine; the rebellious neighbourhood is fixed at 2

  /// Validates alpha in [0,1] and R >= 2.
  static FlipRateModel make(FlipModelKind kind, double alpha, int range = 2);

  /// Half-width of the neighbourhood the rate depends on.
  int radius() const noexcept { return kind == FlipModelKind::Rebellious ? 2 : range; }
};

/// count / total with total = 2R.
struct LocalFrequency {
  int count = 0;
  int total = 1;
  double value() const noexcept { return static_cast<double>(count) / total; }
};

/// f_tau(x, i): fraction of the 2R sites at distance 1..R from i of type tau.
LocalFrequency local_frequency(const Config& x, DoubledIndex i, bool tau, int range);

/// Flip rate of site i in state x. For NP and affine the formula is the 0->1
/// rate; sites of type 1 use it with the two types interchanged.
double flip_rate(const FlipRateModel& model, const Config& x, DoubledIndex i);

/// Same, from the neighbourhood bits x(i - r), ..., x(i + r) with r = radius().
double flip_rate_from_neighbourhood(const FlipRateModel& model, std::span<const std::uint8_t> bits);

}  // namespace canlab
