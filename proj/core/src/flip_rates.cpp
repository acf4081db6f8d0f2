#include "canlab/flip_rates.hpp"

#include <vector>

#include "canlab/error.hpp"

namespace canlab {

std::string to_string(FlipModelKind kind) {
  switch (kind) {
    case FlipModelKind::NeuhauserPacala:
      return "neuhauser-pacala";
    case FlipModelKind::Affine:
      return "affine";
    case FlipModelKind::Rebellious:
      return "rebellious";
  }
  return "unknown";
}

FlipRateModel FlipRateModel::make(FlipModelKind kind, double alpha, int range) {
  if (!(alpha >= 0.0 && alpha <= 1.0)) throw ValidationError("alpha must lie in [0, 1]");
  if (kind != FlipModelKind::Rebellious && range < 2)
    throw ValidationError("Neuhauser-Pacala and affine models need R >= 2");
  return {kind, alpha, kind == FlipModelKind::Rebellious ? 2 : range};
}

LocalFrequency local_frequency(const Config& x, DoubledIndex i, bool tau, int range) {
  if (range < 1) throw ValidationError("range must be positive");
  if (x.is_ring() && x.lattice().ring_size < 2 * range + 1)
    throw ValidationError("ring too small for the requested neighbourhood");
  int k = 0;
  for (int d = 1; d <= range; ++d) {
    k += x.at(i.shifted(-d)) == tau;
    k += x.at(i.shifted(d)) == tau;
  }
  return {k, 2 * range};
}

double flip_rate_from_neighbourhood(const FlipRateModel& model, std::span<const std::uint8_t> bits) {
  const int r = model.radius();
  const bool self = bits[static_cast<std::size_t>(r)] != 0;
  const double a = model.alpha;
  if (model.kind == FlipModelKind::Rebellious) {
    auto differ = [&](int j, int k) -> int {
      return bits[static_cast<std::size_t>(r + j)] != bits[static_cast<std::size_t>(r + k)];
    };
    const int near = differ(-1, 0) + differ(0, 1);
    const int far = differ(-2, -1) + differ(1, 2);
    return 0.5 * a * near + 0.5 * (1.0 - a) * far;
  }
  // Frequency of the opposite type ("other") and of the own type ("same").
  int other = 0;
  for (int d = 1; d <= r; ++d) {
    other += (bits[static_cast<std::size_t>(r - d)] != 0) != self;
    other += (bits[static_cast<std::size_t>(r + d)] != 0) != self;
  }
  const double f_other = static_cast<double>(other) / (2 * r);
  const double f_same = static_cast<double>(2 * r - other) / (2 * r);
  if (model.kind == FlipModelKind::NeuhauserPacala) return f_other * (f_same + a * f_other);
  return a * f_other + (1.0 - a) * (other > 0 ? 1.0 : 0.0);
}

double flip_rate(const FlipRateModel& model, const Config& x, DoubledIndex i) {
  const int r = model.radius();
  if (x.is_ring() && x.lattice().ring_size < 2 * r + 1)
    throw ValidationError("ring too small for the model neighbourhood");
  std::vector<std::uint8_t> bits(static_cast<std::size_t>(2 * r + 1));
  for (int d = -r; d <= r; ++d) bits[static_cast<std::size_t>(d + r)] = x.at(i.shifted(d));
  return flip_rate_from_neighbourhood(model, bits);
}

}  // namespace canlab
