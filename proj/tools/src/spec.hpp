#pragma once

// Experiment spec schema and the model objects a resolved spec describes.

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "canlab/flip_rates.hpp"
#include "canlab/gf2.hpp"
#include "canlab/rate_table.hpp"
#include "canlab/simulator.hpp"

namespace canlab::app {

using nlohmann::json;

enum class ParamType { Number, Integer, String, Bool, NumberList, Config, ConfigList, Object };

struct ParamSpec {
  std::string key;
  ParamType type;
  json default_value;  // null means "no default"
  std::string help;
};

/// Parameters accepted by a command, excluding "command" and "seed".
const std::vector<ParamSpec>& command_params(const std::string& command);

/// Whether the command reads the model keys (model, alpha, range, table).
bool command_uses_model(const std::string& command);

/// Parses a command-line string for a parameter of the given type.
json parse_flag_value(ParamType type, const std::string& text);

/// The model named by a resolved spec.
struct Model {
  std::string kind;  // voter, rebellious, disagreement, neuhauser-pacala, affine, table
  std::optional<RateTable> table;      // cancellative models
  std::optional<FlipRateModel> flips;  // flip-rate models without a table

  bool has_table() const noexcept { return table.has_value(); }
  /// The X dynamics: the table when there is one, else site flips.
  std::shared_ptr<const mc::Dynamics> x_dynamics() const;
  /// Throws ValidationError naming `command` when the model has no table.
  const RateTable& require_table(const std::string& command) const;
};

Model build_model(const json& spec);

/// JSON rate table: {"lattice": "Z" | "Z+1/2", "range": R,
/// "entries": [{"shape": [[row, col], ...], "rate": r}]} with coordinates in
/// doubled units, e.g. [[0,-2],[0,0]] for {(0,-1),(0,0)}.
RateTable parse_table(const json& j);

/// Config literal {"lattice": "Z" | "Z+1/2", "offset": k, "bits": "1101",
/// "left": 0, "right": 0}, or a plain bit string at offset 0. `lattice`
/// supplies the default lattice and the ring size.
Config parse_config(const json& j, LatticeTag lattice);

json config_to_json(const Config& x);

}  // namespace canlab::app
