#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace canlab::app {

struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<nlohmann::json>> rows;
};

struct CommandResult {
  nlohmann::json report = nlohmann::json::object();
  std::optional<Table> table;
  int exit_code = 0;
  std::vector<std::string> warnings;
};

/// Runs a resolved spec. Results depend only on the spec and the seed, never
/// on `jobs`.
CommandResult execute(const nlohmann::json& spec, std::uint64_t seed, unsigned jobs);

}  // namespace canlab::app
