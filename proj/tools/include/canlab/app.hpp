#pragma once

// Command line front end: experiment specs, the randomized algebra suite and
// the subcommand dispatcher. Linked by the executable, the CLI tests and the
// acceptance suite.

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace canlab::app {

enum ExitCode : int {
  kSuccess = 0,
  kValidationError = 2,
  kVerificationFailure = 3,
  kInconclusive = 4,
};

struct AlgebraReport {
  std::size_t operators = 0;
  std::size_t configs_per_operator = 0;
  std::size_t checks = 0;
  std::size_t failures = 0;
  std::vector<std::string> first_failures;  // at most 10 messages

  bool passed() const noexcept { return failures == 0; }
};

/// Randomized exact checks of psi: bijection, adjoint exchange and
/// conjugation of grad on `configs` random configurations per operator.
/// `corrupt_psi` toggles one entry of every psi image (negative control).
AlgebraReport verify_algebra(std::size_t operators, std::size_t configs, std::uint64_t seed,
                             bool corrupt_psi = false);

/// Subcommand names accepted by `run --command` and as top-level commands.
const std::vector<std::string>& command_names();

/// Fills defaults and validates a spec object (flat keys, "command" set).
/// Throws canlab::ValidationError on schema violations.
nlohmann::json resolve_spec(const nlohmann::json& spec);

/// Entry point shared by the executable and the tests; args exclude argv[0].
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace canlab::app
