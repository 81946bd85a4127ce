#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "modal/scenarios.hpp"
#include "modal/trace.hpp"

namespace modal {

using ScenarioConfig = std::variant<ChicaneConfig, SolarConfig, ManifoldConfig, CustomConfig>;

/// A scenario file after parsing and validation.
struct Scenario {
  std::string kind;
  std::uint64_t seed = 0;
  std::size_t steps = 0;
  ScenarioConfig config;
};

struct ValidationReport {
  std::vector<std::string> errors;
  std::vector<std::string> warnings;

  bool ok() const noexcept { return errors.empty(); }
};

/// Checks a scenario file and itemizes every problem found. Nerve, threshold,
/// refinement and parameter problems are errors; transition-table gaps are
/// warnings. Throws Error(ParseError) when the text is not JSON or a field has
/// the wrong JSON type.
ValidationReport validate_scenario(std::string_view text);

/// Throws Error(ParseError) as above and Error(ConfigInvalid) listing the
/// errors of validate_scenario.
Scenario load_scenario(std::string_view text);

/// Runs the scenario, optionally overriding its seed and step count.
Trace run_scenario(const Scenario& scenario, std::optional<std::uint64_t> seed = std::nullopt,
                   std::optional<std::size_t> steps = std::nullopt);

/// Reads a whole file. Throws Error(Io).
std::string read_file(const std::string& path);

/// Parses a standalone nerve declaration {"vertices": [...], "simplices": [[...]]}.
/// Throws Error(ParseError) or the nerve's construction errors.
Nerve parse_nerve(std::string_view text);
/// Parses {"mode": score, ...}. Throws Error(ParseError) or Error(ScoreOutOfRange).
ScoreVector parse_scores(std::string_view text);

}  // namespace modal
