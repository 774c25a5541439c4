#pragma once

#include <optional>
#include <string>

#include "cargo/domain.hpp"

namespace cargo {

/// Parses a scenario document (JSON text). Throws ConfigError with the
/// offending field on malformed input.
ScenarioSpec parse_scenario(const std::string& json_text, const std::string& name = "custom");
ScenarioSpec load_scenario_file(const std::string& path);

/// Experiment factors that override whatever the scenario source specifies.
struct ScenarioFactors {
  std::optional<double> pf;
  std::optional<double> c_over_d;
  std::optional<double> cv;
};

/// "toy-m3" / "real-m27" or a path to a JSON file, with factors applied.
/// Built-ins default to pf = 1, C/D = 0.8, cv = 0.2 for unset factors.
ScenarioSpec resolve_scenario(const std::string& source, const ScenarioFactors& factors);

bool is_builtin_scenario(const std::string& source);

}  // namespace cargo
