#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "ulsim/scenario/scenario.hpp"

namespace ulsim::scenario {

/// Parses and validates a scenario document. Unknown keys, missing required
/// sections and type errors raise ConfigError with a "line N:" prefix.
Scenario parse_scenario(std::string_view text);
Scenario load_scenario_file(const std::string& path);

/// Resolves a bare name (e.g. "e2e_lab") against the bundled scenario directory.
std::string resolve_scenario_path(const std::string& name_or_path);
std::vector<std::string> bundled_scenarios();

}  // namespace ulsim::scenario
