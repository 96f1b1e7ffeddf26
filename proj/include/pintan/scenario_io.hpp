#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

#include "pintan/sim.hpp"

namespace pintan {

struct ScenarioLoadOptions {
    std::optional<std::uint64_t> seed_override;
};

/// Parses and validates a scenario document. Unknown keys are rejected at
/// every level. Throws ScenarioInvalid naming the offending key.
Scenario parse_scenario(std::string_view text, const ScenarioLoadOptions& options = {});
Scenario load_scenario_file(const std::string& path, const ScenarioLoadOptions& options = {});

/// Full document with every key spelled out; parse_scenario reads it back
/// to an equal Scenario.
std::string scenario_to_json(const Scenario& scenario, int indent = 2);

} // namespace pintan
