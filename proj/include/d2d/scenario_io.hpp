#pragma once

#include <string>

#include <json.hpp>

#include "d2d/network.hpp"

namespace d2d {

// Scenario files are JSON. Required fields: L, K, Q, p_c, power_levels,
// positions. Optional: seed, price, pathloss, fading, gains. Any field not
// in the schema is an error, at every nesting level.
ScenarioConfig parse_scenario_config(const nlohmann::json& j);
ScenarioConfig load_scenario_config(const std::string& path);

nlohmann::json scenario_config_to_json(const ScenarioConfig& config);
void save_scenario_config(const ScenarioConfig& config,
                          const std::string& path);

}  // namespace d2d
