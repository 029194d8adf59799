#pragma once

#include <string>

#include "json.hpp"
#include "mec/model.hpp"
#include "mec/scenario.hpp"

namespace mec {

using Json = nlohmann::ordered_json;

Json instance_to_json(const Instance& instance);
// Throws std::invalid_argument on missing or mistyped fields and on
// instances that fail validation.
Instance instance_from_json(const Json& doc);

Json config_to_json(const ScenarioConfig& config);
// Missing fields keep their defaults; unknown fields are rejected.
ScenarioConfig config_from_json(const Json& doc);

// Assignment, slots, objective, per-node energy and, for feasible binary
// solutions, the simulated schedule.
Json solution_to_json(const Solution& solution, const Instance& instance);

// Reads and parses a whole file; throws std::invalid_argument with the path
// on I/O or syntax errors.
Json read_json_file(const std::string& path);

}  // namespace mec
