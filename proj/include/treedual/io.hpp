#pragma once

#include <string>
#include <vector>

#include "treedual/scenario.hpp"
#include "treedual/utility.hpp"

namespace treedual {

// A scenario file: market, utility field, and optional query lists the CLI
// runs when no point is given on the command line.
struct ScenarioFile {
    MarketScenario scenario;
    UtilityField field;
    std::vector<double> query_x;
    std::vector<std::vector<double>> query_q;
    std::vector<double> query_y;
    std::vector<std::vector<double>> query_r;
};

// Parses the JSON scenario format (see docs/scenario_format.md).  Keys are
// order-insensitive; unknown keys are rejected.  Throws ParseError with a
// path to the offending field.
ScenarioFile parse_scenario(const std::string& text);

ScenarioFile load_scenario(const std::string& path);

// Canonical serialization: sorted keys, fixed float formatting.  Parsing
// the output yields an equal model.
std::string serialize_scenario(const ScenarioFile& file);

// FNV-1a hash of the canonical serialization, hex-encoded.  Stable under
// key reordering of the input file.
std::string scenario_digest(const ScenarioFile& file);

}  // namespace treedual
