#pragma once

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "awf/boundary.hpp"
#include "awf/bounds.hpp"
#include "awf/cone.hpp"
#include "awf/pl_fn.hpp"
#include "awf/simulate.hpp"

namespace awf {

// One instance file: trend + boundary (+ optional gamma(s) and simulation
// settings).  gammas is empty when the file does not mention gamma.
struct Instance {
    AdditiveFn trend;
    Boundary boundary;
    std::vector<double> gammas;
    std::optional<SimConfig> sim;
};

nlohmann::json scalar_to_json(const ScalarPLF& f);
ScalarPLF scalar_from_json(const nlohmann::json& j);

nlohmann::json additive_to_json(const AdditiveFn& f);
AdditiveFn additive_from_json(const nlohmann::json& j);

nlohmann::json boundary_to_json(const Boundary& u);
Boundary boundary_from_json(const nlohmann::json& j);

nlohmann::json sim_config_to_json(const SimConfig& c);
SimConfig sim_config_from_json(const nlohmann::json& j);

nlohmann::json mc_estimate_to_json(const MCEstimate& e);
MCEstimate mc_estimate_from_json(const nlohmann::json& j);

nlohmann::json cone_decomposition_to_json(const ConeDecomposition& d);
nlohmann::json bounds_report_to_json(const BoundsReport& r);

// Throws std::invalid_argument whose message starts with "parse error at"
// for malformed JSON, and a validation message for well-formed JSON that does
// not describe a valid instance.
Instance parse_instance_text(const std::string& text);
Instance parse_instance_file(const std::string& path);

}  // namespace awf
