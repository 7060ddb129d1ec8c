#pragma once

#include <filesystem>
#include <string>

#include <nlohmann/json.hpp>

#include "ctmdp/lower_bound.hpp"
#include "ctmdp/model.hpp"
#include "ctmdp/planning.hpp"

namespace ctmdp {

using json = nlohmann::json;

/// Version string embedded in every output file.
std::string tool_version();

/// Parse the model document: num_states, num_actions, lambda_min, lambda_max,
/// reward (S x A), rate (S x A), transition (S x A x S), optional support.
/// Throws ModelFormatError on missing fields or wrong shapes.
CtmdpModel model_from_json(const json& doc);
json model_to_json(const CtmdpModel& model);

CtmdpModel load_model(const std::filesystem::path& path);
json load_json(const std::filesystem::path& path);
void write_text(const std::filesystem::path& path, const std::string& text);

json policy_to_json(const Policy& policy);
json validation_to_json(const ValidationReport& report);
json solution_to_json(const AverageRewardSolution& solution);
json gaps_to_json(const CtmdpModel& model, const GapQuantities& gaps);
/// Per-pair phi, K (null when infinite), B(M) membership and solver metadata,
/// then C(M), C_upper and C_regret_bound.
json constants_to_json(const CtmdpModel& model, const GapQuantities& gaps, const InstanceConstants& constants);

/// %.17g rendering used for every CSV field.
std::string format_real(double value);

}  // namespace ctmdp
