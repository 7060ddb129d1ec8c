#include "ctmdp/io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "ctmdp/error.hpp"

#ifndef CTMDP_VERSION_STRING
#define CTMDP_VERSION_STRING "0.0.0"
#endif

namespace ctmdp {
namespace {

const json& require(const json& doc, const char* key) {
    if (!doc.is_object() || !doc.contains(key)) {
        throw ModelFormatError(std::string("model document is missing field '") + key + "'");
    }
    return doc.at(key);
}

double as_real(const json& value, const std::string& where) {
    if (!value.is_number()) throw ModelFormatError(where + " must be a number");
    return value.get<double>();
}

std::size_t as_count(const json& value, const std::string& where) {
    if (!value.is_number_integer() || value.get<long long>() <= 0) {
        throw ModelFormatError(where + " must be a positive integer");
    }
    return value.get<std::size_t>();
}

std::vector<double> read_matrix(const json& value, std::size_t rows, std::size_t cols,
                                const std::string& name) {
    if (!value.is_array() || value.size() != rows) {
        throw ModelFormatError(name + " must have " + std::to_string(rows) + " rows");
    }
    std::vector<double> out;
    out.reserve(rows * cols);
    for (std::size_t i = 0; i < rows; ++i) {
        const auto& row = value[i];
        if (!row.is_array() || row.size() != cols) {
            throw ModelFormatError(name + "[" + std::to_string(i) + "] must have " +
                                   std::to_string(cols) + " entries");
        }
        for (const auto& x : row) out.push_back(as_real(x, name));
    }
    return out;
}

}  // namespace

std::string tool_version() { return std::string("ctmdp ") + CTMDP_VERSION_STRING; }

CtmdpModel model_from_json(const json& doc) {
    const std::size_t S = as_count(require(doc, "num_states"), "num_states");
    const std::size_t A = as_count(require(doc, "num_actions"), "num_actions");
    const double lambda_min = as_real(require(doc, "lambda_min"), "lambda_min");
    const double lambda_max = as_real(require(doc, "lambda_max"), "lambda_max");
    auto reward = read_matrix(require(doc, "reward"), S, A, "reward");
    auto rate = read_matrix(require(doc, "rate"), S, A, "rate");

    const json& tr = require(doc, "transition");
    if (!tr.is_array() || tr.size() != S) throw ModelFormatError("transition must have S entries");
    std::vector<double> transition;
    transition.reserve(S * A * S);
    for (std::size_t s = 0; s < S; ++s) {
        auto block = read_matrix(tr[s], A, S, "transition[" + std::to_string(s) + "]");
        transition.insert(transition.end(), block.begin(), block.end());
    }

    CtmdpModel::Support support;
    if (doc.contains("support")) {
        const json& sp = doc.at("support");
        if (!sp.is_array() || sp.size() != S) throw ModelFormatError("support must have S entries");
        for (std::size_t s = 0; s < S; ++s) {
            if (!sp[s].is_array() || sp[s].size() != A) {
                throw ModelFormatError("support[" + std::to_string(s) + "] must have A entries");
            }
            for (std::size_t a = 0; a < A; ++a) {
                std::vector<std::size_t> states;
                for (const auto& j : sp[s][a]) {
                    if (!j.is_number_integer() || j.get<long long>() < 0) {
                        throw ModelFormatError("support entries must be state indices");
                    }
                    states.push_back(j.get<std::size_t>());
                }
                support.push_back(std::move(states));
            }
        }
    }
    return CtmdpModel(S, A, lambda_min, lambda_max, std::move(reward), std::move(rate),
                      std::move(transition), std::move(support));
}

json model_to_json(const CtmdpModel& model) {
    const std::size_t S = model.num_states();
    const std::size_t A = model.num_actions();
    json reward = json::array();
    json rate = json::array();
    json transition = json::array();
    json support = json::array();
    for (std::size_t s = 0; s < S; ++s) {
        json r_row = json::array(), l_row = json::array(), t_block = json::array(),
             s_row = json::array();
        for (std::size_t a = 0; a < A; ++a) {
            r_row.push_back(model.reward(s, a));
            l_row.push_back(model.rate(s, a));
            auto p = model.transition(s, a);
            t_block.push_back(std::vector<double>(p.begin(), p.end()));
            auto sup = model.support(s, a);
            s_row.push_back(std::vector<std::size_t>(sup.begin(), sup.end()));
        }
        reward.push_back(std::move(r_row));
        rate.push_back(std::move(l_row));
        transition.push_back(std::move(t_block));
        support.push_back(std::move(s_row));
    }
    return json{{"num_states", S},       {"num_actions", A},     {"lambda_min", model.lambda_min()},
                {"lambda_max", model.lambda_max()}, {"reward", reward}, {"rate", rate},
                {"transition", transition},         {"support", support}};
}

json load_json(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot open " + path.string());
    try {
        return json::parse(in);
    } catch (const json::parse_error& e) {
        throw ModelFormatError(path.string() + ": " + e.what());
    }
}

CtmdpModel load_model(const std::filesystem::path& path) {
    try {
        return model_from_json(load_json(path));
    } catch (const json::exception& e) {
        throw ModelFormatError(path.string() + ": " + e.what());
    }
}

void write_text(const std::filesystem::path& path, const std::string& text) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out) throw InputError("cannot write " + path.string());
    out << text;
}

json policy_to_json(const Policy& policy) { return json(policy.action); }

json validation_to_json(const ValidationReport& report) {
    json violations = json::array();
    for (const auto& v : report.violations) {
        json entry{{"kind", v.kind}, {"message", v.message}};
        entry["state"] = v.state ? json(*v.state) : json(nullptr);
        entry["action"] = v.action ? json(*v.action) : json(nullptr);
        entry["policy"] = v.policy ? policy_to_json(*v.policy) : json(nullptr);
        violations.push_back(std::move(entry));
    }
    return json{{"valid", report.valid()},
                {"irreducibility_check", report.irreducibility_mode == IrreducibilityCheck::exhaustive
                                             ? "exhaustive"
                                             : "communicating"},
                {"violations", violations},
                {"warnings", report.warnings}};
}

json solution_to_json(const AverageRewardSolution& solution) {
    return json{{"rho_star", solution.gain},
                {"h_star", solution.bias},
                {"policy", policy_to_json(solution.greedy_policy)},
                {"residual", solution.residual},
                {"tolerance", solution.tolerance},
                {"sweeps", solution.sweeps}};
}

json gaps_to_json(const CtmdpModel& model, const GapQuantities& gaps) {
    json phi = json::array();
    json optimal = json::array();
    for (std::size_t s = 0; s < model.num_states(); ++s) {
        json row = json::array(), opt = json::array();
        for (std::size_t a = 0; a < model.num_actions(); ++a) {
            row.push_back(gaps.phi_at(s, a));
            opt.push_back(gaps.is_optimal(s, a));
        }
        phi.push_back(std::move(row));
        optimal.push_back(std::move(opt));
    }
    return json{{"phi", phi},
                {"optimal", optimal},
                {"gap_g", gaps.gap_g ? json(*gaps.gap_g) : json(nullptr)},
                {"bias_span", gaps.bias_span},
                {"diameter", gaps.diameter ? json(*gaps.diameter) : json(nullptr)}};
}

json constants_to_json(const CtmdpModel& model, const GapQuantities& gaps, const InstanceConstants& constants) {
    json pairs = json::array();
    for (std::size_t s = 0; s < model.num_states(); ++s) {
        for (std::size_t a = 0; a < model.num_actions(); ++a) {
            const auto& k = constants.K_at(s, a);
            json entry{{"state", s},
                       {"action", a},
                       {"phi", gaps.phi_at(s, a)},
                       {"optimal", gaps.is_optimal(s, a)},
                       {"critical", constants.is_critical(s, a)}};
            if (!gaps.is_optimal(s, a)) {
                entry["K"] = k.feasible ? json(k.value) : json(nullptr);
                entry["theta"] = k.feasible ? json(k.theta) : json(nullptr);
                entry["q"] = k.q;
                entry["grid_points"] = k.grid_points;
                entry["evaluations"] = k.evaluations;
                entry["dual_residual"] = k.dual_residual;
            }
            pairs.push_back(std::move(entry));
        }
    }
    return json{{"pairs", pairs},
                {"C_of_M", constants.C_of_M},
                {"C_upper", constants.C_upper},
                {"C_regret_bound", constants.C_regret_bound},
                {"C_of_M_within_upper", constants.upper_bound_holds},
                {"bias_span", constants.bias_span},
                {"diameter", constants.diameter},
                {"grid_resolution", constants.grid_resolution}};
}

std::string format_real(double value) {
    char buffer[40];
    std::snprintf(buffer, sizeof buffer, "%.17g", value);
    return buffer;
}

}  // namespace ctmdp
