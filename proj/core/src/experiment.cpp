#include "ctmdp/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "ctmdp/error.hpp"
#include "ctmdp/io.hpp"
#include "ctmdp/learner.hpp"
#include "ctmdp/parallel.hpp"
#include "ctmdp/planning.hpp"
#include "ctmdp/random.hpp"

namespace ctmdp {
namespace {

std::string canonical_agent(const std::string& kind) {
    if (kind == "ct-ucrl" || kind == "ct_ucrl") return "ct-ucrl";
    if (kind == "greedy_no_optimism" || kind == "greedy-no-optimism") return "greedy_no_optimism";
    if (kind == "uniform_random" || kind == "uniform-random") return "uniform_random";
    throw InputError("unknown agent '" + kind + "'");
}

DeltaSetting delta_from_json(const json& node) {
    if (node.is_string()) return parse_delta(node.get<std::string>());
    if (node.is_number()) return {false, node.get<double>()};
    throw InputError("delta must be a number or \"one-over-n\"");
}

json delta_to_json(const DeltaSetting& setting) {
    return setting.one_over_n ? json("one-over-n") : json(setting.value);
}

double horizon_length(const Horizon& h) {
    return h.kind == Horizon::Kind::time ? h.time : static_cast<double>(h.steps);
}

}  // namespace

DeltaSetting parse_delta(const std::string& text) {
    if (text == "one-over-n" || text == "one_over_n" || text == "1/n") return {true, 0.0};
    try {
        std::size_t used = 0;
        const double value = std::stod(text, &used);
        if (used != text.size()) throw InputError("bad delta '" + text + "'");
        return {false, value};
    } catch (const std::logic_error&) {
        throw InputError("bad delta '" + text + "'");
    }
}

double resolve_delta(const DeltaSetting& setting, const Horizon& horizon, double lambda_max) {
    if (!setting.one_over_n) {
        if (!(setting.value > 0.0 && setting.value < 1.0)) throw InvalidDelta(setting.value);
        return setting.value;
    }
    const double n = horizon.kind == Horizon::Kind::steps ? static_cast<double>(horizon.steps)
                                                          : std::ceil(lambda_max * horizon.time);
    return 1.0 / std::max(2.0, n);
}

ExperimentConfig experiment_config_from_json(const json& doc, const std::filesystem::path& base_dir) {
    ExperimentConfig config;
    try {
        if (!doc.is_object()) throw InputError("experiment config must be a JSON object");
        if (!doc.contains("model")) throw InputError("experiment config needs a model");
        const json& model = doc.at("model");
        if (model.is_string()) {
            config.model_path = model.get<std::string>();
        } else if (model.contains("path")) {
            config.model_path = model.at("path").get<std::string>();
        } else if (model.contains("generator")) {
            config.generator = generator_spec_from_json(model.at("generator"));
        } else if (model.contains("inline")) {
            config.inline_model = model.at("inline");
        } else {
            throw InputError("model must give a path, a generator or an inline model");
        }
        if (config.model_path && config.model_path->is_relative() && !base_dir.empty()) {
            config.model_path = base_dir / *config.model_path;
        }

        if (doc.contains("agents")) {
            config.agents.clear();
            for (const auto& a : doc.at("agents")) {
                AgentSpec spec;
                if (a.is_string()) {
                    spec.kind = canonical_agent(a.get<std::string>());
                } else {
                    spec.kind = canonical_agent(a.at("name").get<std::string>());
                    if (a.contains("delta")) spec.delta = delta_from_json(a.at("delta"));
                }
                config.agents.push_back(spec);
            }
        }
        if (doc.contains("delta")) config.delta = delta_from_json(doc.at("delta"));

        if (doc.contains("horizon")) {
            const json& h = doc.at("horizon");
            if (h.contains("time") == h.contains("steps")) {
                throw InputError("horizon needs exactly one of time or steps");
            }
            config.horizon = h.contains("time") ? Horizon::of_time(h.at("time").get<double>())
                                                : Horizon::of_steps(h.at("steps").get<std::uint64_t>());
        }
        if (doc.contains("seeds")) {
            const json& s = doc.at("seeds");
            if (s.is_number()) {
                config.seed_count = s.get<std::size_t>();
            } else {
                config.seed_count = s.value("count", config.seed_count);
                config.base_seed = s.value("base", config.base_seed);
            }
        }
        if (doc.contains("checkpoints")) {
            const json& c = doc.at("checkpoints");
            if (c.is_array()) {
                config.checkpoints = c.get<std::vector<double>>();
            } else {
                config.checkpoint_count = c.value("geometric", config.checkpoint_count);
            }
        }
        config.initial_state = doc.value("initial_state", config.initial_state);
        config.tol = doc.value("tol", config.tol);
        config.grid_resolution = doc.value("grid_resolution", config.grid_resolution);
        config.lower_bound = doc.value("lower_bound", config.lower_bound);
        config.write_trajectories = doc.value("trajectories", config.write_trajectories);
        config.jobs = doc.value("jobs", config.jobs);
        if (doc.contains("out")) config.out_dir = doc.at("out").get<std::string>();
    } catch (const json::exception& e) {
        throw InputError(std::string("bad experiment config: ") + e.what());
    }
    return config;
}

json experiment_config_to_json(const ExperimentConfig& config) {
    json doc;
    if (config.model_path) {
        doc["model"] = {{"path", config.model_path->generic_string()}};
    } else if (config.generator) {
        doc["model"] = {{"generator", generator_spec_to_json(*config.generator)}};
    } else if (config.inline_model) {
        doc["model"] = {{"inline", *config.inline_model}};
    }
    json agents = json::array();
    for (const auto& a : config.agents) {
        json entry = {{"name", a.kind}};
        if (a.delta) entry["delta"] = delta_to_json(*a.delta);
        agents.push_back(entry);
    }
    doc["agents"] = agents;
    doc["delta"] = delta_to_json(config.delta);
    doc["horizon"] = config.horizon.kind == Horizon::Kind::time ? json{{"time", config.horizon.time}}
                                                                 : json{{"steps", config.horizon.steps}};
    doc["seeds"] = {{"count", config.seed_count}, {"base", config.base_seed}};
    if (config.checkpoints.empty()) {
        doc["checkpoints"] = {{"geometric", config.checkpoint_count}};
    } else {
        doc["checkpoints"] = config.checkpoints;
    }
    doc["initial_state"] = config.initial_state;
    doc["tol"] = config.tol;
    doc["grid_resolution"] = config.grid_resolution;
    doc["lower_bound"] = config.lower_bound;
    doc["trajectories"] = config.write_trajectories;
    return doc;
}

void check_experiment_config(const ExperimentConfig& config) {
    if (config.seed_count < 1) throw InputError("seeds must be at least 1");
    if (config.agents.empty()) throw InputError("no agents configured");
    if (config.horizon.kind == Horizon::Kind::time && !(config.horizon.time >= 0.0)) {
        throw InputError("horizon time must be nonnegative");
    }
    if (!(config.tol > 0.0)) throw InputError("tol must be positive");
    if (!(config.grid_resolution > 0.0)) throw InputError("grid_resolution must be positive");
    for (const auto& a : config.agents) {
        canonical_agent(a.kind);
        const DeltaSetting d = a.delta.value_or(config.delta);
        if (!d.one_over_n && !(d.value > 0.0 && d.value < 1.0)) throw InvalidDelta(d.value);
    }
}

CtmdpModel load_experiment_model(const ExperimentConfig& config) {
    if (config.model_path) return load_model(*config.model_path);
    if (config.generator) return generate(*config.generator);
    if (config.inline_model) return model_from_json(*config.inline_model);
    throw InputError("experiment config has no model source");
}

std::unique_ptr<Agent> make_agent(const AgentSpec& spec, const CtmdpModel& model, double delta,
                                  std::uint64_t seed, std::size_t initial_state) {
    const std::string kind = canonical_agent(spec.kind);
    if (kind == "uniform_random") {
        return std::make_unique<UniformRandomAgent>(model.num_actions(), stream_seed(seed, 1));
    }
    return std::make_unique<CtUcrl>(
        LearnerConfig::from_model(model, delta, initial_state, kind == "ct-ucrl"));
}

ExperimentResult run_experiment(const ExperimentConfig& config) {
    check_experiment_config(config);
    ExperimentResult result;
    result.config = config;
    const CtmdpModel model = load_experiment_model(config);
    result.model = model;
    const auto report = validate_model(model);
    if (!report.valid()) throw ModelFormatError("model failed validation: " + report.violations.front().message);
    if (config.initial_state >= model.num_states()) throw InputError("initial state out of range");

    const auto solution = solve_average_reward(model, std::min(config.tol, kRegretTolerance));
    result.rho_star = solution.gain;
    std::optional<GapQuantities> gaps;
    try {
        gaps = compute_gaps(model, solution);
        result.gap_g = gaps->gap_g;
        result.bias_span = gaps->bias_span;
    } catch (const Error& e) {
        result.notes.push_back(std::string("gaps: ") + e.what());
    }
    try {
        result.diameter = diameter(model, config.tol);
        if (gaps) gaps->diameter = result.diameter;
    } catch (const Error& e) {
        result.notes.push_back(std::string("diameter: ") + e.what());
    }
    if (config.lower_bound && gaps && result.diameter) {
        try {
            result.constants = compute_constants(model, solution, *gaps, config.grid_resolution, config.jobs);
        } catch (const Error& e) {
            result.notes.push_back(std::string("lower bound: ") + e.what());
        }
    }

    const double length = horizon_length(config.horizon);
    std::vector<double> checkpoints = config.checkpoints;
    if (checkpoints.empty() && length > 0.0) checkpoints = geometric_checkpoints(length, config.checkpoint_count);
    checkpoints = effective_checkpoints(std::move(checkpoints), config.horizon);

    const std::size_t A = config.agents.size();
    const std::size_t K = config.seed_count;
    result.agents.resize(A);
    for (std::size_t i = 0; i < A; ++i) {
        result.agents[i].agent = canonical_agent(config.agents[i].kind);
        result.agents[i].delta =
            resolve_delta(config.agents[i].delta.value_or(config.delta), config.horizon, model.lambda_max());
        result.agents[i].runs.resize(K);
    }

    parallel_for(A * K, config.jobs, [&](std::size_t task) {
        const std::size_t ai = task / K;
        const std::size_t k = task % K;
        AgentResult& agent_result = result.agents[ai];
        SeedRun& run = agent_result.runs[k];
        run.seed = config.base_seed + k;
        if (length <= 0.0) return;
        try {
            auto agent = make_agent(config.agents[ai], model, agent_result.delta, run.seed, config.initial_state);
            SimulationOptions options;
            options.seed = run.seed;
            options.initial_state = config.initial_state;
            options.checkpoints = checkpoints;
            options.record_trajectory = config.write_trajectories;
            auto sim = simulate(model, *agent, config.horizon, result.rho_star, options);
            run.regret = std::move(sim.regret);
            run.episodes = sim.episodes;
            run.decisions = sim.trajectory.total_decisions;
            run.trajectory = std::move(sim.trajectory);
        } catch (const std::exception& e) {
            run.ok = false;
            run.error = e.what();
            run.regret.points.clear();
        }
    });

    const double lmax = model.lambda_max();
    for (auto& agent_result : result.agents) {
        std::size_t points = 0;
        for (const auto& run : agent_result.runs) {
            if (run.ok) points = std::max(points, run.regret.points.size());
        }
        for (std::size_t c = 0; c < points; ++c) {
            CheckpointSummary summary;
            summary.checkpoint = c < checkpoints.size() ? checkpoints[c] : 0.0;
            std::vector<double> regrets;
            double time = 0.0;
            double decisions = 0.0;
            for (const auto& run : agent_result.runs) {
                if (!run.ok || c >= run.regret.points.size()) continue;
                const auto& p = run.regret.points[c];
                regrets.push_back(p.regret);
                time += p.time;
                decisions += static_cast<double>(p.decisions);
            }
            summary.runs = regrets.size();
            const double n = static_cast<double>(regrets.size());
            for (double r : regrets) summary.mean_regret += r / n;
            summary.mean_time = time / n;
            summary.mean_decisions = decisions / n;
            if (regrets.size() > 1) {
                double ss = 0.0;
                for (double r : regrets) ss += (r - summary.mean_regret) * (r - summary.mean_regret);
                summary.standard_error = std::sqrt(ss / (n - 1.0) / n);
            }
            summary.regret_over_log = summary.mean_regret / std::log(lmax * summary.mean_time + 2.0);
            agent_result.checkpoints.push_back(summary);
        }
    }
    return result;
}

json experiment_summary(const ExperimentResult& result) {
    json instance = {
        {"num_states", result.model ? result.model->num_states() : 0},
        {"num_actions", result.model ? result.model->num_actions() : 0},
        {"rho_star", result.rho_star},
        {"gap_g", result.gap_g ? json(*result.gap_g) : json(nullptr)},
        {"bias_span", result.bias_span},
        {"diameter", result.diameter ? json(*result.diameter) : json(nullptr)},
    };
    if (result.constants) {
        const auto& c = *result.constants;
        json critical = json::array();
        for (std::size_t i = 0; i < c.critical.size(); ++i) {
            if (!c.critical[i]) continue;
            critical.push_back({{"state", i / c.num_actions},
                                {"action", i % c.num_actions},
                                {"K", c.K[i].value}});
        }
        instance["C_of_M"] = c.C_of_M;
        instance["C_upper"] = c.C_upper;
        instance["C_regret_bound"] = c.C_regret_bound;
        instance["C_of_M_within_upper"] = c.upper_bound_holds;
        instance["critical_pairs"] = critical;
    } else {
        instance["C_of_M"] = nullptr;
        instance["C_upper"] = nullptr;
        instance["C_regret_bound"] = nullptr;
    }

    json agents = json::array();
    for (const auto& a : result.agents) {
        json seeds = json::array();
        json episodes = json::array();
        json failures = json::array();
        for (const auto& run : a.runs) {
            seeds.push_back(run.seed);
            episodes.push_back(run.episodes);
            if (!run.ok) failures.push_back({{"seed", run.seed}, {"error", run.error}});
        }
        json checkpoints = json::array();
        for (const auto& c : a.checkpoints) {
            checkpoints.push_back({{"checkpoint", c.checkpoint},
                                   {"T", c.mean_time},
                                   {"mean_decisions", c.mean_decisions},
                                   {"mean_regret", c.mean_regret},
                                   {"standard_error", c.standard_error},
                                   {"regret_over_log", c.regret_over_log},
                                   {"runs", c.runs}});
        }
        agents.push_back({{"name", a.agent},
                          {"delta", a.delta},
                          {"seeds", seeds},
                          {"episodes", episodes},
                          {"failures", failures},
                          {"checkpoints", checkpoints}});
    }
    return {{"schema", kSummarySchema},
            {"tool_version", tool_version()},
            {"rng", std::string(Rng::kName)},
            {"config", experiment_config_to_json(result.config)},
            {"instance", instance},
            {"notes", result.notes},
            {"agents", agents}};
}

std::string regret_csv(const ExperimentResult& result, const AgentResult& agent) {
    std::ostringstream out;
    const json meta = {{"tool_version", tool_version()},
                       {"agent", agent.agent},
                       {"delta", agent.delta},
                       {"rho_star", result.rho_star},
                       {"config", experiment_config_to_json(result.config)}};
    out << "# " << meta.dump() << '\n' << kRegretCsvHeader << '\n';
    for (const auto& run : agent.runs) {
        if (run.ok) write_regret_rows(out, run.seed, run.regret);
    }
    return out.str();
}

void write_experiment_outputs(const ExperimentResult& result, const std::filesystem::path& out_dir) {
    std::filesystem::create_directories(out_dir);
    for (const auto& agent : result.agents) {
        write_text(out_dir / ("regret_" + agent.agent + ".csv"), regret_csv(result, agent));
        if (!result.config.write_trajectories) continue;
        for (const auto& run : agent.runs) {
            if (!run.ok) continue;
            std::ostringstream out;
            const json meta = {{"tool_version", tool_version()},
                               {"agent", agent.agent},
                               {"seed", run.seed},
                               {"config", experiment_config_to_json(result.config)}};
            write_trajectory_csv(out, run.trajectory, &meta);
            write_text(out_dir / ("trajectory_" + agent.agent + "_" + std::to_string(run.seed) + ".csv"),
                       out.str());
        }
    }
    write_text(out_dir / "summary.json", experiment_summary(result).dump(2) + "\n");
}

}  // namespace ctmdp
