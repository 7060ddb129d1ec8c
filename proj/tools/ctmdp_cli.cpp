// ctmdp: planning, learning and lower-bound tool for continuous-time MDPs.
//
// Exit codes: 0 success, 1 invalid input or model, 2 numerical failure.

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>

#ifdef CTMDP_CLI11_PACKAGE
#include <CLI/CLI.hpp>
#else
#include <CLI11.hpp>
#endif

#include "ctmdp/error.hpp"
#include "ctmdp/experiment.hpp"
#include "ctmdp/generator.hpp"
#include "ctmdp/io.hpp"
#include "ctmdp/learner.hpp"
#include "ctmdp/lower_bound.hpp"
#include "ctmdp/planning.hpp"
#include "ctmdp/sim.hpp"

namespace fs = std::filesystem;
using ctmdp::json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInput = 1;
constexpr int kExitNumerical = 2;

struct Options {
    std::string model;
    std::string config;
    double tol = 1e-9;
    std::optional<std::uint64_t> seed;
    std::size_t seeds = 0;
    std::optional<double> horizon_time;
    std::optional<std::uint64_t> horizon_steps;
    std::string delta;
    std::string out;
    std::size_t jobs = 1;
    double grid = ctmdp::kDefaultGridResolution;
    std::string agent = "optimal";
    std::size_t initial_state = 0;
    std::string regret_out;

    std::string family = "random_dense";
    std::size_t states = 3;
    std::size_t actions = 2;
    double lambda_min = 0.5;
    double lambda_max = 2.0;
};

/// Thrown when the model itself fails validation; the report is already printed.
struct InvalidModel {};

void emit(const Options& opt, const std::string& text) {
    if (opt.out.empty() || opt.out == "-") {
        std::cout << text;
    } else {
        ctmdp::write_text(opt.out, text);
    }
}

json meta(const Options& opt, const std::string& command) {
    json args = {{"command", command}, {"tol", opt.tol}};
    if (!opt.model.empty()) args["model"] = opt.model;
    return {{"tool_version", ctmdp::tool_version()}, {"arguments", args}};
}

ctmdp::CtmdpModel load_valid_model(const Options& opt) {
    if (opt.model.empty()) throw ctmdp::InputError("--model is required");
    auto model = ctmdp::load_model(opt.model);
    const auto report = ctmdp::validate_model(model);
    if (!report.valid()) {
        std::cout << ctmdp::validation_to_json(report).dump(2) << '\n';
        throw InvalidModel{};
    }
    return model;
}

ctmdp::Horizon horizon_of(const Options& opt) {
    if (opt.horizon_steps) return ctmdp::Horizon::of_steps(*opt.horizon_steps);
    if (opt.horizon_time) {
        if (!(*opt.horizon_time >= 0.0)) throw ctmdp::InputError("--horizon-time must be nonnegative");
        return ctmdp::Horizon::of_time(*opt.horizon_time);
    }
    throw ctmdp::InputError("one of --horizon-time or --horizon-steps is required");
}

int cmd_validate(const Options& opt) {
    if (opt.model.empty()) throw ctmdp::InputError("--model is required");
    const auto model = ctmdp::load_model(opt.model);
    const auto report = ctmdp::validate_model(model);
    json doc = ctmdp::validation_to_json(report);
    doc["meta"] = meta(opt, "validate");
    emit(opt, doc.dump(2) + "\n");
    return report.valid() ? kExitOk : kExitInput;
}

int cmd_solve(const Options& opt) {
    const auto model = load_valid_model(opt);
    json doc = ctmdp::solution_to_json(ctmdp::solve_average_reward(model, opt.tol));
    doc["meta"] = meta(opt, "solve");
    emit(opt, doc.dump(2) + "\n");
    return kExitOk;
}

int cmd_gaps(const Options& opt) {
    const auto model = load_valid_model(opt);
    const auto solution = ctmdp::solve_average_reward(model, opt.tol);
    const auto gaps = ctmdp::compute_gaps(model, solution);
    json doc = ctmdp::gaps_to_json(model, gaps);
    doc["rho_star"] = solution.gain;
    doc["h_star"] = solution.bias;
    doc["meta"] = meta(opt, "gaps");
    emit(opt, doc.dump(2) + "\n");
    return kExitOk;
}

int cmd_diameter(const Options& opt) {
    const auto model = load_valid_model(opt);
    json doc = {{"diameter", ctmdp::diameter(model, opt.tol)}, {"tolerance", opt.tol}};
    doc["meta"] = meta(opt, "diameter");
    emit(opt, doc.dump(2) + "\n");
    return kExitOk;
}

int cmd_lower_bound(const Options& opt) {
    const auto model = load_valid_model(opt);
    const auto solution = ctmdp::solve_average_reward(model, opt.tol);
    auto gaps = ctmdp::compute_gaps(model, solution);
    gaps.diameter = ctmdp::diameter(model, opt.tol);
    const auto constants = ctmdp::compute_constants(model, solution, gaps, opt.grid, opt.jobs);
    json doc = ctmdp::constants_to_json(model, gaps, constants);
    doc["rho_star"] = solution.gain;
    doc["gap_g"] = gaps.gap_g ? json(*gaps.gap_g) : json(nullptr);
    doc["meta"] = meta(opt, "lower-bound");
    doc["meta"]["arguments"]["grid_resolution"] = opt.grid;
    emit(opt, doc.dump(2) + "\n");
    return kExitOk;
}

json run_meta(const Options& opt, const std::string& command, const ctmdp::Horizon& horizon) {
    json m = meta(opt, command);
    m["seed"] = opt.seed.value_or(0);
    m["arguments"]["initial_state"] = opt.initial_state;
    if (horizon.kind == ctmdp::Horizon::Kind::time) {
        m["arguments"]["horizon_time"] = horizon.time;
    } else {
        m["arguments"]["horizon_steps"] = horizon.steps;
    }
    return m;
}

void write_run(const Options& opt, const json& m, const ctmdp::SimulationResult& run) {
    std::ostringstream traj;
    ctmdp::write_trajectory_csv(traj, run.trajectory, &m);
    emit(opt, traj.str());
    if (!opt.regret_out.empty()) {
        std::ostringstream regret;
        regret << "# " << m.dump() << '\n' << ctmdp::kRegretCsvHeader << '\n';
        ctmdp::write_regret_rows(regret, opt.seed.value_or(0), run.regret);
        ctmdp::write_text(opt.regret_out, regret.str());
    }
}

int cmd_simulate(const Options& opt) {
    const auto model = load_valid_model(opt);
    const auto horizon = horizon_of(opt);
    const auto solution = ctmdp::solve_average_reward(model, std::min(opt.tol, ctmdp::kRegretTolerance));
    std::unique_ptr<ctmdp::Agent> agent;
    if (opt.agent == "optimal") {
        agent = std::make_unique<ctmdp::FixedPolicyAgent>(solution.greedy_policy);
    } else if (opt.agent == "uniform_random") {
        agent = std::make_unique<ctmdp::UniformRandomAgent>(model.num_actions(), ctmdp::stream_seed(opt.seed.value_or(0), 1));
    } else {
        throw ctmdp::InputError("--agent must be optimal or uniform_random");
    }
    ctmdp::SimulationOptions options;
    options.seed = opt.seed.value_or(0);
    options.initial_state = opt.initial_state;
    const auto run = ctmdp::simulate(model, *agent, horizon, solution.gain, options);
    json m = run_meta(opt, "simulate", horizon);
    m["agent"] = std::string(agent->name());
    write_run(opt, m, run);
    return kExitOk;
}

int cmd_learn(const Options& opt) {
    const auto model = load_valid_model(opt);
    const auto horizon = horizon_of(opt);
    const auto solution = ctmdp::solve_average_reward(model, std::min(opt.tol, ctmdp::kRegretTolerance));
    const double delta = ctmdp::resolve_delta(ctmdp::parse_delta(opt.delta.empty() ? "one-over-n" : opt.delta),
                                              horizon, model.lambda_max());
    ctmdp::CtUcrl learner(ctmdp::LearnerConfig::from_model(model, delta, opt.initial_state));
    ctmdp::SimulationOptions options;
    options.seed = opt.seed.value_or(0);
    options.initial_state = opt.initial_state;
    const auto run = ctmdp::simulate(model, learner, horizon, solution.gain, options);
    json m = run_meta(opt, "learn", horizon);
    m["agent"] = std::string(learner.name());
    m["delta"] = delta;
    write_run(opt, m, run);

    json summary = {{"rho_star", solution.gain},
                    {"delta", delta},
                    {"decisions", run.trajectory.total_decisions},
                    {"episodes", learner.episodes()},
                    {"episode_starts", learner.episode_starts()},
                    {"policy", ctmdp::policy_to_json(learner.policy())},
                    {"optimal_policy", ctmdp::policy_to_json(solution.greedy_policy)},
                    {"regret", run.regret.points.empty() ? 0.0 : run.regret.points.back().regret},
                    {"meta", m}};
    std::cerr << summary.dump(2) << '\n';
    return kExitOk;
}

int cmd_experiment(const Options& opt) {
    if (opt.config.empty()) throw ctmdp::InputError("--config is required");
    const fs::path path(opt.config);
    auto config = ctmdp::experiment_config_from_json(ctmdp::load_json(path), path.parent_path());
    if (!opt.model.empty()) {
        config.model_path = opt.model;
        config.generator.reset();
        config.inline_model.reset();
    }
    if (opt.seeds > 0) config.seed_count = opt.seeds;
    if (opt.seed) config.base_seed = *opt.seed;
    if (opt.horizon_time) config.horizon = ctmdp::Horizon::of_time(*opt.horizon_time);
    if (opt.horizon_steps) config.horizon = ctmdp::Horizon::of_steps(*opt.horizon_steps);
    if (!opt.delta.empty()) config.delta = ctmdp::parse_delta(opt.delta);
    if (opt.jobs != 1) config.jobs = opt.jobs;
    config.tol = opt.tol;
    if (!opt.out.empty()) config.out_dir = opt.out;
    if (!config.out_dir) throw ctmdp::InputError("experiment needs --out or an \"out\" entry in the config");

    {
        const auto model = ctmdp::load_experiment_model(config);
        const auto report = ctmdp::validate_model(model);
        if (!report.valid()) {
            std::cout << ctmdp::validation_to_json(report).dump(2) << '\n';
            return kExitInput;
        }
    }
    const auto result = ctmdp::run_experiment(config);
    ctmdp::write_experiment_outputs(result, *config.out_dir);
    std::cout << ctmdp::experiment_summary(result).dump(2) << '\n';
    for (const auto& agent : result.agents) {
        for (const auto& run : agent.runs) {
            if (!run.ok) return kExitNumerical;
        }
    }
    return kExitOk;
}

int cmd_generate(const Options& opt) {
    ctmdp::GeneratorSpec spec;
    if (opt.family == "single_state_bandit") {
        spec = ctmdp::GeneratorSpec::canonical_bandit();
    } else {
        spec = ctmdp::generator_spec_from_json({{"family", opt.family}});
        spec.num_states = opt.states;
        spec.num_actions = opt.actions;
        spec.lambda_min = opt.lambda_min;
        spec.lambda_max = opt.lambda_max;
    }
    spec.seed = opt.seed.value_or(0);
    emit(opt, ctmdp::model_to_json(ctmdp::generate(spec)).dump(2) + "\n");
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Planning, learning and regret experiments for continuous-time MDPs"};
    app.set_version_flag("--version", ctmdp::tool_version());
    app.require_subcommand(1);
    Options opt;

    auto add_model = [&](CLI::App* c) { c->add_option("--model", opt.model, "Model JSON file")->required(); };
    auto add_tol = [&](CLI::App* c) {
        c->add_option("--tol", opt.tol, "Solver tolerance")->check(CLI::PositiveNumber);
    };
    auto add_out = [&](CLI::App* c) { c->add_option("--out", opt.out, "Output path (default stdout)"); };
    auto add_horizon = [&](CLI::App* c) {
        auto* t = c->add_option("--horizon-time", opt.horizon_time, "Horizon in time units");
        auto* n = c->add_option("--horizon-steps", opt.horizon_steps, "Horizon in decisions");
        t->excludes(n);
    };
    auto add_run = [&](CLI::App* c) {
        c->add_option("--seed", opt.seed, "Random seed");
        c->add_option("--initial-state", opt.initial_state, "Initial state");
        c->add_option("--regret-out", opt.regret_out, "Regret CSV path");
    };

    auto* validate = app.add_subcommand("validate", "Check a model against the modelling assumptions");
    add_model(validate);
    add_out(validate);

    auto* solve = app.add_subcommand("solve", "Optimal gain, bias and policy");
    add_model(solve);
    add_tol(solve);
    add_out(solve);

    auto* gaps = app.add_subcommand("gaps", "Suboptimality gaps and the policy-gain gap");
    add_model(gaps);
    add_tol(gaps);
    add_out(gaps);

    auto* diam = app.add_subcommand("diameter", "Worst-case minimal expected travel time");
    add_model(diam);
    add_tol(diam);
    add_out(diam);

    auto* lower = app.add_subcommand("lower-bound", "KL constants K(s,a), C(M) and reference bounds");
    add_model(lower);
    add_tol(lower);
    add_out(lower);
    lower->add_option("--grid", opt.grid, "Rate grid resolution")->check(CLI::PositiveNumber);
    lower->add_option("--jobs", opt.jobs, "Worker threads (0 = all cores)");

    auto* simulate = app.add_subcommand("simulate", "Simulate a fixed agent and write its trajectory CSV");
    add_model(simulate);
    add_tol(simulate);
    add_out(simulate);
    add_horizon(simulate);
    add_run(simulate);
    simulate->add_option("--agent", opt.agent, "optimal or uniform_random");

    auto* learn = app.add_subcommand("learn", "Run CT-UCRL once and write its trajectory CSV");
    add_model(learn);
    add_tol(learn);
    add_out(learn);
    add_horizon(learn);
    add_run(learn);
    learn->add_option("--delta", opt.delta, "Confidence level or one-over-n");

    auto* experiment = app.add_subcommand("experiment", "Multi-seed regret experiment");
    experiment->add_option("--config", opt.config, "Experiment JSON")->required();
    experiment->add_option("--model", opt.model, "Override the configured model");
    add_tol(experiment);
    add_horizon(experiment);
    experiment->add_option("--seed", opt.seed, "Base seed");
    experiment->add_option("--seeds", opt.seeds, "Number of seeds");
    experiment->add_option("--delta", opt.delta, "Confidence level or one-over-n");
    experiment->add_option("--jobs", opt.jobs, "Worker threads (0 = all cores)");
    experiment->add_option("--out", opt.out, "Output directory");

    auto* generate = app.add_subcommand("generate", "Write a random valid model");
    generate->add_option("--family", opt.family, "birth_death, random_dense or single_state_bandit")
        ->check(CLI::IsMember({"birth_death", "random_dense", "single_state_bandit"}));
    generate->add_option("--states", opt.states, "Number of states");
    generate->add_option("--actions", opt.actions, "Number of actions");
    generate->add_option("--lambda-min", opt.lambda_min, "Lower rate bound");
    generate->add_option("--lambda-max", opt.lambda_max, "Upper rate bound");
    generate->add_option("--seed", opt.seed, "Random seed");
    add_out(generate);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitInput;
    }

    try {
        if (*validate) return cmd_validate(opt);
        if (*solve) return cmd_solve(opt);
        if (*gaps) return cmd_gaps(opt);
        if (*diam) return cmd_diameter(opt);
        if (*lower) return cmd_lower_bound(opt);
        if (*simulate) return cmd_simulate(opt);
        if (*learn) return cmd_learn(opt);
        if (*experiment) return cmd_experiment(opt);
        if (*generate) return cmd_generate(opt);
    } catch (const InvalidModel&) {
        return kExitInput;
    } catch (const ctmdp::NumericalError& e) {
        std::cerr << "numerical failure: " << e.what() << '\n';
        return kExitNumerical;
    } catch (const ctmdp::InputError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitInput;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitInput;
    }
    return kExitInput;
}
