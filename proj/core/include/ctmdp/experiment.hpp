#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "ctmdp/generator.hpp"
#include "ctmdp/lower_bound.hpp"
#include "ctmdp/model.hpp"
#include "ctmdp/sim.hpp"

namespace ctmdp {

inline constexpr const char* kSummarySchema = "ctmdp-experiment-summary/1";

/// Either a fixed confidence level or the 1/N preset resolved from the horizon.
struct DeltaSetting {
    bool one_over_n = true;
    double value = 0.0;
};

/// 1/N_max for step horizons, 1/ceil(lambda_max T_max) for time horizons
/// (floored at 1/2 so that delta stays below 1); a fixed value is checked to lie in (0,1).
double resolve_delta(const DeltaSetting& setting, const Horizon& horizon, double lambda_max);

/// Parses "one-over-n" or a number.
DeltaSetting parse_delta(const std::string& text);

struct AgentSpec {
    std::string kind;  ///< ct-ucrl, greedy_no_optimism or uniform_random
    std::optional<DeltaSetting> delta;  ///< overrides the experiment-wide setting
};

struct ExperimentConfig {
    std::optional<std::filesystem::path> model_path;
    std::optional<GeneratorSpec> generator;
    std::optional<nlohmann::json> inline_model;

    std::vector<AgentSpec> agents{{"ct-ucrl", std::nullopt}};
    DeltaSetting delta;
    Horizon horizon = Horizon::of_time(1000.0);
    std::size_t seed_count = 1;
    std::uint64_t base_seed = 0;
    std::vector<double> checkpoints;  ///< empty: geometric grid
    std::size_t checkpoint_count = kDefaultCheckpoints;
    std::size_t initial_state = 0;
    double tol = 1e-9;
    double grid_resolution = kDefaultGridResolution;
    bool lower_bound = true;
    bool write_trajectories = false;
    std::size_t jobs = 1;
    std::optional<std::filesystem::path> out_dir;
};

/// Relative model paths are resolved against `base_dir`. Throws InputError on
/// an invalid document.
ExperimentConfig experiment_config_from_json(const nlohmann::json& doc,
                                             const std::filesystem::path& base_dir = {});
nlohmann::json experiment_config_to_json(const ExperimentConfig& config);

/// Throws InputError unless seeds >= 1, every agent is known and delta is valid.
void check_experiment_config(const ExperimentConfig& config);

CtmdpModel load_experiment_model(const ExperimentConfig& config);

struct SeedRun {
    std::uint64_t seed = 0;
    bool ok = true;
    std::string error;
    RegretRecord regret;
    std::uint64_t episodes = 0;
    std::uint64_t decisions = 0;
    Trajectory trajectory;
};

struct CheckpointSummary {
    double checkpoint = 0.0;  ///< time (time horizon) or decision count (step horizon)
    double mean_time = 0.0;
    double mean_decisions = 0.0;
    double mean_regret = 0.0;
    double standard_error = 0.0;
    double regret_over_log = 0.0;  ///< mean_regret / log(lambda_max T + 2)
    std::size_t runs = 0;
};

struct AgentResult {
    std::string agent;
    double delta = 0.0;
    std::vector<SeedRun> runs;  ///< sorted by seed
    std::vector<CheckpointSummary> checkpoints;
};

struct ExperimentResult {
    ExperimentConfig config;
    std::optional<CtmdpModel> model;
    double rho_star = 0.0;
    std::optional<double> gap_g;
    double bias_span = 0.0;
    std::optional<double> diameter;
    std::optional<InstanceConstants> constants;
    std::vector<std::string> notes;  ///< diagnostics that could not be computed
    std::vector<AgentResult> agents;
};

std::unique_ptr<Agent> make_agent(const AgentSpec& spec, const CtmdpModel& model, double delta,
                                  std::uint64_t seed, std::size_t initial_state);

/**
 * Runs every (agent, seed) pair on a pool of `config.jobs` workers. A failing
 * run is recorded and the rest proceed. Results are ordered by agent then seed
 * regardless of completion order.
 */
ExperimentResult run_experiment(const ExperimentConfig& config);

nlohmann::json experiment_summary(const ExperimentResult& result);

/// regret_<agent>.csv per agent, summary.json and optional trajectory files.
void write_experiment_outputs(const ExperimentResult& result, const std::filesystem::path& out_dir);

/// Regret CSV with a metadata comment line; rows sorted by seed.
std::string regret_csv(const ExperimentResult& result, const AgentResult& agent);

}  // namespace ctmdp
