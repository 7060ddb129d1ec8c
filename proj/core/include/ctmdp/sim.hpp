#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <memory>
#include <ostream>
#include <span>
#include <vector>

#include <nlohmann/json.hpp>

#include "ctmdp/learner.hpp"
#include "ctmdp/model.hpp"

namespace ctmdp {

/// Simulation length: wall-clock time T or a number of decisions N.
struct Horizon {
    enum class Kind { time, steps };
    Kind kind = Kind::time;
    double time = 0.0;
    std::uint64_t steps = 0;

    static Horizon of_time(double t) { return {Kind::time, t, 0}; }
    static Horizon of_steps(std::uint64_t n) { return {Kind::steps, 0.0, n}; }
};

struct TrajectoryRecord {
    std::uint64_t n = 0;  ///< 0-based decision index
    std::size_t state = 0;
    std::size_t action = 0;
    double holding_time = 0.0;
    double reward = 0.0;
    double clock = 0.0;  ///< S_n, the time decision n was made
};

struct Trajectory {
    std::vector<TrajectoryRecord> records;  ///< empty when recording is off
    std::uint64_t total_decisions = 0;
    double final_clock = 0.0;  ///< clock after the last holding period
};

struct RegretPoint {
    double time = 0.0;
    std::uint64_t decisions = 0;
    double cum_reward = 0.0;
    double regret = 0.0;
};

struct RegretRecord {
    std::vector<RegretPoint> points;
};

struct SimulationOptions {
    std::uint64_t seed = 0;
    std::size_t initial_state = 0;
    /// Times (time horizon) or decision counts (step horizon) at which regret is
    /// recorded; empty means a geometric grid of kDefaultCheckpoints points
    /// (none for a zero horizon).
    std::vector<double> checkpoints;
    bool record_trajectory = true;
};

struct SimulationResult {
    Trajectory trajectory;
    RegretRecord regret;
    std::uint64_t episodes = 0;
};

inline constexpr std::size_t kDefaultCheckpoints = 10;

/// Solver tolerance for the rho* that regret is measured against.
inline constexpr double kRegretTolerance = 1e-10;

/// {horizon / 2^j : j = count-1, ..., 0}, ascending.
std::vector<double> geometric_checkpoints(double horizon, std::size_t count = kDefaultCheckpoints);

/// Checkpoints actually recorded for `horizon`: the default grid when empty,
/// sorted, restricted to [0, horizon], floored and deduplicated for step horizons.
std::vector<double> effective_checkpoints(std::vector<double> checkpoints, const Horizon& horizon);

/**
 * Event-driven simulation of `agent` on `model`.
 *
 * Each step asks the agent for an action, draws tau ~ Exponential(rate) and the
 * next state from the seeded stream, then reports them back. With a time
 * horizon T, decisions are made while the clock is below T, and the regret at
 * checkpoint c is c rho* minus the rewards of all decisions made at or before
 * c (a decision whose holding period straddles c counts). With a step horizon
 * the regret after N decisions is rho* S_N minus their rewards.
 */
SimulationResult simulate(const CtmdpModel& model, Agent& agent, Horizon horizon, double rho_star,
                          const SimulationOptions& options);

struct McEstimate {
    double mean = 0.0;
    double standard_error = 0.0;
    std::size_t runs = 0;
};

using AgentFactory = std::function<std::unique_ptr<Agent>(std::uint64_t seed)>;

/// Average of cumulative reward / T over one run per seed.
McEstimate estimate_policy_gain_mc(const CtmdpModel& model, const Policy& policy, double horizon_time,
                                   std::span<const std::uint64_t> seeds, std::size_t initial_state = 0);

McEstimate estimate_agent_gain_mc(const CtmdpModel& model, const AgentFactory& factory,
                                  double horizon_time, std::span<const std::uint64_t> seeds,
                                  std::size_t initial_state = 0);

struct CountBoundsReport {
    double mean_count = 0.0;  ///< mean of N(T) - 1 over seeds
    double lower = 0.0;       ///< lambda_min T - 4 sqrt(lambda_max T)
    double upper = 0.0;       ///< lambda_max T + 4 sqrt(lambda_max T)
    bool passed = false;
    std::vector<std::uint64_t> counts;
};

/// Statistical check that decision counts sit between the two Poisson processes
/// at rates lambda_min and lambda_max.
CountBoundsReport count_bounds_check(const CtmdpModel& model, const Policy& policy, double horizon_time,
                                     std::span<const std::uint64_t> seeds);

/// `n,state,action,holding_time,reward,clock`; a metadata object, when given,
/// is written first as a single `# {...}` comment line.
void write_trajectory_csv(std::ostream& out, const Trajectory& trajectory,
                          const nlohmann::json* metadata = nullptr);

inline constexpr const char* kRegretCsvHeader = "seed,T,decisions,cum_reward,regret";

void write_regret_rows(std::ostream& out, std::uint64_t seed, const RegretRecord& record);

}  // namespace ctmdp
