#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string_view>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "ctmdp/estimators.hpp"
#include "ctmdp/model.hpp"
#include "ctmdp/optimism.hpp"
#include "ctmdp/random.hpp"

namespace ctmdp {

/// Decision-making interface driven by the simulator.
class Agent {
public:
    virtual ~Agent() = default;

    virtual std::size_t act(std::size_t state) = 0;
    virtual void observe(std::size_t state, std::size_t action, double holding_time,
                         std::size_t next_state) = 0;
    virtual std::string_view name() const = 0;

    /// Number of policy recomputations so far; 0 for agents without episodes.
    virtual std::uint64_t episodes() const { return 0; }
};

/// Prior knowledge handed to a learner. Transition laws and rates stay unknown.
struct LearnerConfig {
    std::size_t num_states = 0;
    std::size_t num_actions = 0;
    std::vector<double> rewards;  // S x A, known
    double delta = 0.05;
    double lambda_min = 1.0;
    double lambda_max = 1.0;
    std::size_t initial_state = 0;
    bool optimistic = true;  ///< false gives the certainty-equivalent baseline

    static LearnerConfig from_model(const CtmdpModel& model, double delta, std::size_t initial_state = 0,
                                    bool optimistic = true);
};

/**
 * CT-UCRL: episodic optimistic learner for average-reward CTMDPs.
 *
 * Episode k starts at decision t_k with a confidence set built from all data
 * observed before t_k and runs extended value iteration at precision
 * 1/sqrt(t_k). The episode ends, checked before every action, once the
 * in-episode count of the pair about to be played reaches max(1, N_k).
 * Decision indices are 1-based.
 *
 * With `optimistic = false` the same schedule runs on point estimates (zero
 * radii), which is the greedy_no_optimism baseline.
 */
class CtUcrl final : public Agent {
public:
    explicit CtUcrl(LearnerConfig config);

    std::size_t act(std::size_t state) override;
    void observe(std::size_t state, std::size_t action, double holding_time,
                 std::size_t next_state) override;
    std::string_view name() const override {
        return config_.optimistic ? "ct-ucrl" : "greedy_no_optimism";
    }
    std::uint64_t episodes() const override { return episode_; }

    const LearnerConfig& config() const { return config_; }
    std::uint64_t decision_index() const { return decision_; }
    std::uint64_t episode_index() const { return episode_; }
    std::uint64_t episode_start() const { return episode_start_; }
    const std::vector<std::uint64_t>& episode_starts() const { return episode_starts_; }
    const Statistics& statistics() const { return stats_; }
    const ConfidenceSet& confidence_set() const { return confidence_; }
    const OptimisticSolution& optimistic_solution() const { return *solution_; }
    const Policy& policy() const { return solution_->policy; }

    /// N_k(s,a): visits before the current episode started.
    std::uint64_t prior_visits(std::size_t s, std::size_t a) const;
    /// v_k(s,a): visits within the current episode.
    std::uint64_t episode_visits(std::size_t s, std::size_t a) const;

    /// Replace the statistics and start a new episode at the current decision.
    void inject_statistics(Statistics stats);

    nlohmann::json checkpoint() const;
    static CtUcrl restore(const nlohmann::json& doc);

private:
    struct RestoreTag {};
    CtUcrl(LearnerConfig config, RestoreTag);

    void start_episode();
    void solve_episode();
    bool episode_over(std::size_t state) const;

    LearnerConfig config_;
    std::uint64_t decision_ = 1;
    std::uint64_t episode_ = 0;
    std::uint64_t episode_start_ = 1;
    std::vector<std::uint64_t> episode_starts_;
    Statistics stats_;
    Statistics episode_start_stats_;
    std::vector<std::uint64_t> episode_counts_;
    ConfidenceSet confidence_;
    std::optional<OptimisticSolution> solution_;
    std::optional<std::pair<std::size_t, std::size_t>> pending_;
};

/// Picks an action uniformly at random from its own seeded stream.
class UniformRandomAgent final : public Agent {
public:
    UniformRandomAgent(std::size_t num_actions, std::uint64_t seed)
        : num_actions_(num_actions), rng_(seed) {}

    std::size_t act(std::size_t) override { return rng_.index(num_actions_); }
    void observe(std::size_t, std::size_t, double, std::size_t) override {}
    std::string_view name() const override { return "uniform_random"; }

private:
    std::size_t num_actions_;
    Rng rng_;
};

/// Plays a fixed deterministic policy.
class FixedPolicyAgent final : public Agent {
public:
    explicit FixedPolicyAgent(Policy policy) : policy_(std::move(policy)) {}

    std::size_t act(std::size_t state) override { return policy_(state); }
    void observe(std::size_t, std::size_t, double, std::size_t) override {}
    std::string_view name() const override { return "fixed_policy"; }

private:
    Policy policy_;
};

}  // namespace ctmdp
