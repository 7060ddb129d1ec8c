#include "ctmdp/learner.hpp"

#include <algorithm>
#include <cmath>

#include "ctmdp/error.hpp"

namespace ctmdp {

LearnerConfig LearnerConfig::from_model(const CtmdpModel& model, double delta,
                                        std::size_t initial_state, bool optimistic) {
    LearnerConfig config;
    config.num_states = model.num_states();
    config.num_actions = model.num_actions();
    config.rewards = model.rewards();
    config.delta = delta;
    config.lambda_min = model.lambda_min();
    config.lambda_max = model.lambda_max();
    config.initial_state = initial_state;
    config.optimistic = optimistic;
    return config;
}

CtUcrl::CtUcrl(LearnerConfig config, RestoreTag) : config_(std::move(config)) {
    if (!(config_.delta > 0.0 && config_.delta < 1.0)) throw InvalidDelta(config_.delta);
    if (config_.num_states == 0 || config_.num_actions == 0) {
        throw InputError("learner needs at least one state and one action");
    }
    if (config_.rewards.size() != config_.num_states * config_.num_actions) {
        throw InputError("learner rewards must be S x A");
    }
    for (double r : config_.rewards) {
        if (!(r >= 0.0 && r <= 1.0)) throw InputError("learner rewards must lie in [0,1]");
    }
    if (!(config_.lambda_min > 0.0 && config_.lambda_max >= config_.lambda_min)) {
        throw InputError("rate bounds must satisfy 0 < lambda_min <= lambda_max");
    }
    if (config_.initial_state >= config_.num_states) throw InputError("initial state out of range");
    stats_ = Statistics(config_.num_states, config_.num_actions);
    episode_start_stats_ = stats_;
    episode_counts_.assign(config_.num_states * config_.num_actions, 0);
}

CtUcrl::CtUcrl(LearnerConfig config) : CtUcrl(std::move(config), RestoreTag{}) { start_episode(); }

void CtUcrl::start_episode() {
    ++episode_;
    episode_start_ = decision_;
    episode_starts_.push_back(decision_);
    episode_start_stats_ = stats_;
    std::fill(episode_counts_.begin(), episode_counts_.end(), 0);
    solve_episode();
}

void CtUcrl::solve_episode() {
    confidence_ = config_.optimistic
                      ? build_confidence_set(episode_start_stats_, episode_start_, config_.delta,
                                             config_.lambda_min, config_.lambda_max)
                      : build_point_estimate_set(episode_start_stats_, episode_start_, config_.delta,
                                                 config_.lambda_min, config_.lambda_max);
    const double epsilon = 1.0 / std::sqrt(static_cast<double>(episode_start_));
    solution_ = extended_value_iteration(confidence_, config_.rewards, epsilon);
}

std::uint64_t CtUcrl::prior_visits(std::size_t s, std::size_t a) const {
    return episode_start_stats_.at(s, a).visit_count;
}

std::uint64_t CtUcrl::episode_visits(std::size_t s, std::size_t a) const {
    return episode_counts_[s * config_.num_actions + a];
}

bool CtUcrl::episode_over(std::size_t state) const {
    const std::size_t a = solution_->policy(state);
    return episode_visits(state, a) >= std::max<std::uint64_t>(1, prior_visits(state, a));
}

std::size_t CtUcrl::act(std::size_t state) {
    if (state >= config_.num_states) throw InputError("state out of range");
    if (pending_) {
        if (pending_->first != state) {
            throw OutOfOrderObservation("act called for a new state before the pending action was observed");
        }
        return pending_->second;
    }
    if (episode_over(state)) start_episode();
    const std::size_t action = solution_->policy(state);
    pending_ = std::make_pair(state, action);
    return action;
}

void CtUcrl::observe(std::size_t state, std::size_t action, double holding_time,
                     std::size_t next_state) {
    if (!pending_ || pending_->first != state || pending_->second != action) {
        throw OutOfOrderObservation("observation (" + std::to_string(state) + ", " +
                                    std::to_string(action) + ") does not match the pending action");
    }
    if (next_state >= config_.num_states) throw InputError("next state out of range");
    stats_.record(state, action, holding_time, next_state, config_.delta, config_.lambda_min);
    ++episode_counts_[state * config_.num_actions + action];
    ++decision_;
    pending_.reset();
}

void CtUcrl::inject_statistics(Statistics stats) {
    if (stats.num_states() != config_.num_states || stats.num_actions() != config_.num_actions) {
        throw InputError("injected statistics have the wrong shape");
    }
    stats_ = std::move(stats);
    pending_.reset();
    start_episode();
}

nlohmann::json CtUcrl::checkpoint() const {
    nlohmann::json pending = nullptr;
    if (pending_) pending = {pending_->first, pending_->second};
    return {{"format", "ctmdp-learner-checkpoint/1"},
            {"config",
             {{"num_states", config_.num_states},
              {"num_actions", config_.num_actions},
              {"rewards", config_.rewards},
              {"delta", config_.delta},
              {"lambda_min", config_.lambda_min},
              {"lambda_max", config_.lambda_max},
              {"initial_state", config_.initial_state},
              {"optimistic", config_.optimistic}}},
            {"decision_index", decision_},
            {"episode_index", episode_},
            {"episode_start", episode_start_},
            {"episode_starts", episode_starts_},
            {"episode_counts", episode_counts_},
            {"statistics", statistics_to_json(stats_)},
            {"episode_start_statistics", statistics_to_json(episode_start_stats_)},
            {"pending", pending}};
}

CtUcrl CtUcrl::restore(const nlohmann::json& doc) {
    try {
        const auto& c = doc.at("config");
        LearnerConfig config;
        config.num_states = c.at("num_states").get<std::size_t>();
        config.num_actions = c.at("num_actions").get<std::size_t>();
        config.rewards = c.at("rewards").get<std::vector<double>>();
        config.delta = c.at("delta").get<double>();
        config.lambda_min = c.at("lambda_min").get<double>();
        config.lambda_max = c.at("lambda_max").get<double>();
        config.initial_state = c.at("initial_state").get<std::size_t>();
        config.optimistic = c.at("optimistic").get<bool>();

        CtUcrl learner(std::move(config), RestoreTag{});
        learner.decision_ = doc.at("decision_index").get<std::uint64_t>();
        learner.episode_ = doc.at("episode_index").get<std::uint64_t>();
        learner.episode_start_ = doc.at("episode_start").get<std::uint64_t>();
        learner.episode_starts_ = doc.at("episode_starts").get<std::vector<std::uint64_t>>();
        learner.episode_counts_ = doc.at("episode_counts").get<std::vector<std::uint64_t>>();
        learner.stats_ = statistics_from_json(doc.at("statistics"));
        learner.episode_start_stats_ = statistics_from_json(doc.at("episode_start_statistics"));
        if (!doc.at("pending").is_null()) {
            learner.pending_ = std::make_pair(doc.at("pending")[0].get<std::size_t>(),
                                              doc.at("pending")[1].get<std::size_t>());
        }
        if (learner.episode_counts_.size() != learner.config_.num_states * learner.config_.num_actions) {
            throw InputError("checkpoint episode counts have the wrong shape");
        }
        learner.solve_episode();
        return learner;
    } catch (const nlohmann::json::exception& e) {
        throw InputError(std::string("malformed learner checkpoint: ") + e.what());
    }
}

}  // namespace ctmdp
