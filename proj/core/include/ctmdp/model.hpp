#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace ctmdp {

/// Deterministic stationary policy: one action per state.
struct Policy {
    std::vector<std::size_t> action;

    std::size_t operator()(std::size_t state) const { return action[state]; }
    std::size_t size() const { return action.size(); }
    bool operator==(const Policy&) const = default;
};

/**
 * Tabular continuous-time MDP.
 *
 * After action a is taken in state s the process collects the lump-sum reward
 * r(s,a), holds for an Exponential(rate(s,a)) time and then jumps according to
 * p(.|s,a). Arrays are stored row-major: reward and rate as S x A, transition as
 * S x A x S.
 *
 * The constructor only checks shapes; semantic assumptions (stochastic rows,
 * support pattern, rate bounds, irreducibility) are checked by validate_model.
 */
class CtmdpModel {
public:
    using Support = std::vector<std::vector<std::size_t>>;

    /// An empty support table defaults to the positivity pattern of `transition`.
    CtmdpModel(std::size_t num_states, std::size_t num_actions, double lambda_min, double lambda_max,
               std::vector<double> reward, std::vector<double> rate, std::vector<double> transition,
               Support support = {});

    std::size_t num_states() const { return num_states_; }
    std::size_t num_actions() const { return num_actions_; }
    std::size_t num_pairs() const { return num_states_ * num_actions_; }
    double lambda_min() const { return lambda_min_; }
    double lambda_max() const { return lambda_max_; }

    double reward(std::size_t s, std::size_t a) const { return reward_[pair_index(s, a)]; }
    double rate(std::size_t s, std::size_t a) const { return rate_[pair_index(s, a)]; }
    std::span<const double> transition(std::size_t s, std::size_t a) const {
        return {transition_.data() + pair_index(s, a) * num_states_, num_states_};
    }
    std::span<const std::size_t> support(std::size_t s, std::size_t a) const {
        return support_[pair_index(s, a)];
    }

    const std::vector<double>& rewards() const { return reward_; }
    const std::vector<double>& rates() const { return rate_; }
    const std::vector<double>& transitions() const { return transition_; }
    const Support& supports() const { return support_; }

    std::size_t pair_index(std::size_t s, std::size_t a) const { return s * num_actions_ + a; }

    /// Same model with every rate (and both rate bounds) multiplied by `factor`.
    CtmdpModel with_scaled_rates(double factor) const;

private:
    std::size_t num_states_;
    std::size_t num_actions_;
    double lambda_min_;
    double lambda_max_;
    std::vector<double> reward_;
    std::vector<double> rate_;
    std::vector<double> transition_;
    Support support_;
};

/// Positivity pattern {j : p[j] > 0} of a probability vector.
std::vector<std::size_t> positive_support(std::span<const double> p);

/// Number of deterministic stationary policies A^S, saturated at `cap + 1`.
std::uint64_t policy_count(std::size_t num_states, std::size_t num_actions, std::uint64_t cap);

/// Calls `visit(policy)` for every deterministic stationary policy in
/// lexicographic order (state 0 varies slowest). Returns false if `visit` asked
/// to stop by returning false.
template <class Visitor>
bool for_each_policy(std::size_t num_states, std::size_t num_actions, Visitor&& visit) {
    Policy policy{std::vector<std::size_t>(num_states, 0)};
    while (true) {
        if (!visit(static_cast<const Policy&>(policy))) return false;
        std::size_t pos = num_states;
        while (pos > 0) {
            --pos;
            if (++policy.action[pos] < num_actions) break;
            policy.action[pos] = 0;
            if (pos == 0) return true;
        }
        if (num_states == 0) return true;
    }
}

/// True iff the embedded chain of `policy` is irreducible (one communicating class).
bool is_irreducible(const CtmdpModel& model, const Policy& policy);

/// True iff every state reaches every other when any action may be used at each state.
bool is_communicating(const CtmdpModel& model);

enum class IrreducibilityCheck { exhaustive, communicating };

struct Violation {
    std::string kind;
    std::optional<std::size_t> state;
    std::optional<std::size_t> action;
    std::optional<Policy> policy;
    std::string message;
};

struct ValidationReport {
    std::vector<Violation> violations;
    IrreducibilityCheck irreducibility_mode = IrreducibilityCheck::exhaustive;
    std::vector<std::string> warnings;

    bool valid() const { return violations.empty(); }
};

/// Above this many deterministic policies the irreducibility check falls back
/// to the communicating test.
inline constexpr std::uint64_t kExhaustivePolicyLimit = 4096;

/// Largest number of failing policies listed individually in a report.
inline constexpr std::size_t kMaxReportedPolicies = 16;

ValidationReport validate_model(const CtmdpModel& model,
                                std::uint64_t exhaustive_limit = kExhaustivePolicyLimit);

}  // namespace ctmdp
