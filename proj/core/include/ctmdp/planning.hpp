#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "ctmdp/model.hpp"

namespace ctmdp {

/// Self-loop mixing weight applied inside value iteration: p <- (1-a) I + a p.
inline constexpr double kAperiodicityMix = 0.9;

/// Sweep cap shared by every value-iteration routine.
inline constexpr std::size_t kMaxSweeps = 1'000'000;

/// Discrete-time MDP equivalent to a CTMDP under uniformization at rate lambda_max.
struct UniformizedMdp {
    std::size_t num_states = 0;
    std::size_t num_actions = 0;
    std::vector<double> reward;      // S x A, already multiplied by the mix weight
    std::vector<double> transition;  // S x A x S
    double uniformization_rate = 0.0;
    double aperiodicity_mix = 1.0;

    double reward_at(std::size_t s, std::size_t a) const { return reward[s * num_actions + a]; }
    std::span<const double> transition_at(std::size_t s, std::size_t a) const {
        return {transition.data() + (s * num_actions + a) * num_states, num_states};
    }
};

/// Uniformize at rate lambda_max. With `aperiodicity_mix` < 1 the result is
/// additionally mixed with the identity, which scales its gain by the same factor.
UniformizedMdp uniformize(const CtmdpModel& model, double aperiodicity_mix = 1.0);

struct AverageRewardSolution {
    double gain = 0.0;         ///< rho*, reward per unit time
    std::vector<double> bias;  ///< h*, normalized so that min_s h*(s) = 0
    Policy greedy_policy;
    double residual = 0.0;     ///< max_s |max_a {r - rho/lambda + p.h - h(s)}|
    double tolerance = 0.0;    ///< the tolerance the solution was requested at
    std::size_t sweeps = 0;
};

/**
 * Solve the average-reward optimality equation
 *
 *     0 = max_a { r(s,a) - rho/lambda(s,a) + sum_j p(j|s,a) h(j) - h(s) }
 *
 * by relative value iteration on the uniformized, aperiodicity-mixed MDP. The
 * returned residual is evaluated directly on the continuous-time equation and
 * is at most `tol`. Ties in the greedy policy go to the lowest action index.
 *
 * Throws IterationLimitExceeded when the span criterion is not met within
 * `max_sweeps` sweeps.
 */
AverageRewardSolution solve_average_reward(const CtmdpModel& model, double tol,
                                           std::size_t max_sweeps = kMaxSweeps);

/// max_s |max_a {r - gain/lambda + p.bias - bias(s)}|.
double bellman_residual(const CtmdpModel& model, double gain, std::span<const double> bias);

/// Greedy action of the optimality equation at `s` for the given (gain, bias).
std::size_t greedy_action(const CtmdpModel& model, double gain, std::span<const double> bias,
                          std::size_t s);

/// Long-run reward per unit time of a deterministic policy, from the
/// stationary law mu of its embedded chain: sum mu r / sum mu/lambda.
/// Throws SingularChain if the embedded chain is not irreducible.
double policy_gain(const CtmdpModel& model, const Policy& policy, double tol = 1e-10);

/// Same for a randomized stationary policy; `action_probabilities` is S x A.
double randomized_policy_gain(const CtmdpModel& model, std::span<const double> action_probabilities,
                              double tol = 1e-10);

struct GapQuantities {
    std::size_t num_actions = 0;
    std::vector<double> phi;     ///< S x A suboptimality gaps, snapped to 0 on O(s)
    std::vector<char> optimal;   ///< S x A membership in O(s)
    std::optional<double> gap_g; ///< absent when every policy shares one gain
    double bias_span = 0.0;
    std::optional<double> diameter;

    double phi_at(std::size_t s, std::size_t a) const { return phi[s * num_actions + a]; }
    bool is_optimal(std::size_t s, std::size_t a) const { return optimal[s * num_actions + a] != 0; }
};

/// Multiple of the solution tolerance below which phi(s,a) counts as zero.
inline constexpr double kOptimalSetFactor = 10.0;

/**
 * Suboptimality gaps, the policy-gain gap g and the bias span.
 *
 * g enumerates all A^S deterministic policies (PolicySpaceTooLarge above
 * kExhaustivePolicyLimit). Gains within max(1e-9, 10 tol) of the best are
 * treated as equal to it.
 */
GapQuantities compute_gaps(const CtmdpModel& model, const AverageRewardSolution& solution);

/// D(M): worst case over (s, s') of the minimal expected time to reach s' from s.
double diameter(const CtmdpModel& model, double tol, std::size_t max_sweeps = kMaxSweeps);

/// Minimal expected hitting times of `target` from every state.
std::vector<double> min_hitting_times(const CtmdpModel& model, std::size_t target, double tol,
                                      std::size_t max_sweeps = kMaxSweeps);

}  // namespace ctmdp
