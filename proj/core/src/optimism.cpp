#include "ctmdp/optimism.hpp"

#include <algorithm>
#include <limits>
#include <numeric>
#include <string>

#include "ctmdp/error.hpp"

namespace ctmdp {

std::vector<std::size_t> descending_order(std::span<const double> values) {
    std::vector<std::size_t> order(values.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t i, std::size_t j) { return values[i] > values[j]; });
    return order;
}

void inner_max_transition(std::span<const double> p_hat, double radius,
                          std::span<const std::size_t> order, std::span<double> out) {
    std::copy(p_hat.begin(), p_hat.end(), out.begin());
    if (order.empty() || radius <= 0.0) return;
    const std::size_t best = order.front();
    out[best] = std::min(1.0, p_hat[best] + radius / 2.0);
    if (out[best] == 1.0) {
        std::fill(out.begin(), out.end(), 0.0);
        out[best] = 1.0;
        return;
    }

    double excess = out[best] - p_hat[best];
    for (std::size_t pos = order.size(); pos-- > 1 && excess > 0.0;) {
        const std::size_t j = order[pos];
        const double removed = std::min(out[j], excess);
        out[j] -= removed;
        excess -= removed;
    }
}

std::vector<double> inner_max_transition(std::span<const double> p_hat, double radius,
                                         std::span<const double> values) {
    std::vector<double> out(p_hat.size());
    const auto order = descending_order(values);
    inner_max_transition(p_hat, radius, order, out);
    return out;
}

double inner_max_rate(double coefficient, double lo, double hi) {
    if (lo > hi) throw EmptyInterval(lo, hi);
    return coefficient > 0.0 ? hi : lo;
}

OptimisticSolution extended_value_iteration(const ConfidenceSet& set, std::span<const double> rewards,
                                            double epsilon, std::size_t max_sweeps) {
    if (!(epsilon > 0.0)) throw InputError("epsilon must be positive");
    const std::size_t S = set.num_states;
    const std::size_t A = set.num_actions;
    if (rewards.size() != S * A) throw InputError("rewards must be S x A");
    const double big_lambda = set.lambda_max;
    const double alpha = kAperiodicityMix;

    std::vector<double> u(S, 0.0);
    std::vector<double> next(S, 0.0);
    std::vector<double> delta(S, 0.0);
    std::vector<double> q_tilde(S * A * S, 0.0);
    std::vector<double> rate_tilde(S * A, 0.0);
    std::vector<std::size_t> action(S, 0);

    for (std::size_t sweep = 1; sweep <= max_sweeps; ++sweep) {
        const auto order = descending_order(u);
        for (std::size_t s = 0; s < S; ++s) {
            double best = -std::numeric_limits<double>::infinity();
            for (std::size_t a = 0; a < A; ++a) {
                const std::size_t i = set.pair(s, a);
                std::span<double> q(q_tilde.data() + i * S, S);
                inner_max_transition(set.p_hat_at(s, a), set.p_radius[i], order, q);
                double expected = 0.0;
                for (std::size_t j = 0; j < S; ++j) expected += q[j] * u[j];
                const double coefficient = rewards[i] + expected - u[s];
                const auto [lo, hi] = set.rate_interval(s, a);
                rate_tilde[i] = inner_max_rate(coefficient, lo, hi);
                const double value = coefficient * rate_tilde[i] / big_lambda;
                if (value > best) {
                    best = value;
                    action[s] = a;
                }
            }
            next[s] = u[s] + alpha * best;
            delta[s] = next[s] - u[s];
        }
        const auto [lo, hi] = std::minmax_element(delta.begin(), delta.end());
        const double span = (*hi - *lo) / alpha;
        if (span < epsilon) {
            std::vector<double> reward_copy(rewards.begin(), rewards.end());
            OptimisticSolution out{
                CtmdpModel(S, A, set.lambda_min, set.lambda_max, std::move(reward_copy), rate_tilde,
                           q_tilde),
                Policy{action},
                big_lambda * (*hi + *lo) / (2.0 * alpha),
                next,
                next,
                sweep,
                span};
            const auto [umin, umax] = std::minmax_element(next.begin(), next.end());
            const double mid = (*umin + *umax) / 2.0;
            for (double& w : out.centered_iterate) w -= mid;
            return out;
        }
        const double shift = *std::min_element(next.begin(), next.end());
        for (std::size_t s = 0; s < S; ++s) u[s] = next[s] - shift;
    }
    throw IterationLimitExceeded("extended value iteration did not reach span " +
                                 std::to_string(epsilon) + " within " + std::to_string(max_sweeps) +
                                 " sweeps");
}

}  // namespace ctmdp
