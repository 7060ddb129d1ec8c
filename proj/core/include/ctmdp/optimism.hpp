#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "ctmdp/estimators.hpp"
#include "ctmdp/model.hpp"
#include "ctmdp/planning.hpp"

namespace ctmdp {

/**
 * argmax of q.u over probability vectors q with ||q - p_hat||_1 <= radius.
 *
 * Adds radius/2 of mass to the best state (largest u, lowest index on ties) and
 * removes the same amount from the worst states first.
 */
std::vector<double> inner_max_transition(std::span<const double> p_hat, double radius,
                                         std::span<const double> values);

/// States sorted by descending value, ties by ascending index.
std::vector<std::size_t> descending_order(std::span<const double> values);

/// Same as above with a precomputed descending_order(values); writes into `out`.
void inner_max_transition(std::span<const double> p_hat, double radius,
                          std::span<const std::size_t> order, std::span<double> out);

/// Maximizer of coefficient * lambda over [lo, hi]; lo on an exact zero.
/// Throws EmptyInterval when lo > hi.
double inner_max_rate(double coefficient, double lo, double hi);

struct OptimisticSolution {
    CtmdpModel model;                   ///< optimistic transitions and rates, every pair
    Policy policy;                      ///< greedy w.r.t. the final pre-sweep iterate
    double gain = 0.0;                  ///< optimistic gain, per unit time
    std::vector<double> final_iterate;  ///< u_{i+1}, shifted by a constant
    std::vector<double> centered_iterate;
    std::size_t sweeps = 0;
    double achieved_span = 0.0;         ///< span(u_{i+1} - u_i), unmixed units
};

/**
 * Extended value iteration over the plausible-model set.
 *
 * Iterates the uniformized optimistic Bellman operator (with the same
 * aperiodicity mix as solve_average_reward) from u = 0 until
 * max(u_{i+1} - u_i) - min(u_{i+1} - u_i) < epsilon, in unmixed units.
 * `rewards` is S x A. Throws IterationLimitExceeded after `max_sweeps`.
 */
OptimisticSolution extended_value_iteration(const ConfidenceSet& set, std::span<const double> rewards,
                                            double epsilon, std::size_t max_sweeps = kMaxSweeps);

}  // namespace ctmdp
