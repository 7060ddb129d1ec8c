#pragma once

// Reference computations for the test suites. Nothing here calls the
// library's solvers; each oracle is a separate, slower method.

#include <cmath>
#include <cstddef>
#include <functional>
#include <random>
#include <span>
#include <vector>

#include "ctmdp/model.hpp"

namespace oracle {

/// Dense random model: every transition entry positive, so every policy is irreducible.
ctmdp::CtmdpModel random_dense_model(std::mt19937_64& rng, std::size_t S, std::size_t A,
                                     double lambda_min, double lambda_max);

/// Model with a random sparse support that still has a fully connected ring
/// under every action, so it stays irreducible.
ctmdp::CtmdpModel random_sparse_model(std::mt19937_64& rng, std::size_t S, std::size_t A,
                                      double lambda_min, double lambda_max);

/// Stationary law of the embedded chain by power iteration on (I + P)/2.
std::vector<double> stationary_power(const ctmdp::CtmdpModel& model, const ctmdp::Policy& policy);

/// Renewal-reward gain sum mu r / sum mu / lambda from stationary_power.
double policy_gain_power(const ctmdp::CtmdpModel& model, const ctmdp::Policy& policy);

/// Best gain over every deterministic policy, each evaluated by policy_gain_power.
double best_gain_enumerated(const ctmdp::CtmdpModel& model);

/// Distinct enumerated gains, sorted descending, merged within `merge`.
std::vector<double> enumerated_gains(const ctmdp::CtmdpModel& model, double merge);

/// max_s |max_a {r - rho/lambda + p.h - h(s)}| written out directly.
double bellman_residual(const ctmdp::CtmdpModel& model, double rho, std::span<const double> h);

/// Best q.u over a simplex grid of the given step (S <= 3), restricted to
/// ||q - p_hat||_1 <= radius; p_hat itself is always a candidate.
double grid_inner_max(std::span<const double> p_hat, double radius, std::span<const double> u, double step);

/// log(a/b) + b/a - 1 written out.
double kl_exp(double a, double b);

/// min over theta on a uniform grid of kl_exp(lambda, theta) subject to feasible(theta).
double grid_rate_only_K(double lambda, double lo, double hi, double step,
                        const std::function<bool(double)>& feasible);

/// Brute force K for one pair (S <= 3): q on a simplex grid over the support
/// of p with the given step, theta optimized in closed form for each q.
double grid_K(std::span<const double> p, std::span<const double> h, double lambda, double phi, double rho,
              double lambda_min, double lambda_max, double q_step);

/// Expected time to reach `target` under the best policy, by enumerating
/// policies and solving each linear system with Gaussian elimination.
double enumerated_diameter(const ctmdp::CtmdpModel& model);

/// Kolmogorov-Smirnov distance of the samples to Exponential(rate).
double ks_exponential(std::vector<double> samples, double rate);

/// 1% critical value of the one-sample KS test, asymptotic form.
inline double ks_critical_1pct(std::size_t n) { return 1.6276 / std::sqrt(static_cast<double>(n)); }

}  // namespace oracle
