#pragma once

#include <cstddef>
#include <limits>
#include <span>
#include <vector>

#include "ctmdp/model.hpp"
#include "ctmdp/planning.hpp"

namespace ctmdp {

/// sum_{j: p_j > 0} p_j log(p_j / q_j). Throws SupportMismatch if q_j = 0 < p_j.
double kl_transition(std::span<const double> p, std::span<const double> q);

/// log(lambda / lambda_bar) + lambda_bar / lambda - 1. Throws NonpositiveRate.
double kl_exponential(double lambda, double lambda_bar);

/// Roundoff margin separating "on the boundary" from "inside" in delta_theta_contains.
inline constexpr double kMembershipMargin = 1e-12;

/**
 * Whether the alternative (q, theta) for pair (s, a) makes `a` strictly better
 * than the optimal actions in `s`:
 *
 *     (q - p).h* - rho* (1/theta - 1/lambda) > phi*(s, a) + margin
 *
 * A negative margin tests membership in a relaxed closure. Throws NotSuboptimal
 * when a is in O(s).
 */
bool delta_theta_contains(const CtmdpModel& model, const AverageRewardSolution& solution,
                          const GapQuantities& gaps, std::size_t s, std::size_t a,
                          std::span<const double> q, double theta, double margin = kMembershipMargin);

inline constexpr double kDefaultGridResolution = 1e-3;

struct KResult {
    double value = std::numeric_limits<double>::infinity();
    bool feasible = false;
    std::vector<double> q;  ///< minimizing transition law (empty when infeasible)
    double theta = 0.0;     ///< minimizing rate
    std::size_t grid_points = 0;
    std::size_t evaluations = 0;
    double dual_residual = 0.0;  ///< |dual derivative| at the minimizer's inner solve
};

/// Minimum KL distance per unit time of the transition part for fixed theta:
/// min KL(p, q) over q with support in S+ and q.h >= p.h + shift.
/// Returns +inf when no such q exists.
struct TiltSolution {
    double value = std::numeric_limits<double>::infinity();
    std::vector<double> q;
    double residual = 0.0;
};
TiltSolution min_kl_with_mean_shift(std::span<const double> p, std::span<const double> h, double shift);

/**
 * K(s, a): infimum of KL(p, q) + kl_exponential(lambda, theta) over the closure
 * of the alternatives making (s, a) optimal. Scans theta over [lambda_min,
 * lambda_max] at `grid_resolution`, then refines around the best grid point by
 * golden-section search (the objective is convex in theta on its feasible
 * interval). Infeasible pairs return +inf. Throws NotSuboptimal for optimal pairs.
 */
KResult compute_K(const CtmdpModel& model, const AverageRewardSolution& solution, const GapQuantities& gaps,
                  std::size_t s, std::size_t a, double grid_resolution = kDefaultGridResolution);

struct InstanceConstants {
    std::size_t num_actions = 0;
    std::vector<KResult> K;          ///< S x A; default (inf, infeasible) on optimal pairs
    std::vector<char> critical;      ///< S x A membership in B(M)
    double C_of_M = 0.0;
    double C_upper = 0.0;
    double C_regret_bound = 0.0;
    double bias_span = 0.0;
    double diameter = 0.0;
    double grid_resolution = 0.0;
    bool upper_bound_holds = true;   ///< C(M) <= C_upper + 1e-6

    const KResult& K_at(std::size_t s, std::size_t a) const { return K[s * num_actions + a]; }
    bool is_critical(std::size_t s, std::size_t a) const { return critical[s * num_actions + a] != 0; }
};

/// (H + 2 lambda_max)^2 S A lambda_max / (min_B phi lambda_min^3); 0 if B is empty.
double c_upper_bound(const CtmdpModel& model, double bias_span, double min_critical_gap, bool empty);

/// 3 (34^2 lambda_max^2 D^2 S^2 A + 2 73^2 (lambda_max/lambda_min)^2 S A + 24 S A / lambda_min^2).
double c_regret_constant(const CtmdpModel& model, double diameter);

/// Assemble K, B(M), C(M) and the two reference constants. Uses gaps.diameter
/// when present and computes it otherwise. Pairs are solved on `jobs` threads.
InstanceConstants compute_constants(const CtmdpModel& model, const AverageRewardSolution& solution,
                                    const GapQuantities& gaps,
                                    double grid_resolution = kDefaultGridResolution, std::size_t jobs = 1);

}  // namespace ctmdp
