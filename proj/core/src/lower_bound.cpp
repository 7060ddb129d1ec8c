#include "ctmdp/lower_bound.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "ctmdp/error.hpp"
#include "ctmdp/parallel.hpp"

namespace ctmdp {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
// Mean shifts at or below this are met by q = p.
constexpr double kClosureEpsilon = 1e-10;
constexpr int kBisectionSteps = 200;
constexpr int kGoldenSteps = 120;

double dual_slope(std::span<const double> p, std::span<const double> d, double x) {
    double g = 0.0;
    for (std::size_t j = 0; j < p.size(); ++j) {
        if (p[j] > 0.0) g -= p[j] * d[j] / (1.0 - x * d[j]);
    }
    return g;
}

}  // namespace

double kl_transition(std::span<const double> p, std::span<const double> q) {
    if (p.size() != q.size()) throw SupportMismatch("distributions have different lengths");
    double out = 0.0;
    for (std::size_t j = 0; j < p.size(); ++j) {
        if (p[j] <= 0.0) continue;
        if (q[j] <= 0.0) {
            throw SupportMismatch("q(" + std::to_string(j) + ") = 0 where p is positive");
        }
        out += p[j] * std::log(p[j] / q[j]);
    }
    return std::max(out, 0.0);
}

double kl_exponential(double lambda, double lambda_bar) {
    if (!(lambda > 0.0) || !(lambda_bar > 0.0)) throw NonpositiveRate("exponential rates must be positive");
    const double ratio = lambda_bar / lambda;
    return std::max(ratio - 1.0 - std::log(ratio), 0.0);
}

bool delta_theta_contains(const CtmdpModel& model, const AverageRewardSolution& solution,
                          const GapQuantities& gaps, std::size_t s, std::size_t a,
                          std::span<const double> q, double theta, double margin) {
    if (gaps.is_optimal(s, a)) {
        throw NotSuboptimal("action " + std::to_string(a) + " is optimal in state " + std::to_string(s));
    }
    if (!(theta > 0.0)) throw NonpositiveRate("theta must be positive");
    const auto p = model.transition(s, a);
    double shift = 0.0;
    for (std::size_t j = 0; j < p.size(); ++j) shift += (q[j] - p[j]) * solution.bias[j];
    const double lhs = shift - solution.gain * (1.0 / theta - 1.0 / model.rate(s, a));
    return lhs > gaps.phi_at(s, a) + margin;
}

TiltSolution min_kl_with_mean_shift(std::span<const double> p, std::span<const double> h, double shift) {
    TiltSolution out;
    if (shift <= kClosureEpsilon) {
        out.value = 0.0;
        out.q.assign(p.begin(), p.end());
        return out;
    }
    double mean = 0.0;
    double top = -kInf;
    for (std::size_t j = 0; j < p.size(); ++j) {
        if (p[j] > 0.0) {
            mean += p[j] * h[j];
            top = std::max(top, h[j]);
        }
    }
    const double target = mean + shift;
    if (target >= top) return out;

    std::vector<double> d(p.size());
    for (std::size_t j = 0; j < p.size(); ++j) d[j] = h[j] - target;
    double lo = 0.0;
    double hi = 1.0 / (top - target);
    for (int it = 0; it < kBisectionSteps; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break;
        if (dual_slope(p, d, mid) > 0.0) lo = mid; else hi = mid;
    }
    // hi sits on the side where q.h >= target.
    const double x = hi;
    out.q.assign(p.size(), 0.0);
    double total = 0.0;
    for (std::size_t j = 0; j < p.size(); ++j) {
        if (p[j] > 0.0) {
            out.q[j] = p[j] / (1.0 - x * d[j]);
            total += out.q[j];
        }
    }
    for (double& v : out.q) v /= total;
    out.value = kl_transition(p, out.q);
    out.residual = std::abs(dual_slope(p, d, x));
    return out;
}

KResult compute_K(const CtmdpModel& model, const AverageRewardSolution& solution, const GapQuantities& gaps,
                  std::size_t s, std::size_t a, double grid_resolution) {
    if (gaps.is_optimal(s, a)) {
        throw NotSuboptimal("action " + std::to_string(a) + " is optimal in state " + std::to_string(s));
    }
    if (!(grid_resolution > 0.0)) throw InputError("grid resolution must be positive");
    const auto p = model.transition(s, a);
    const double lambda = model.rate(s, a);
    const double phi = gaps.phi_at(s, a);
    const double rho = solution.gain;

    KResult out;
    auto solve_at = [&](double theta) {
        ++out.evaluations;
        auto tilt = min_kl_with_mean_shift(p, solution.bias, phi + rho * (1.0 / theta - 1.0 / lambda));
        if (std::isfinite(tilt.value)) tilt.value += kl_exponential(lambda, theta);
        return tilt;
    };

    const double lmin = model.lambda_min();
    const double lmax = model.lambda_max();
    const std::size_t n =
        lmax > lmin ? std::max<std::size_t>(2, static_cast<std::size_t>(std::ceil((lmax - lmin) / grid_resolution)) + 1)
                    : 1;
    out.grid_points = n;
    auto grid = [&](std::size_t i) {
        return n == 1 ? lmin : (i + 1 == n ? lmax : lmin + (lmax - lmin) * static_cast<double>(i) / static_cast<double>(n - 1));
    };

    std::size_t best = n;
    double best_value = kInf;
    for (std::size_t i = 0; i < n; ++i) {
        const double v = solve_at(grid(i)).value;
        if (v < best_value) {
            best_value = v;
            best = i;
        }
    }
    if (best == n) return out;

    double lo = grid(best > 0 ? best - 1 : 0);
    double hi = grid(best + 1 < n ? best + 1 : best);
    if (!std::isfinite(solve_at(lo).value)) {
        double infeasible = lo;
        double feasible = grid(best);
        for (int it = 0; it < kBisectionSteps; ++it) {
            const double mid = 0.5 * (infeasible + feasible);
            if (mid <= infeasible || mid >= feasible) break;
            if (std::isfinite(solve_at(mid).value)) feasible = mid; else infeasible = mid;
        }
        lo = feasible;
    }

    double theta = grid(best);
    TiltSolution incumbent = solve_at(theta);
    auto consider = [&](double t) {
        auto cand = solve_at(t);
        if (cand.value < incumbent.value) {
            incumbent = std::move(cand);
            theta = t;
        }
    };
    consider(lo);
    consider(hi);
    const double inv_phi = 0.5 * (std::sqrt(5.0) - 1.0);
    double x1 = hi - inv_phi * (hi - lo);
    double x2 = lo + inv_phi * (hi - lo);
    double f1 = solve_at(x1).value;
    double f2 = solve_at(x2).value;
    for (int it = 0; it < kGoldenSteps && hi - lo > 1e-14 * std::max(1.0, hi); ++it) {
        if (f1 <= f2) {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - inv_phi * (hi - lo);
            f1 = solve_at(x1).value;
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + inv_phi * (hi - lo);
            f2 = solve_at(x2).value;
        }
    }
    consider(0.5 * (lo + hi));

    out.value = incumbent.value;
    out.feasible = true;
    out.q = std::move(incumbent.q);
    out.theta = theta;
    out.dual_residual = incumbent.residual;
    return out;
}

double c_upper_bound(const CtmdpModel& model, double bias_span, double min_critical_gap, bool empty) {
    if (empty) return 0.0;
    const double S = static_cast<double>(model.num_states());
    const double A = static_cast<double>(model.num_actions());
    const double lmin = model.lambda_min();
    const double lmax = model.lambda_max();
    const double top = bias_span + 2.0 * lmax;
    return top * top * S * A * lmax / (min_critical_gap * lmin * lmin * lmin);
}

double c_regret_constant(const CtmdpModel& model, double diameter) {
    const double S = static_cast<double>(model.num_states());
    const double A = static_cast<double>(model.num_actions());
    const double lmin = model.lambda_min();
    const double lmax = model.lambda_max();
    const double ratio = lmax / lmin;
    return 3.0 * (34.0 * 34.0 * lmax * lmax * diameter * diameter * S * S * A +
                  2.0 * 73.0 * 73.0 * ratio * ratio * S * A + 24.0 * S * A / (lmin * lmin));
}

InstanceConstants compute_constants(const CtmdpModel& model, const AverageRewardSolution& solution,
                                    const GapQuantities& gaps, double grid_resolution, std::size_t jobs) {
    const std::size_t pairs = model.num_pairs();
    const std::size_t A = model.num_actions();
    InstanceConstants out;
    out.num_actions = A;
    out.K.assign(pairs, KResult{});
    out.critical.assign(pairs, 0);
    out.grid_resolution = grid_resolution;
    out.bias_span = gaps.bias_span;

    parallel_for(pairs, jobs, [&](std::size_t i) {
        const std::size_t s = i / A;
        const std::size_t a = i % A;
        if (gaps.is_optimal(s, a)) return;
        out.K[i] = compute_K(model, solution, gaps, s, a, grid_resolution);
    });

    double min_gap = kInf;
    for (std::size_t i = 0; i < pairs; ++i) {
        if (gaps.optimal[i] || !out.K[i].feasible) continue;
        out.critical[i] = 1;
        const double phi = gaps.phi[i];
        min_gap = std::min(min_gap, phi);
        if (out.K[i].value > 0.0) out.C_of_M += phi / out.K[i].value;
    }
    const bool empty = !std::isfinite(min_gap);
    out.C_upper = c_upper_bound(model, gaps.bias_span, min_gap, empty);
    out.diameter = gaps.diameter ? *gaps.diameter : diameter(model, std::max(solution.tolerance, 1e-9));
    out.C_regret_bound = c_regret_constant(model, out.diameter);
    out.upper_bound_holds = out.C_of_M <= out.C_upper + 1e-6;
    return out;
}

}  // namespace ctmdp
