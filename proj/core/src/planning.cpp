#include "ctmdp/planning.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "ctmdp/error.hpp"

namespace ctmdp {
namespace {

double dot(std::span<const double> a, std::span<const double> b) {
    double sum = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) sum += a[i] * b[i];
    return sum;
}

double optimality_term(const CtmdpModel& model, double gain, std::span<const double> bias,
                       std::size_t s, std::size_t a) {
    return model.reward(s, a) - gain / model.rate(s, a) + dot(model.transition(s, a), bias) - bias[s];
}

double min_rate(const CtmdpModel& model) {
    return *std::min_element(model.rates().begin(), model.rates().end());
}

// Stationary law of an irreducible stochastic matrix.
Eigen::VectorXd stationary_distribution(const Eigen::MatrixXd& transition, double tol) {
    const auto n = transition.rows();
    Eigen::MatrixXd system = transition.transpose() - Eigen::MatrixXd::Identity(n, n);
    system.row(n - 1).setOnes();
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(n);
    rhs(n - 1) = 1.0;
    Eigen::FullPivLU<Eigen::MatrixXd> lu(system);
    if (!lu.isInvertible()) throw SingularChain("stationary system is singular");
    Eigen::VectorXd mu = lu.solve(rhs);
    const double check = (transition.transpose() * mu - mu).cwiseAbs().maxCoeff();
    if (check > std::max(tol, 1e-9)) throw SingularChain("stationary solve did not converge");
    return mu;
}

double renewal_gain(const Eigen::MatrixXd& transition, const Eigen::VectorXd& reward_per_visit,
                    const Eigen::VectorXd& time_per_visit, double tol) {
    Eigen::VectorXd mu = stationary_distribution(transition, tol);
    return mu.dot(reward_per_visit) / mu.dot(time_per_visit);
}

template <class Edge>
bool chain_irreducible(std::size_t n, Edge&& edge) {
    for (int direction = 0; direction < 2; ++direction) {
        std::vector<char> seen(n, 0);
        std::vector<std::size_t> stack{0};
        seen[0] = 1;
        std::size_t count = 1;
        while (!stack.empty()) {
            std::size_t i = stack.back();
            stack.pop_back();
            for (std::size_t j = 0; j < n; ++j) {
                if (!seen[j] && (direction == 0 ? edge(i, j) : edge(j, i))) {
                    seen[j] = 1;
                    ++count;
                    stack.push_back(j);
                }
            }
        }
        if (count != n) return false;
    }
    return true;
}

}  // namespace

UniformizedMdp uniformize(const CtmdpModel& model, double aperiodicity_mix) {
    const std::size_t S = model.num_states();
    const std::size_t A = model.num_actions();
    const double big_lambda = model.lambda_max();

    UniformizedMdp out;
    out.num_states = S;
    out.num_actions = A;
    out.uniformization_rate = big_lambda;
    out.aperiodicity_mix = aperiodicity_mix;
    out.reward.resize(S * A);
    out.transition.resize(S * A * S);
    for (std::size_t s = 0; s < S; ++s) {
        for (std::size_t a = 0; a < A; ++a) {
            const double scale = model.rate(s, a) / big_lambda;
            const std::size_t pair = s * A + a;
            out.reward[pair] = aperiodicity_mix * model.reward(s, a) * scale;
            auto p = model.transition(s, a);
            double* row = out.transition.data() + pair * S;
            for (std::size_t j = 0; j < S; ++j) {
                double check = (j == s) ? 1.0 - (1.0 - p[j]) * scale : p[j] * scale;
                row[j] = aperiodicity_mix * check + (j == s ? 1.0 - aperiodicity_mix : 0.0);
            }
        }
    }
    return out;
}

double bellman_residual(const CtmdpModel& model, double gain, std::span<const double> bias) {
    double worst = 0.0;
    for (std::size_t s = 0; s < model.num_states(); ++s) {
        double best = -std::numeric_limits<double>::infinity();
        for (std::size_t a = 0; a < model.num_actions(); ++a) {
            best = std::max(best, optimality_term(model, gain, bias, s, a));
        }
        worst = std::max(worst, std::abs(best));
    }
    return worst;
}

std::size_t greedy_action(const CtmdpModel& model, double gain, std::span<const double> bias,
                          std::size_t s) {
    std::size_t best_action = 0;
    double best = optimality_term(model, gain, bias, s, 0);
    for (std::size_t a = 1; a < model.num_actions(); ++a) {
        const double v = optimality_term(model, gain, bias, s, a);
        if (v > best) {
            best = v;
            best_action = a;
        }
    }
    return best_action;
}

AverageRewardSolution solve_average_reward(const CtmdpModel& model, double tol,
                                           std::size_t max_sweeps) {
    if (!(tol > 0.0)) throw InputError("tolerance must be positive");
    const std::size_t S = model.num_states();
    const std::size_t A = model.num_actions();
    const UniformizedMdp mdp = uniformize(model, kAperiodicityMix);
    const double alpha = mdp.aperiodicity_mix;
    const double big_lambda = mdp.uniformization_rate;

    // Stopping on span(delta)/alpha <= 2 tol lambda_min / Lambda bounds the
    // continuous-time residual of the pre-sweep iterate by tol.
    const double span_target = 2.0 * tol * min_rate(model) / big_lambda;

    std::vector<double> u(S, 0.0);
    std::vector<double> next(S, 0.0);
    std::vector<double> delta(S, 0.0);
    for (std::size_t sweep = 1; sweep <= max_sweeps; ++sweep) {
        for (std::size_t s = 0; s < S; ++s) {
            double best = -std::numeric_limits<double>::infinity();
            for (std::size_t a = 0; a < A; ++a) {
                best = std::max(best, mdp.reward_at(s, a) + dot(mdp.transition_at(s, a), u));
            }
            next[s] = best;
            delta[s] = best - u[s];
        }
        const auto [lo, hi] = std::minmax_element(delta.begin(), delta.end());
        if ((*hi - *lo) / alpha <= span_target) {
            AverageRewardSolution out;
            out.gain = big_lambda * (*hi + *lo) / (2.0 * alpha);
            const double floor = *std::min_element(u.begin(), u.end());
            out.bias = u;
            for (double& h : out.bias) h -= floor;
            out.greedy_policy.action.resize(S);
            for (std::size_t s = 0; s < S; ++s) {
                out.greedy_policy.action[s] = greedy_action(model, out.gain, out.bias, s);
            }
            out.residual = bellman_residual(model, out.gain, out.bias);
            out.tolerance = tol;
            out.sweeps = sweep;
            return out;
        }
        const double shift = *std::min_element(next.begin(), next.end());
        for (std::size_t s = 0; s < S; ++s) u[s] = next[s] - shift;
    }
    throw IterationLimitExceeded("relative value iteration did not reach span " +
                                 std::to_string(span_target) + " within " +
                                 std::to_string(max_sweeps) + " sweeps");
}

double policy_gain(const CtmdpModel& model, const Policy& policy, double tol) {
    const std::size_t S = model.num_states();
    if (policy.size() != S) throw InputError("policy length does not match the number of states");
    for (std::size_t s = 0; s < S; ++s) {
        if (policy(s) >= model.num_actions()) throw InputError("policy action out of range");
    }
    if (!is_irreducible(model, policy)) throw SingularChain("embedded chain is not irreducible");

    Eigen::MatrixXd transition(S, S);
    Eigen::VectorXd reward(S);
    Eigen::VectorXd time(S);
    for (std::size_t s = 0; s < S; ++s) {
        auto p = model.transition(s, policy(s));
        for (std::size_t j = 0; j < S; ++j) transition(s, j) = p[j];
        reward(s) = model.reward(s, policy(s));
        time(s) = 1.0 / model.rate(s, policy(s));
    }
    return renewal_gain(transition, reward, time, tol);
}

double randomized_policy_gain(const CtmdpModel& model, std::span<const double> action_probabilities,
                              double tol) {
    const std::size_t S = model.num_states();
    const std::size_t A = model.num_actions();
    if (action_probabilities.size() != S * A) throw InputError("action probabilities must be S x A");

    Eigen::MatrixXd transition = Eigen::MatrixXd::Zero(S, S);
    Eigen::VectorXd reward = Eigen::VectorXd::Zero(S);
    Eigen::VectorXd time = Eigen::VectorXd::Zero(S);
    for (std::size_t s = 0; s < S; ++s) {
        for (std::size_t a = 0; a < A; ++a) {
            const double w = action_probabilities[s * A + a];
            auto p = model.transition(s, a);
            for (std::size_t j = 0; j < S; ++j) transition(s, j) += w * p[j];
            reward(s) += w * model.reward(s, a);
            time(s) += w / model.rate(s, a);
        }
    }
    if (!chain_irreducible(S, [&](std::size_t i, std::size_t j) { return transition(i, j) > 0.0; })) {
        throw SingularChain("embedded chain of the randomized policy is not irreducible");
    }
    return renewal_gain(transition, reward, time, tol);
}

GapQuantities compute_gaps(const CtmdpModel& model, const AverageRewardSolution& solution) {
    const std::size_t S = model.num_states();
    const std::size_t A = model.num_actions();
    const double tol = solution.tolerance > 0.0 ? solution.tolerance : 1e-8;

    GapQuantities out;
    out.num_actions = A;
    out.phi.resize(S * A);
    out.optimal.resize(S * A);
    for (std::size_t s = 0; s < S; ++s) {
        for (std::size_t a = 0; a < A; ++a) {
            const double raw = -optimality_term(model, solution.gain, solution.bias, s, a);
            const bool optimal = raw <= kOptimalSetFactor * tol;
            out.optimal[s * A + a] = optimal ? 1 : 0;
            out.phi[s * A + a] = optimal ? 0.0 : raw;
        }
    }
    const auto [lo, hi] = std::minmax_element(solution.bias.begin(), solution.bias.end());
    out.bias_span = *hi - *lo;

    if (policy_count(S, A, kExhaustivePolicyLimit) > kExhaustivePolicyLimit) {
        throw PolicySpaceTooLarge("gap g requires enumerating more than " +
                                  std::to_string(kExhaustivePolicyLimit) + " policies");
    }
    std::vector<double> gains;
    for_each_policy(S, A, [&](const Policy& policy) {
        gains.push_back(policy_gain(model, policy));
        return true;
    });
    const double best = *std::max_element(gains.begin(), gains.end());
    const double tie = std::max(1e-9, kOptimalSetFactor * tol);
    std::optional<double> runner_up;
    for (double g : gains) {
        if (g < best - tie && (!runner_up || g > *runner_up)) runner_up = g;
    }
    if (runner_up) out.gap_g = best - *runner_up;
    return out;
}

std::vector<double> min_hitting_times(const CtmdpModel& model, std::size_t target, double tol,
                                      std::size_t max_sweeps) {
    const std::size_t S = model.num_states();
    const std::size_t A = model.num_actions();
    if (target >= S) throw InputError("target state out of range");

    auto q_value = [&](const std::vector<double>& times, std::size_t s, std::size_t a) {
        auto p = model.transition(s, a);
        double v = 1.0 / model.rate(s, a);
        for (std::size_t j = 0; j < S; ++j) {
            if (j != target) v += p[j] * times[j];
        }
        return v;
    };
    auto greedy = [&](const std::vector<double>& times) {
        Policy policy{std::vector<std::size_t>(S, 0)};
        for (std::size_t s = 0; s < S; ++s) {
            double best = q_value(times, s, 0);
            for (std::size_t a = 1; a < A; ++a) {
                const double v = q_value(times, s, a);
                if (v < best) {
                    best = v;
                    policy.action[s] = a;
                }
            }
        }
        return policy;
    };

    std::vector<double> times(S, 0.0);
    std::vector<double> next(S, 0.0);
    bool converged = false;
    for (std::size_t sweep = 0; sweep < max_sweeps; ++sweep) {
        double change = 0.0;
        for (std::size_t s = 0; s < S; ++s) {
            if (s == target) {
                next[s] = 0.0;
                continue;
            }
            double best = q_value(times, s, 0);
            for (std::size_t a = 1; a < A; ++a) best = std::min(best, q_value(times, s, a));
            next[s] = best;
            change = std::max(change, std::abs(next[s] - times[s]));
        }
        times.swap(next);
        if (change < tol) {
            converged = true;
            break;
        }
    }
    if (!converged) {
        throw IterationLimitExceeded("hitting-time iteration did not converge within " +
                                     std::to_string(max_sweeps) + " sweeps");
    }

    // Polish with policy iteration: evaluate the greedy policy exactly and
    // improve until it is stable.
    Policy policy = greedy(times);
    for (int round = 0; round < 64; ++round) {
        Eigen::MatrixXd system = Eigen::MatrixXd::Identity(S, S);
        Eigen::VectorXd rhs = Eigen::VectorXd::Zero(S);
        for (std::size_t s = 0; s < S; ++s) {
            if (s == target) continue;
            auto p = model.transition(s, policy(s));
            for (std::size_t j = 0; j < S; ++j) {
                if (j != target) system(s, j) -= p[j];
            }
            rhs(s) = 1.0 / model.rate(s, policy(s));
        }
        Eigen::FullPivLU<Eigen::MatrixXd> lu(system);
        if (!lu.isInvertible()) break;
        Eigen::VectorXd exact = lu.solve(rhs);
        std::vector<double> candidate(exact.data(), exact.data() + S);
        if (std::any_of(candidate.begin(), candidate.end(), [](double x) { return !(x >= 0.0); })) break;
        times = candidate;
        Policy improved = policy;
        bool changed = false;
        for (std::size_t s = 0; s < S; ++s) {
            if (s == target) continue;
            double current = q_value(times, s, policy(s));
            for (std::size_t a = 0; a < A; ++a) {
                const double v = q_value(times, s, a);
                if (v < current - 1e-12 * std::max(1.0, current)) {
                    current = v;
                    improved.action[s] = a;
                    changed = true;
                }
            }
        }
        if (!changed) break;
        policy = improved;
    }
    return times;
}

double diameter(const CtmdpModel& model, double tol, std::size_t max_sweeps) {
    double worst = 0.0;
    for (std::size_t target = 0; target < model.num_states(); ++target) {
        const auto times = min_hitting_times(model, target, tol, max_sweeps);
        worst = std::max(worst, *std::max_element(times.begin(), times.end()));
    }
    return worst;
}

}  // namespace ctmdp
