#include <cmath>
#include <string>
#include <vector>

#include "ctmdp/model.hpp"

namespace ctmdp {
namespace {

constexpr double kRowSumTolerance = 1e-12;

// Forward and backward reachability from state 0 over `edge(i, j)`.
template <class Edge>
bool strongly_connected(std::size_t n, Edge&& edge) {
    auto reaches_all = [&](bool forward) {
        std::vector<char> seen(n, 0);
        std::vector<std::size_t> stack{0};
        seen[0] = 1;
        std::size_t count = 1;
        while (!stack.empty()) {
            std::size_t i = stack.back();
            stack.pop_back();
            for (std::size_t j = 0; j < n; ++j) {
                if (seen[j]) continue;
                if (forward ? edge(i, j) : edge(j, i)) {
                    seen[j] = 1;
                    ++count;
                    stack.push_back(j);
                }
            }
        }
        return count == n;
    };
    return reaches_all(true) && reaches_all(false);
}

std::string pair_label(std::size_t s, std::size_t a) {
    return "(s=" + std::to_string(s) + ", a=" + std::to_string(a) + ")";
}

std::string policy_label(const Policy& policy) {
    std::string out = "[";
    for (std::size_t s = 0; s < policy.size(); ++s) {
        if (s) out += ",";
        out += std::to_string(policy.action[s]);
    }
    return out + "]";
}

}  // namespace

bool is_irreducible(const CtmdpModel& model, const Policy& policy) {
    return strongly_connected(model.num_states(), [&](std::size_t i, std::size_t j) {
        return model.transition(i, policy(i))[j] > 0.0;
    });
}

bool is_communicating(const CtmdpModel& model) {
    return strongly_connected(model.num_states(), [&](std::size_t i, std::size_t j) {
        for (std::size_t a = 0; a < model.num_actions(); ++a) {
            if (model.transition(i, a)[j] > 0.0) return true;
        }
        return false;
    });
}

ValidationReport validate_model(const CtmdpModel& model, std::uint64_t exhaustive_limit) {
    ValidationReport report;
    auto add = [&](std::string kind, std::optional<std::size_t> s, std::optional<std::size_t> a,
                   std::string message) {
        report.violations.push_back({std::move(kind), s, a, std::nullopt, std::move(message)});
    };

    const std::size_t S = model.num_states();
    const std::size_t A = model.num_actions();
    const bool bounds_ok = std::isfinite(model.lambda_min()) && std::isfinite(model.lambda_max()) &&
                           model.lambda_min() > 0.0 && model.lambda_max() >= model.lambda_min();
    if (!bounds_ok) {
        add("rate_bounds", std::nullopt, std::nullopt,
            "require 0 < lambda_min <= lambda_max < inf");
    }

    for (std::size_t s = 0; s < S; ++s) {
        for (std::size_t a = 0; a < A; ++a) {
            const std::string where = pair_label(s, a);
            const double r = model.reward(s, a);
            if (!(r >= 0.0 && r <= 1.0)) add("reward_range", s, a, "reward outside [0,1] at " + where);

            const double rate = model.rate(s, a);
            if (!(rate >= model.lambda_min() && rate <= model.lambda_max())) {
                add("rate_range", s, a, "rate outside [lambda_min, lambda_max] at " + where);
            }

            auto p = model.transition(s, a);
            double sum = 0.0;
            bool negative = false;
            for (double x : p) {
                if (!(x >= 0.0)) negative = true;
                sum += x;
            }
            if (negative) add("negative_probability", s, a, "negative transition entry at " + where);
            if (!(std::abs(sum - 1.0) <= kRowSumTolerance)) {
                add("row_sum", s, a, "transition row does not sum to 1 at " + where);
            }

            std::vector<char> in_support(S, 0);
            for (std::size_t j : model.support(s, a)) in_support[j] = 1;
            for (std::size_t j = 0; j < S; ++j) {
                if ((p[j] > 0.0) != static_cast<bool>(in_support[j])) {
                    add("support", s, a,
                        "p(" + std::to_string(j) + "|s,a) > 0 disagrees with S+(s,a) at " + where);
                    break;
                }
            }
        }
    }

    const std::uint64_t policies = policy_count(S, A, exhaustive_limit);
    if (policies <= exhaustive_limit) {
        report.irreducibility_mode = IrreducibilityCheck::exhaustive;
        std::size_t failures = 0;
        for_each_policy(S, A, [&](const Policy& policy) {
            if (!is_irreducible(model, policy)) {
                if (failures < kMaxReportedPolicies) {
                    report.violations.push_back({"irreducibility", std::nullopt, std::nullopt, policy,
                                                 "embedded chain of policy " + policy_label(policy) +
                                                     " is not irreducible"});
                }
                ++failures;
            }
            return true;
        });
        if (failures > kMaxReportedPolicies) {
            report.warnings.push_back(std::to_string(failures - kMaxReportedPolicies) +
                                      " further reducible policies not listed");
        }
    } else {
        report.irreducibility_mode = IrreducibilityCheck::communicating;
        report.warnings.push_back(
            "policy space exceeds the exhaustive limit; only the communicating property was checked");
        if (!is_communicating(model)) {
            add("communicating", std::nullopt, std::nullopt, "model is not communicating");
        }
    }
    return report;
}

}  // namespace ctmdp
