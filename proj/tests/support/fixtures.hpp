#pragma once

// Small hand-built models shared by the unit and acceptance tests.

#include <filesystem>
#include <vector>

#include "ctmdp/estimators.hpp"
#include "ctmdp/model.hpp"

namespace fixtures {

inline ctmdp::CtmdpModel single_state(double r, double lambda, double lmin = 0.5, double lmax = 2.0) {
    return ctmdp::CtmdpModel(1, 1, lmin, lmax, {r}, {lambda}, {1.0});
}

/// Deterministic 2-cycle with rewards (r0, r1) and rates (l0, l1).
inline ctmdp::CtmdpModel two_cycle(double r0 = 1.0, double r1 = 0.0, double l0 = 1.0, double l1 = 1.0,
                                   double lmin = 0.5, double lmax = 2.0) {
    return ctmdp::CtmdpModel(2, 1, lmin, lmax, {r0, r1}, {l0, l1}, {0.0, 1.0, 1.0, 0.0});
}

/// One state, two arms: r = (1, 0.5), lambda = (1, 1).
inline ctmdp::CtmdpModel bandit(double lmax = 3.0) {
    return ctmdp::CtmdpModel(1, 2, 0.5, lmax, {1.0, 0.5}, {1.0, 1.0}, {1.0, 1.0});
}

/// Two states, two actions, every rate 1, lambda in [0.5, 2]. Action 1 is
/// optimal in state 0 and action 0 in state 1; the learner's tie-break
/// prefers action 0, so it has to learn state 0.
inline ctmdp::CtmdpModel benchmark() {
    return ctmdp::CtmdpModel(2, 2, 0.5, 2.0, {0.2, 0.2, 1.0, 0.5}, {1.0, 1.0, 1.0, 1.0},
                             {0.9, 0.1, 0.1, 0.9,  //
                              0.5, 0.5, 0.5, 0.5});
}

/// Confidence set centred on the true model with the given radii.
inline ctmdp::ConfidenceSet set_around(const ctmdp::CtmdpModel& m, double p_radius, double m_radius) {
    ctmdp::ConfidenceSet set;
    set.num_states = m.num_states();
    set.num_actions = m.num_actions();
    set.episode_start = 1;
    set.delta = 0.05;
    set.lambda_min = m.lambda_min();
    set.lambda_max = m.lambda_max();
    set.p_hat = m.transitions();
    set.p_radius.assign(m.num_pairs(), p_radius);
    set.m_radius.assign(m.num_pairs(), m_radius);
    for (double l : m.rates()) {
        set.mean_hat.push_back(1.0 / l);
        const auto [lo, hi] = ctmdp::plausible_mean_interval(1.0 / l, m_radius, m.lambda_min(), m.lambda_max());
        set.mean_lo.push_back(lo);
        set.mean_hi.push_back(hi);
    }
    return set;
}

inline std::filesystem::path data_dir() { return CTMDP_TEST_DATA_DIR; }

}  // namespace fixtures
