#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "ctmdp/error.hpp"
#include "ctmdp/planning.hpp"
#include "fixtures.hpp"
#include "oracles.hpp"

using namespace ctmdp;

TEST(Solve, SingleStateClosedForm) {
    const auto sol = solve_average_reward(fixtures::single_state(0.7, 2.0), 1e-10);
    EXPECT_NEAR(sol.gain, 1.4, 1e-10);
    ASSERT_EQ(sol.bias.size(), 1u);
    EXPECT_EQ(sol.bias[0], 0.0);
    EXPECT_LE(sol.residual, 1e-10);
}

TEST(Solve, TwoCycleRenewalReward) {
    const auto sol = solve_average_reward(fixtures::two_cycle(), 1e-10);
    // (r0 + r1) / (1/l0 + 1/l1)
    EXPECT_NEAR(sol.gain, 0.5, 1e-10);
    // one-step equations: h0 - h1 = r0 - rho/l0 = 0.5
    EXPECT_NEAR(sol.bias[0], 0.5, 1e-9);
    EXPECT_NEAR(sol.bias[1], 0.0, 1e-12);
}

TEST(Solve, UnequalRatesCycle) {
    const auto m = fixtures::two_cycle(0.8, 0.3, 0.5, 2.0);
    const auto sol = solve_average_reward(m, 1e-10);
    EXPECT_NEAR(sol.gain, (0.8 + 0.3) / (1 / 0.5 + 1 / 2.0), 1e-10);
}

TEST(Solve, BanditPicksBetterArm) {
    const auto sol = solve_average_reward(fixtures::bandit(), 1e-10);
    EXPECT_NEAR(sol.gain, 1.0, 1e-10);
    EXPECT_EQ(sol.greedy_policy(0), 0u);
}

TEST(Solve, TiesGoToLowestAction) {
    CtmdpModel m(1, 3, 0.5, 2.0, {0.4, 0.4, 0.4}, {1.0, 1.0, 1.0}, {1.0, 1.0, 1.0});
    EXPECT_EQ(solve_average_reward(m, 1e-10).greedy_policy(0), 0u);
}

TEST(Solve, IterationCapIsAnError) {
    std::mt19937_64 rng(5);
    const auto m = oracle::random_dense_model(rng, 4, 2, 0.5, 2.0);
    EXPECT_THROW(solve_average_reward(m, 1e-12, 2), IterationLimitExceeded);
}

TEST(Solve, BenchmarkValues) {
    const auto m = fixtures::benchmark();
    const auto sol = solve_average_reward(m, 1e-10);
    EXPECT_NEAR(sol.gain, 10.0 / 14.0, 1e-10);
    EXPECT_EQ(sol.greedy_policy.action, (std::vector<std::size_t>{1, 0}));
}

TEST(PolicyGain, ClosedForms) {
    EXPECT_NEAR(policy_gain(fixtures::single_state(0.7, 2.0), Policy{{0}}), 1.4, 1e-12);
    EXPECT_NEAR(policy_gain(fixtures::two_cycle(), Policy{{0, 0}}), 0.5, 1e-12);
}

TEST(PolicyGain, ReducibleChainThrows) {
    CtmdpModel m(2, 1, 0.5, 2.0, {0, 0}, {1, 1}, {1, 0, 0, 1});
    EXPECT_THROW(policy_gain(m, Policy{{0, 0}}), SingularChain);
}

TEST(PolicyGain, RandomizedMatchesDeterministicOnPointMass) {
    const auto m = fixtures::benchmark();
    const std::vector<double> probs{0.0, 1.0, 1.0, 0.0};
    EXPECT_NEAR(randomized_policy_gain(m, probs), policy_gain(m, Policy{{1, 0}}), 1e-12);
}

TEST(Gaps, BanditValues) {
    const auto m = fixtures::bandit();
    const auto sol = solve_average_reward(m, 1e-10);
    const auto g = compute_gaps(m, sol);
    EXPECT_EQ(g.phi_at(0, 0), 0.0);
    EXPECT_NEAR(g.phi_at(0, 1), 0.5, 1e-9);
    ASSERT_TRUE(g.gap_g.has_value());
    EXPECT_NEAR(*g.gap_g, 0.5, 1e-9);
    EXPECT_EQ(g.bias_span, 0.0);
    EXPECT_TRUE(g.is_optimal(0, 0));
    EXPECT_FALSE(g.is_optimal(0, 1));
}

TEST(Gaps, IdenticalActionsHaveNoGap) {
    CtmdpModel m(2, 2, 0.5, 2.0, {0.3, 0.3, 0.6, 0.6}, {1, 1, 2, 2}, {0.2, 0.8, 0.2, 0.8, 0.5, 0.5, 0.5, 0.5});
    const auto sol = solve_average_reward(m, 1e-10);
    const auto g = compute_gaps(m, sol);
    for (double phi : g.phi) EXPECT_EQ(phi, 0.0);
    EXPECT_FALSE(g.gap_g.has_value());
}

TEST(Gaps, BenchmarkGap) {
    const auto m = fixtures::benchmark();
    const auto g = compute_gaps(m, solve_average_reward(m, 1e-10));
    // runner-up is (1, 1): stationary law (5/14, 9/14), gain 11/28
    ASSERT_TRUE(g.gap_g.has_value());
    EXPECT_NEAR(*g.gap_g, 10.0 / 14.0 - oracle::enumerated_gains(m, 1e-9)[1], 1e-9);
    EXPECT_NEAR(*g.gap_g, 9.0 / 28.0, 1e-9);
    EXPECT_GE(*g.gap_g, 0.2);
}

TEST(Gaps, PolicySpaceTooLarge) {
    std::mt19937_64 rng(9);
    const auto m = oracle::random_dense_model(rng, 13, 2, 0.5, 2.0);
    EXPECT_THROW(compute_gaps(m, solve_average_reward(m, 1e-8)), PolicySpaceTooLarge);
}

TEST(Diameter, ClosedForms) {
    EXPECT_EQ(diameter(fixtures::single_state(0.5, 1.0), 1e-10), 0.0);
    EXPECT_NEAR(diameter(fixtures::two_cycle(), 1e-10), 1.0, 1e-9);
}

TEST(Diameter, ScalesInverselyWithRates) {
    std::mt19937_64 rng(21);
    const auto m = oracle::random_dense_model(rng, 4, 2, 0.5, 2.0);
    const double d = diameter(m, 1e-10);
    EXPECT_NEAR(diameter(m.with_scaled_rates(2.0), 1e-10), d / 2.0, 1e-8);
    EXPECT_NEAR(diameter(m.with_scaled_rates(0.25), 1e-10), d * 4.0, 1e-8);
}

TEST(Diameter, MatchesEnumeratedHittingTimes) {
    std::mt19937_64 rng(33);
    for (int trial = 0; trial < 10; ++trial) {
        const auto m = oracle::random_sparse_model(rng, 4, 2, 0.5, 2.0);
        EXPECT_NEAR(diameter(m, 1e-10), oracle::enumerated_diameter(m), 1e-7) << "trial " << trial;
    }
}

TEST(Diameter, InvariantUnderRelabeling) {
    std::mt19937_64 rng(8);
    const auto m = oracle::random_dense_model(rng, 3, 2, 0.5, 2.0);
    const std::size_t perm[3] = {2, 0, 1};
    std::vector<double> r(6), l(6), p(18);
    for (std::size_t s = 0; s < 3; ++s) {
        for (std::size_t a = 0; a < 2; ++a) {
            const std::size_t t = perm[s];
            r[t * 2 + a] = m.reward(s, a);
            l[t * 2 + a] = m.rate(s, a);
            for (std::size_t j = 0; j < 3; ++j) p[(t * 2 + a) * 3 + perm[j]] = m.transition(s, a)[j];
        }
    }
    CtmdpModel relabeled(3, 2, 0.5, 2.0, r, l, p);
    EXPECT_NEAR(diameter(m, 1e-10), diameter(relabeled, 1e-10), 1e-8);
}

// Properties over random instances.
class PlanningProperties : public ::testing::TestWithParam<int> {};

TEST_P(PlanningProperties, OptimalityAndConsistency) {
    std::mt19937_64 rng(1000 + GetParam());
    const std::size_t S = 1 + GetParam() % 4;
    const std::size_t A = 1 + GetParam() % 3;
    const auto m = GetParam() % 2 ? oracle::random_dense_model(rng, S, A, 0.5, 2.0)
                                  : oracle::random_sparse_model(rng, S, A, 0.3, 3.0);
    const double tol = 1e-9;
    const auto sol = solve_average_reward(m, tol);

    EXPECT_LE(oracle::bellman_residual(m, sol.gain, sol.bias), tol);
    EXPECT_NEAR(*std::min_element(sol.bias.begin(), sol.bias.end()), 0.0, 0.0);
    EXPECT_GE(sol.gain, 0.0);
    EXPECT_LE(sol.gain, m.lambda_max());

    EXPECT_NEAR(sol.gain, policy_gain(m, sol.greedy_policy), 2 * tol);

    const auto gaps = compute_gaps(m, sol);
    for (std::size_t s = 0; s < S; ++s) {
        EXPECT_EQ(gaps.phi_at(s, sol.greedy_policy(s)), 0.0);
        for (std::size_t a = 0; a < A; ++a) EXPECT_GE(gaps.phi_at(s, a), -tol);
    }
    for_each_policy(S, A, [&](const Policy& pi) {
        EXPECT_GE(policy_gain(m, sol.greedy_policy), policy_gain(m, pi) - 2 * tol);
        return true;
    });
    EXPECT_NEAR(sol.gain, oracle::best_gain_enumerated(m), 1e-7);
}

INSTANTIATE_TEST_SUITE_P(Random, PlanningProperties, ::testing::Range(0, 24));

TEST(Uniformize, DiscreteGainTimesLambdaIsRhoStar) {
    std::mt19937_64 rng(77);
    const auto m = oracle::random_dense_model(rng, 3, 2, 0.5, 2.0);
    const auto sol = solve_average_reward(m, 1e-10);
    const auto u = uniformize(m);
    // Discrete-time gain of the greedy policy on the uniformized chain.
    CtmdpModel discrete(3, 2, 1.0, 1.0, u.reward, std::vector<double>(6, 1.0), u.transition);
    EXPECT_NEAR(u.uniformization_rate * policy_gain(discrete, sol.greedy_policy), sol.gain, 2e-10);
}
