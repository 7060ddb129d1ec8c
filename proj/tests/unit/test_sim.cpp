#include <gtest/gtest.h>

#include <cmath>
#include <numeric>
#include <sstream>

#include "ctmdp/learner.hpp"
#include "ctmdp/planning.hpp"
#include "ctmdp/random.hpp"
#include "ctmdp/sim.hpp"
#include "fixtures.hpp"
#include "oracles.hpp"

using namespace ctmdp;

namespace {

std::vector<std::uint64_t> seed_range(std::uint64_t n, std::uint64_t base = 0) {
    std::vector<std::uint64_t> out(n);
    std::iota(out.begin(), out.end(), base);
    return out;
}

}  // namespace

TEST(Rng, OpenUniformAndStreams) {
    Rng rng(1);
    for (int i = 0; i < 10000; ++i) {
        const double u = rng.uniform_open();
        ASSERT_GT(u, 0.0);
        ASSERT_LT(u, 1.0);
    }
    EXPECT_NE(stream_seed(5, 0), stream_seed(5, 1));
    EXPECT_EQ(stream_seed(5, 3), stream_seed(5, 3));
    Rng a(9), b(9);
    for (int i = 0; i < 100; ++i) EXPECT_EQ(a.exponential(1.5), b.exponential(1.5));
}

TEST(Rng, FrozenStream) {
    // First draws of the documented generator, frozen so that seeds stay stable across releases.
    Rng rng(42);
    std::mt19937_64 ref(42);
    const double u = (static_cast<double>(ref() >> 11) + 0.5) * 0x1.0p-53;
    EXPECT_EQ(rng.exponential(2.0), -std::log(u) / 2.0);
}

TEST(Simulate, SingleStateRegretIdentity) {
    const auto m = fixtures::single_state(0.7, 2.0);
    double sum = 0.0, sq = 0.0;
    const int seeds = 200;
    for (int k = 0; k < seeds; ++k) {
        FixedPolicyAgent agent(Policy{{0}});
        SimulationOptions opt;
        opt.seed = static_cast<std::uint64_t>(k);
        opt.checkpoints = {1000.0};
        opt.record_trajectory = false;
        const auto run = simulate(m, agent, Horizon::of_time(1000.0), 1.4, opt);
        ASSERT_EQ(run.regret.points.size(), 1u);
        const auto& p = run.regret.points[0];
        EXPECT_NEAR(p.regret, 1400.0 - 0.7 * static_cast<double>(p.decisions), 1e-8);
        sum += p.regret;
        sq += p.regret * p.regret;
    }
    const double mean = sum / seeds;
    const double se = std::sqrt((sq / seeds - mean * mean) / (seeds - 1));
    EXPECT_LE(std::abs(mean), 0.7 + 3 * se);
}

TEST(Simulate, ZeroHorizonIsEmpty) {
    const auto m = fixtures::benchmark();
    FixedPolicyAgent agent(Policy{{1, 0}});
    const auto run = simulate(m, agent, Horizon::of_time(0.0), 0.7, {});
    EXPECT_TRUE(run.trajectory.records.empty());
    EXPECT_TRUE(run.regret.points.empty());
    FixedPolicyAgent agent2(Policy{{1, 0}});
    const auto steps = simulate(m, agent2, Horizon::of_steps(0), 0.7, {});
    EXPECT_TRUE(steps.trajectory.records.empty());
    EXPECT_TRUE(steps.regret.points.empty());
}

TEST(Simulate, DeterministicBytes) {
    const auto m = fixtures::benchmark();
    auto once = [&]() {
        CtUcrl learner(LearnerConfig::from_model(m, 0.01));
        SimulationOptions opt;
        opt.seed = 77;
        const auto run = simulate(m, learner, Horizon::of_time(500.0), 0.7, opt);
        std::ostringstream out;
        write_trajectory_csv(out, run.trajectory);
        write_regret_rows(out, 77, run.regret);
        return out.str();
    };
    EXPECT_EQ(once(), once());
}

TEST(Simulate, TrajectoryInvariants) {
    const auto m = fixtures::benchmark();
    UniformRandomAgent agent(2, 5);
    SimulationOptions opt;
    opt.seed = 5;
    const auto run = simulate(m, agent, Horizon::of_time(300.0), 0.7, opt);
    const auto& recs = run.trajectory.records;
    ASSERT_FALSE(recs.empty());
    EXPECT_EQ(recs.front().clock, 0.0);
    for (std::size_t i = 0; i < recs.size(); ++i) {
        EXPECT_EQ(recs[i].n, i);
        EXPECT_GT(recs[i].holding_time, 0.0);
        EXPECT_LT(recs[i].clock, 300.0);
        if (i > 0) {
            EXPECT_GT(recs[i].clock, recs[i - 1].clock);
            EXPECT_DOUBLE_EQ(recs[i].clock, recs[i - 1].clock + recs[i - 1].holding_time);
        }
    }
    EXPECT_GE(run.trajectory.final_clock, 300.0);
}

TEST(Simulate, CheckpointsCountActionsStartedByT) {
    const auto m = fixtures::benchmark();
    UniformRandomAgent agent(2, 11);
    SimulationOptions opt;
    opt.seed = 11;
    opt.checkpoints = {0.0, 3.3, 10.0, 57.5, 200.0};
    const double rho = 10.0 / 14.0;
    const auto run = simulate(m, agent, Horizon::of_time(200.0), rho, opt);
    ASSERT_EQ(run.regret.points.size(), 5u);
    std::uint64_t prev = 0;
    for (const auto& p : run.regret.points) {
        std::uint64_t n = 0;
        double cum = 0.0;
        for (const auto& r : run.trajectory.records) {
            if (r.clock <= p.time) {
                ++n;
                cum += r.reward;
            }
        }
        EXPECT_EQ(p.decisions, n);
        EXPECT_NEAR(p.cum_reward, cum, 1e-9);
        EXPECT_NEAR(p.regret, rho * p.time - cum, 1e-9);
        EXPECT_GE(p.decisions, prev);
        prev = p.decisions;
    }
    // The decision at time 0 counts at T = 0.
    EXPECT_EQ(run.regret.points[0].decisions, 1u);
}

TEST(Simulate, StepHorizon) {
    const auto m = fixtures::benchmark();
    FixedPolicyAgent agent(Policy{{1, 0}});
    SimulationOptions opt;
    opt.seed = 2;
    opt.checkpoints = {10, 100};
    const auto run = simulate(m, agent, Horizon::of_steps(100), 0.5, opt);
    EXPECT_EQ(run.trajectory.total_decisions, 100u);
    ASSERT_EQ(run.regret.points.size(), 2u);
    const auto& last = run.regret.points[1];
    EXPECT_EQ(last.decisions, 100u);
    EXPECT_DOUBLE_EQ(last.time, run.trajectory.final_clock);
    EXPECT_NEAR(last.regret, 0.5 * last.time - last.cum_reward, 1e-12);
}

TEST(Simulate, DefaultCheckpointsAreGeometric) {
    const auto grid = geometric_checkpoints(1024.0, 4);
    EXPECT_EQ(grid, (std::vector<double>{128.0, 256.0, 512.0, 1024.0}));
}

TEST(Simulate, HoldingTimesAreExponential) {
    CtmdpModel m(2, 2, 0.5, 2.0, {0.1, 0.2, 0.3, 0.4}, {0.5, 2.0, 1.3, 0.8},
                 {0.5, 0.5, 0.5, 0.5, 0.5, 0.5, 0.5, 0.5});
    UniformRandomAgent agent(2, 19);
    SimulationOptions opt;
    opt.seed = 19;
    const auto run = simulate(m, agent, Horizon::of_steps(44000), 0.0, opt);
    std::vector<std::vector<double>> samples(4);
    for (const auto& r : run.trajectory.records) samples[r.state * 2 + r.action].push_back(r.holding_time);
    for (std::size_t i = 0; i < 4; ++i) {
        samples[i].resize(std::min<std::size_t>(samples[i].size(), 10000));
        ASSERT_EQ(samples[i].size(), 10000u);
        EXPECT_LT(oracle::ks_exponential(samples[i], m.rates()[i]), oracle::ks_critical_1pct(10000)) << i;
    }
}

TEST(MonteCarlo, SingleStateGain) {
    const auto seeds = seed_range(30);
    const auto est = estimate_policy_gain_mc(fixtures::single_state(0.7, 2.0), Policy{{0}}, 2000.0, seeds);
    EXPECT_NEAR(est.mean, 1.4, 3 * est.standard_error + 1e-3);
    EXPECT_EQ(est.runs, 30u);
}

TEST(MonteCarlo, TwoCycleMatchesPolicyGain) {
    const auto m = fixtures::two_cycle();
    const auto seeds = seed_range(20);
    const auto est = estimate_policy_gain_mc(m, Policy{{0, 0}}, 10000.0, seeds);
    EXPECT_NEAR(est.mean, policy_gain(m, Policy{{0, 0}}), 0.02 * 0.5);
}

TEST(MonteCarlo, StandardErrorShrinksWithHorizon) {
    const auto m = fixtures::benchmark();
    const auto seeds = seed_range(200);
    const auto short_run = estimate_policy_gain_mc(m, Policy{{1, 0}}, 500.0, seeds);
    const auto long_run = estimate_policy_gain_mc(m, Policy{{1, 0}}, 2000.0, seeds);
    // Four times the horizon, half the standard error.
    EXPECT_NEAR(long_run.standard_error / short_run.standard_error, 0.5, 0.15);
}

TEST(MonteCarlo, UniformRandomRegretSlope) {
    const auto m = fixtures::benchmark();
    const double rho = solve_average_reward(m, 1e-10).gain;
    const std::vector<double> half(4, 0.5);
    const double uniform = randomized_policy_gain(m, half);
    const double T = 4000.0;
    double total = 0.0;
    const int seeds = 20;
    for (int k = 0; k < seeds; ++k) {
        UniformRandomAgent agent(2, stream_seed(k, 1));
        SimulationOptions opt;
        opt.seed = static_cast<std::uint64_t>(k);
        opt.checkpoints = {T};
        opt.record_trajectory = false;
        total += simulate(m, agent, Horizon::of_time(T), rho, opt).regret.points[0].regret;
    }
    EXPECT_NEAR(total / seeds / T, rho - uniform, 0.1 * (rho - uniform));
    // Monte-Carlo estimate of the uniform mixture agrees with the stationary computation.
    const auto seeds_v = seed_range(20);
    const auto est = estimate_agent_gain_mc(
        m, [](std::uint64_t s) { return std::make_unique<UniformRandomAgent>(2, stream_seed(s, 1)); }, T, seeds_v);
    EXPECT_NEAR(est.mean, uniform, 0.02 * uniform);
}

TEST(CountBounds, PoissonExtremesAndMixed) {
    const auto seeds = seed_range(20);
    const double T = 1000.0;
    const auto slow = count_bounds_check(fixtures::two_cycle(0.5, 0.5, 0.5, 0.5, 0.5, 2.0), Policy{{0, 0}}, T, seeds);
    EXPECT_TRUE(slow.passed);
    EXPECT_NEAR(slow.mean_count, 0.5 * T, 3 * std::sqrt(0.5 * T / 20));
    const auto fast = count_bounds_check(fixtures::two_cycle(0.5, 0.5, 2.0, 2.0, 0.5, 2.0), Policy{{0, 0}}, T, seeds);
    EXPECT_TRUE(fast.passed);
    EXPECT_NEAR(fast.mean_count, 2.0 * T, 3 * std::sqrt(2.0 * T / 20));
    const auto mixed = count_bounds_check(fixtures::two_cycle(0.5, 0.5, 0.5, 2.0, 0.5, 2.0), Policy{{0, 0}}, T, seeds);
    EXPECT_TRUE(mixed.passed);
    EXPECT_GT(mixed.mean_count, 0.5 * T);
    EXPECT_LT(mixed.mean_count, 2.0 * T);
}

TEST(Csv, Headers) {
    Trajectory t;
    t.records.push_back({0, 1, 0, 0.25, 0.5, 0.0});
    std::ostringstream out;
    write_trajectory_csv(out, t);
    EXPECT_EQ(out.str(), "n,state,action,holding_time,reward,clock\n0,1,0,0.25,0.5,0\n");
    EXPECT_STREQ(kRegretCsvHeader, "seed,T,decisions,cum_reward,regret");
}
