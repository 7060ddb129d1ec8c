#include <benchmark/benchmark.h>

#include <random>

#include "ctmdp/generator.hpp"
#include "ctmdp/learner.hpp"
#include "ctmdp/optimism.hpp"
#include "ctmdp/planning.hpp"
#include "ctmdp/sim.hpp"

using namespace ctmdp;

namespace {

CtmdpModel dense(std::size_t S, std::size_t A) {
    GeneratorSpec spec;
    spec.family = GeneratorFamily::random_dense;
    spec.num_states = S;
    spec.num_actions = A;
    spec.seed = 7;
    return generate(spec);
}

void BM_RelativeValueIteration(benchmark::State& state) {
    const auto m = dense(static_cast<std::size_t>(state.range(0)), 3);
    for (auto _ : state) benchmark::DoNotOptimize(solve_average_reward(m, 1e-9).gain);
}
BENCHMARK(BM_RelativeValueIteration)->Arg(5)->Arg(20)->Arg(50);

void BM_InnerMax(benchmark::State& state) {
    const std::size_t S = static_cast<std::size_t>(state.range(0));
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::vector<double> p(S), u(S);
    double total = 0.0;
    for (auto& x : p) total += x = unit(rng);
    for (auto& x : p) x /= total;
    for (auto& x : u) x = unit(rng);
    for (auto _ : state) benchmark::DoNotOptimize(inner_max_transition(p, 0.3, u));
}
BENCHMARK(BM_InnerMax)->Arg(5)->Arg(50)->Arg(500);

void BM_ExtendedValueIteration(benchmark::State& state) {
    const auto m = dense(static_cast<std::size_t>(state.range(0)), 3);
    Statistics stats(m.num_states(), m.num_actions());
    Rng rng(5);
    for (std::size_t s = 0; s < m.num_states(); ++s) {
        for (std::size_t a = 0; a < m.num_actions(); ++a) {
            for (int i = 0; i < 200; ++i) {
                stats.record(s, a, rng.exponential(m.rate(s, a)), rng.categorical(m.transition(s, a)), 1e-3,
                             m.lambda_min());
            }
        }
    }
    const auto set = build_confidence_set(stats, 1000, 1e-3, m.lambda_min(), m.lambda_max());
    for (auto _ : state) benchmark::DoNotOptimize(extended_value_iteration(set, m.rewards(), 1e-3).gain);
}
BENCHMARK(BM_ExtendedValueIteration)->Arg(5)->Arg(20);

void BM_SimulateCtUcrl(benchmark::State& state) {
    const auto m = dense(4, 2);
    const double rho = solve_average_reward(m, 1e-10).gain;
    for (auto _ : state) {
        CtUcrl learner(LearnerConfig::from_model(m, 1e-3));
        SimulationOptions opt;
        opt.record_trajectory = false;
        benchmark::DoNotOptimize(simulate(m, learner, Horizon::of_steps(state.range(0)), rho, opt).episodes);
    }
}
BENCHMARK(BM_SimulateCtUcrl)->Arg(1000)->Arg(10000)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
