#include "ctmdp/sim.hpp"

#include <algorithm>
#include <cmath>

#include "ctmdp/error.hpp"
#include "ctmdp/io.hpp"
#include "ctmdp/random.hpp"

namespace ctmdp {
namespace {

McEstimate summarize(const std::vector<double>& samples) {
    McEstimate out;
    out.runs = samples.size();
    if (samples.empty()) return out;
    double sum = 0.0;
    for (double x : samples) sum += x;
    out.mean = sum / static_cast<double>(samples.size());
    if (samples.size() > 1) {
        double ss = 0.0;
        for (double x : samples) ss += (x - out.mean) * (x - out.mean);
        const double var = ss / static_cast<double>(samples.size() - 1);
        out.standard_error = std::sqrt(var / static_cast<double>(samples.size()));
    }
    return out;
}

}  // namespace

std::vector<double> geometric_checkpoints(double horizon, std::size_t count) {
    std::vector<double> out;
    for (std::size_t j = count; j-- > 0;) out.push_back(std::ldexp(horizon, -static_cast<int>(j)));
    return out;
}

std::vector<double> effective_checkpoints(std::vector<double> checkpoints, const Horizon& horizon) {
    const bool by_time = horizon.kind == Horizon::Kind::time;
    const double limit = by_time ? horizon.time : static_cast<double>(horizon.steps);
    if (checkpoints.empty() && limit > 0.0) checkpoints = geometric_checkpoints(limit);
    std::sort(checkpoints.begin(), checkpoints.end());
    checkpoints.erase(std::remove_if(checkpoints.begin(), checkpoints.end(),
                                     [&](double c) { return !(c >= 0.0 && c <= limit); }),
                      checkpoints.end());
    if (!by_time) {
        for (double& c : checkpoints) c = std::floor(c);
    }
    checkpoints.erase(std::unique(checkpoints.begin(), checkpoints.end()), checkpoints.end());
    return checkpoints;
}

SimulationResult simulate(const CtmdpModel& model, Agent& agent, Horizon horizon, double rho_star,
                          const SimulationOptions& options) {
    if (options.initial_state >= model.num_states()) throw InputError("initial state out of range");
    const bool by_time = horizon.kind == Horizon::Kind::time;
    const double limit = by_time ? horizon.time : static_cast<double>(horizon.steps);
    if (!(limit >= 0.0)) throw InputError("horizon must be nonnegative");

    const std::vector<double> checkpoints = effective_checkpoints(options.checkpoints, horizon);

    // Stream 0 of the seed; agents draw from other streams.
    Rng rng(stream_seed(options.seed, 0));
    SimulationResult result;
    auto& points = result.regret.points;
    std::size_t next_checkpoint = 0;

    std::size_t state = options.initial_state;
    double clock = 0.0;
    double cumulative = 0.0;
    std::uint64_t n = 0;

    auto flush_steps = [&]() {
        while (next_checkpoint < checkpoints.size() &&
               checkpoints[next_checkpoint] <= static_cast<double>(n)) {
            points.push_back({clock, n, cumulative, rho_star * clock - cumulative});
            ++next_checkpoint;
        }
    };
    if (!by_time) flush_steps();

    while (by_time ? clock < horizon.time : n < horizon.steps) {
        if (by_time) {
            while (next_checkpoint < checkpoints.size() && checkpoints[next_checkpoint] < clock) {
                const double c = checkpoints[next_checkpoint++];
                points.push_back({c, n, cumulative, rho_star * c - cumulative});
            }
        }
        const std::size_t action = agent.act(state);
        if (action >= model.num_actions()) throw InputError("agent returned an out-of-range action");
        const double reward = model.reward(state, action);
        const double tau = rng.exponential(model.rate(state, action));
        const std::size_t next_state = rng.categorical(model.transition(state, action));
        if (options.record_trajectory) {
            result.trajectory.records.push_back({n, state, action, tau, reward, clock});
        }
        cumulative += reward;
        ++n;
        agent.observe(state, action, tau, next_state);
        clock += tau;
        state = next_state;
        if (!by_time) flush_steps();
    }
    if (by_time) {
        for (; next_checkpoint < checkpoints.size(); ++next_checkpoint) {
            const double c = checkpoints[next_checkpoint];
            points.push_back({c, n, cumulative, rho_star * c - cumulative});
        }
    }
    result.trajectory.total_decisions = n;
    result.trajectory.final_clock = clock;
    result.episodes = agent.episodes();
    return result;
}

McEstimate estimate_agent_gain_mc(const CtmdpModel& model, const AgentFactory& factory,
                                  double horizon_time, std::span<const std::uint64_t> seeds,
                                  std::size_t initial_state) {
    if (!(horizon_time > 0.0)) throw InputError("Monte-Carlo horizon must be positive");
    std::vector<double> samples;
    for (std::uint64_t seed : seeds) {
        auto agent = factory(seed);
        SimulationOptions options;
        options.seed = seed;
        options.initial_state = initial_state;
        options.checkpoints = {horizon_time};
        options.record_trajectory = false;
        const auto run = simulate(model, *agent, Horizon::of_time(horizon_time), 0.0, options);
        samples.push_back(run.regret.points.back().cum_reward / horizon_time);
    }
    return summarize(samples);
}

McEstimate estimate_policy_gain_mc(const CtmdpModel& model, const Policy& policy, double horizon_time,
                                   std::span<const std::uint64_t> seeds, std::size_t initial_state) {
    return estimate_agent_gain_mc(
        model, [&](std::uint64_t) { return std::make_unique<FixedPolicyAgent>(policy); }, horizon_time,
        seeds, initial_state);
}

CountBoundsReport count_bounds_check(const CtmdpModel& model, const Policy& policy, double horizon_time,
                                     std::span<const std::uint64_t> seeds) {
    CountBoundsReport report;
    double sum = 0.0;
    for (std::uint64_t seed : seeds) {
        FixedPolicyAgent agent(policy);
        SimulationOptions options;
        options.seed = seed;
        options.checkpoints = {horizon_time};
        options.record_trajectory = false;
        const auto run = simulate(model, agent, Horizon::of_time(horizon_time), 0.0, options);
        const std::uint64_t decisions = run.regret.points.back().decisions;
        report.counts.push_back(decisions);
        sum += static_cast<double>(decisions) - 1.0;
    }
    report.mean_count = seeds.empty() ? 0.0 : sum / static_cast<double>(seeds.size());
    const double slack = 4.0 * std::sqrt(model.lambda_max() * horizon_time);
    report.lower = model.lambda_min() * horizon_time - slack;
    report.upper = model.lambda_max() * horizon_time + slack;
    report.passed = !seeds.empty() && report.mean_count >= report.lower && report.mean_count <= report.upper;
    return report;
}

void write_trajectory_csv(std::ostream& out, const Trajectory& trajectory, const nlohmann::json* metadata) {
    if (metadata) out << "# " << metadata->dump() << '\n';
    out << "n,state,action,holding_time,reward,clock\n";
    for (const auto& r : trajectory.records) {
        out << r.n << ',' << r.state << ',' << r.action << ',' << format_real(r.holding_time) << ','
            << format_real(r.reward) << ',' << format_real(r.clock) << '\n';
    }
}

void write_regret_rows(std::ostream& out, std::uint64_t seed, const RegretRecord& record) {
    for (const auto& p : record.points) {
        out << seed << ',' << format_real(p.time) << ',' << p.decisions << ',' << format_real(p.cum_reward)
            << ',' << format_real(p.regret) << '\n';
    }
}

}  // namespace ctmdp
