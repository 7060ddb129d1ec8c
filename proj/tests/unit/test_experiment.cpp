#include <gtest/gtest.h>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "ctmdp/error.hpp"
#include "ctmdp/experiment.hpp"
#include "ctmdp/io.hpp"
#include "ctmdp/planning.hpp"
#include "fixtures.hpp"

using namespace ctmdp;
namespace fs = std::filesystem;

namespace {

ExperimentConfig benchmark_config() {
    ExperimentConfig config;
    config.inline_model = model_to_json(fixtures::benchmark());
    config.agents = {{"ct-ucrl", std::nullopt}, {"uniform_random", std::nullopt}};
    config.horizon = Horizon::of_time(300.0);
    config.seed_count = 4;
    config.checkpoints = {100.0, 300.0};
    config.grid_resolution = 1e-2;
    return config;
}

std::string slurp(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

fs::path scratch(const std::string& name) {
    auto dir = fs::temp_directory_path() / ("ctmdp_test_" + name);
    fs::remove_all(dir);
    return dir;
}

}  // namespace

TEST(Delta, Resolution) {
    EXPECT_DOUBLE_EQ(resolve_delta({}, Horizon::of_steps(1000), 2.0), 1e-3);
    EXPECT_DOUBLE_EQ(resolve_delta({}, Horizon::of_time(16000.0), 2.0), 1.0 / 32000.0);
    EXPECT_DOUBLE_EQ(resolve_delta({}, Horizon::of_time(0.3), 2.0), 0.5);
    EXPECT_DOUBLE_EQ(resolve_delta({false, 0.1}, Horizon::of_time(10.0), 2.0), 0.1);
    EXPECT_THROW(resolve_delta({false, 1.0}, Horizon::of_time(10.0), 2.0), InvalidDelta);
    EXPECT_TRUE(parse_delta("one-over-n").one_over_n);
    EXPECT_EQ(parse_delta("0.05").value, 0.05);
    EXPECT_THROW(parse_delta("often"), InputError);
}

TEST(Config, ParsesAndRoundTrips) {
    const auto doc = nlohmann::json::parse(R"({
        "model": "bench.json",
        "agents": ["ct-ucrl", {"name": "greedy_no_optimism", "delta": 0.01}],
        "delta": "one-over-n",
        "horizon": {"steps": 500},
        "seeds": {"count": 3, "base": 10},
        "checkpoints": [100, 500],
        "jobs": 2
    })");
    const auto config = experiment_config_from_json(doc, "/data");
    EXPECT_EQ(*config.model_path, fs::path("/data/bench.json"));
    ASSERT_EQ(config.agents.size(), 2u);
    EXPECT_EQ(config.agents[1].kind, "greedy_no_optimism");
    EXPECT_EQ(config.agents[1].delta->value, 0.01);
    EXPECT_EQ(config.horizon.kind, Horizon::Kind::steps);
    EXPECT_EQ(config.seed_count, 3u);
    EXPECT_EQ(config.base_seed, 10u);
    const auto again = experiment_config_from_json(experiment_config_to_json(config));
    EXPECT_EQ(experiment_config_to_json(again), experiment_config_to_json(config));

    EXPECT_THROW(experiment_config_from_json(nlohmann::json::parse(R"({"horizon": {"time": 5}})")), InputError);
    EXPECT_THROW(experiment_config_from_json(nlohmann::json::parse(R"({"model": "m.json", "agents": ["oracle"]})")),
                 InputError);
    EXPECT_THROW(experiment_config_from_json(
                     nlohmann::json::parse(R"({"model": "m.json", "horizon": {"time": 5, "steps": 4}})")),
                 InputError);
}

TEST(Experiment, ZeroHorizonStillReportsInstance) {
    auto config = benchmark_config();
    config.horizon = Horizon::of_steps(0);
    config.checkpoints.clear();
    const auto result = run_experiment(config);
    EXPECT_NEAR(result.rho_star, 10.0 / 14.0, 1e-9);
    ASSERT_TRUE(result.constants.has_value());
    for (const auto& agent : result.agents) {
        EXPECT_TRUE(agent.checkpoints.empty());
        const std::string csv = regret_csv(result, agent);
        EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 2);
    }
    const auto summary = experiment_summary(result);
    EXPECT_EQ(summary.at("schema"), kSummarySchema);
    EXPECT_TRUE(summary.at("instance").at("C_of_M").is_number());
}

TEST(Experiment, OutputsAreByteIdentical) {
    const auto config = benchmark_config();
    const auto a = scratch("det_a");
    const auto b = scratch("det_b");
    write_experiment_outputs(run_experiment(config), a);
    write_experiment_outputs(run_experiment(config), b);
    for (const char* name : {"summary.json", "regret_ct-ucrl.csv", "regret_uniform_random.csv"}) {
        ASSERT_TRUE(fs::exists(a / name)) << name;
        EXPECT_EQ(slurp(a / name), slurp(b / name)) << name;
    }
    fs::remove_all(a);
    fs::remove_all(b);
}

TEST(Experiment, JobsDoNotChangeResults) {
    auto config = benchmark_config();
    config.jobs = 1;
    const auto serial = run_experiment(config);
    config.jobs = 3;
    const auto parallel = run_experiment(config);
    for (std::size_t i = 0; i < serial.agents.size(); ++i) {
        EXPECT_EQ(regret_csv(serial, serial.agents[i]), regret_csv(serial, parallel.agents[i]));
    }
}

TEST(Experiment, SummaryShape) {
    auto config = benchmark_config();
    config.write_trajectories = true;
    const auto result = run_experiment(config);
    ASSERT_EQ(result.agents.size(), 2u);
    const auto& ucrl = result.agents[0];
    EXPECT_EQ(ucrl.agent, "ct-ucrl");
    EXPECT_DOUBLE_EQ(ucrl.delta, 1.0 / 600.0);
    ASSERT_EQ(ucrl.runs.size(), 4u);
    for (std::size_t k = 0; k < 4; ++k) {
        EXPECT_EQ(ucrl.runs[k].seed, k);
        EXPECT_TRUE(ucrl.runs[k].ok);
        EXPECT_GE(ucrl.runs[k].episodes, 1u);
    }
    ASSERT_EQ(ucrl.checkpoints.size(), 2u);
    EXPECT_EQ(ucrl.checkpoints[1].checkpoint, 300.0);
    EXPECT_EQ(ucrl.checkpoints[1].runs, 4u);
    const auto dir = scratch("shape");
    write_experiment_outputs(result, dir);
    EXPECT_TRUE(fs::exists(dir / "trajectory_ct-ucrl_3.csv"));
    const auto summary = load_json(dir / "summary.json");
    EXPECT_EQ(summary.at("agents").size(), 2u);
    EXPECT_TRUE(summary.at("agents")[0].at("failures").empty());
    const std::string csv = slurp(dir / "regret_ct-ucrl.csv");
    EXPECT_EQ(csv.substr(0, 2), "# ");
    EXPECT_NE(csv.find("\nseed,T,decisions,cum_reward,regret\n"), std::string::npos);
    fs::remove_all(dir);
}

TEST(Experiment, OutOfRangeCheckpointsAreDropped) {
    auto config = benchmark_config();
    config.checkpoints = {-1.0, 50.0, 1e6};
    const auto result = run_experiment(config);
    ASSERT_EQ(result.agents[0].checkpoints.size(), 1u);
    EXPECT_EQ(result.agents[0].checkpoints[0].checkpoint, 50.0);
}

TEST(Experiment, InvalidModelIsRejected) {
    auto config = benchmark_config();
    auto doc = model_to_json(fixtures::benchmark());
    doc["rate"][0][0] = 5.0;
    config.inline_model = doc;
    EXPECT_THROW(run_experiment(config), ModelFormatError);
}

TEST(Experiment, UniformRandomRegretSlope) {
    ExperimentConfig config;
    config.inline_model = model_to_json(fixtures::benchmark());
    config.agents = {{"uniform_random", std::nullopt}};
    config.horizon = Horizon::of_time(4000.0);
    config.checkpoints = {4000.0};
    config.seed_count = 20;
    config.lower_bound = false;
    const auto result = run_experiment(config);
    const double uniform = randomized_policy_gain(fixtures::benchmark(), std::vector<double>(4, 0.5));
    const double slope = result.agents[0].checkpoints[0].mean_regret / 4000.0;
    EXPECT_NEAR(slope, result.rho_star - uniform, 0.1 * (result.rho_star - uniform));
}
