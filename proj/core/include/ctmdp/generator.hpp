#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "ctmdp/model.hpp"

namespace ctmdp {

enum class GeneratorFamily { birth_death, random_dense, single_state_bandit };

struct GeneratorSpec {
    GeneratorFamily family = GeneratorFamily::random_dense;
    std::size_t num_states = 3;
    std::size_t num_actions = 2;
    double lambda_min = 0.5;
    double lambda_max = 2.0;
    double reward_lo = 0.0;
    double reward_hi = 1.0;
    /// Rates are drawn in [rate_lo, rate_hi]; a nonpositive value means the
    /// corresponding rate bound.
    double rate_lo = 0.0;
    double rate_hi = 0.0;
    std::uint64_t seed = 0;
    /// single_state_bandit only: explicit per-action rewards and rates.
    std::vector<double> reward;
    std::vector<double> rate;

    /// r = (1, 0.5), lambda = (1, 1), lambda in [0.5, 3].
    static GeneratorSpec canonical_bandit();
};

/// Model drawn from `spec`, redrawn on validation failure up to
/// kGeneratorAttempts times (ModelFormatError after that). Deterministic in spec.seed.
CtmdpModel generate(const GeneratorSpec& spec);

inline constexpr int kGeneratorAttempts = 100;

std::string family_name(GeneratorFamily family);
GeneratorSpec generator_spec_from_json(const nlohmann::json& doc);
nlohmann::json generator_spec_to_json(const GeneratorSpec& spec);

}  // namespace ctmdp
