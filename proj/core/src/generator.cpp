#include "ctmdp/generator.hpp"

#include <algorithm>

#include "ctmdp/error.hpp"
#include "ctmdp/random.hpp"

namespace ctmdp {
namespace {

double draw(Rng& rng, double lo, double hi) { return lo + (hi - lo) * rng.uniform_open(); }

CtmdpModel draw_model(const GeneratorSpec& spec, Rng& rng) {
    const std::size_t S = spec.num_states;
    const std::size_t A = spec.num_actions;
    const double rate_lo = spec.rate_lo > 0.0 ? spec.rate_lo : spec.lambda_min;
    const double rate_hi = spec.rate_hi > 0.0 ? spec.rate_hi : spec.lambda_max;
    std::vector<double> reward(S * A);
    std::vector<double> rate(S * A);
    std::vector<double> transition(S * A * S, 0.0);
    CtmdpModel::Support support(S * A);

    for (std::size_t s = 0; s < S; ++s) {
        for (std::size_t a = 0; a < A; ++a) {
            const std::size_t i = s * A + a;
            reward[i] = draw(rng, spec.reward_lo, spec.reward_hi);
            rate[i] = draw(rng, rate_lo, rate_hi);
            double* row = transition.data() + i * S;
            if (spec.family == GeneratorFamily::birth_death && S > 1) {
                if (s == 0) {
                    support[i] = {1};
                } else if (s + 1 == S) {
                    support[i] = {s - 1};
                } else {
                    support[i] = {s - 1, s + 1};
                }
                if (support[i].size() == 1) {
                    row[support[i][0]] = 1.0;
                } else {
                    const double up = draw(rng, 0.1, 0.9);
                    row[s + 1] = up;
                    row[s - 1] = 1.0 - up;
                }
            } else {
                // Flat Dirichlet draw over every state.
                double total = 0.0;
                for (std::size_t j = 0; j < S; ++j) {
                    row[j] = rng.exponential(1.0);
                    total += row[j];
                }
                for (std::size_t j = 0; j < S; ++j) row[j] /= total;
                for (std::size_t j = 0; j < S; ++j) support[i].push_back(j);
            }
        }
    }
    return CtmdpModel(S, A, spec.lambda_min, spec.lambda_max, std::move(reward), std::move(rate),
                      std::move(transition), std::move(support));
}

CtmdpModel bandit(const GeneratorSpec& spec, Rng& rng) {
    const std::size_t A = spec.num_actions;
    std::vector<double> reward = spec.reward;
    std::vector<double> rate = spec.rate;
    if (reward.empty()) {
        for (std::size_t a = 0; a < A; ++a) reward.push_back(draw(rng, spec.reward_lo, spec.reward_hi));
    }
    if (rate.empty()) {
        const double lo = spec.rate_lo > 0.0 ? spec.rate_lo : spec.lambda_min;
        const double hi = spec.rate_hi > 0.0 ? spec.rate_hi : spec.lambda_max;
        for (std::size_t a = 0; a < A; ++a) rate.push_back(draw(rng, lo, hi));
    }
    if (reward.size() != A || rate.size() != A) {
        throw ModelFormatError("bandit reward and rate lists need one entry per action");
    }
    return CtmdpModel(1, A, spec.lambda_min, spec.lambda_max, std::move(reward), std::move(rate),
                      std::vector<double>(A, 1.0));
}

}  // namespace

GeneratorSpec GeneratorSpec::canonical_bandit() {
    GeneratorSpec spec;
    spec.family = GeneratorFamily::single_state_bandit;
    spec.num_states = 1;
    spec.num_actions = 2;
    spec.lambda_min = 0.5;
    spec.lambda_max = 3.0;
    spec.reward = {1.0, 0.5};
    spec.rate = {1.0, 1.0};
    return spec;
}

CtmdpModel generate(const GeneratorSpec& spec) {
    if (spec.num_states == 0 || spec.num_actions == 0) throw ModelFormatError("generator needs S, A >= 1");
    if (spec.family == GeneratorFamily::single_state_bandit && spec.num_states != 1) {
        throw ModelFormatError("single_state_bandit has exactly one state");
    }
    std::string last;
    for (int attempt = 0; attempt < kGeneratorAttempts; ++attempt) {
        Rng rng(stream_seed(spec.seed, static_cast<std::uint64_t>(attempt)));
        CtmdpModel model = spec.family == GeneratorFamily::single_state_bandit ? bandit(spec, rng)
                                                                               : draw_model(spec, rng);
        const auto report = validate_model(model);
        if (report.valid()) return model;
        last = report.violations.front().message;
    }
    throw ModelFormatError("generator produced no valid model in " + std::to_string(kGeneratorAttempts) +
                           " attempts: " + last);
}

std::string family_name(GeneratorFamily family) {
    switch (family) {
        case GeneratorFamily::birth_death: return "birth_death";
        case GeneratorFamily::random_dense: return "random_dense";
        case GeneratorFamily::single_state_bandit: return "single_state_bandit";
    }
    return "unknown";
}

GeneratorSpec generator_spec_from_json(const nlohmann::json& doc) {
    GeneratorSpec spec;
    const std::string family = doc.at("family").get<std::string>();
    if (family == "birth_death") {
        spec.family = GeneratorFamily::birth_death;
    } else if (family == "random_dense") {
        spec.family = GeneratorFamily::random_dense;
    } else if (family == "single_state_bandit") {
        spec = GeneratorSpec::canonical_bandit();
        if (doc.contains("num_actions")) {
            // A custom arm count draws whatever is not given explicitly.
            spec.reward.clear();
            spec.rate.clear();
        }
    } else {
        throw ModelFormatError("unknown generator family '" + family + "'");
    }
    try {
        spec.num_states = doc.value("num_states", spec.num_states);
        spec.num_actions = doc.value("num_actions", spec.num_actions);
        spec.lambda_min = doc.value("lambda_min", spec.lambda_min);
        spec.lambda_max = doc.value("lambda_max", spec.lambda_max);
        spec.seed = doc.value("seed", spec.seed);
        if (doc.contains("reward_range")) {
            spec.reward_lo = doc.at("reward_range").at(0).get<double>();
            spec.reward_hi = doc.at("reward_range").at(1).get<double>();
        }
        if (doc.contains("rate_range")) {
            spec.rate_lo = doc.at("rate_range").at(0).get<double>();
            spec.rate_hi = doc.at("rate_range").at(1).get<double>();
        }
        if (doc.contains("reward")) spec.reward = doc.at("reward").get<std::vector<double>>();
        if (doc.contains("rate")) spec.rate = doc.at("rate").get<std::vector<double>>();
    } catch (const nlohmann::json::exception& e) {
        throw ModelFormatError(std::string("bad generator spec: ") + e.what());
    }
    if (spec.family == GeneratorFamily::single_state_bandit && !spec.reward.empty() && !doc.contains("num_actions")) {
        spec.num_actions = spec.reward.size();
    }
    return spec;
}

nlohmann::json generator_spec_to_json(const GeneratorSpec& spec) {
    nlohmann::json doc = {
        {"family", family_name(spec.family)},
        {"num_states", spec.num_states},
        {"num_actions", spec.num_actions},
        {"lambda_min", spec.lambda_min},
        {"lambda_max", spec.lambda_max},
        {"reward_range", {spec.reward_lo, spec.reward_hi}},
        {"rate_range", {spec.rate_lo, spec.rate_hi}},
        {"seed", spec.seed},
    };
    if (!spec.reward.empty()) doc["reward"] = spec.reward;
    if (!spec.rate.empty()) doc["rate"] = spec.rate;
    return doc;
}

}  // namespace ctmdp
