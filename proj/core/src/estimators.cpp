#include "ctmdp/estimators.hpp"

#include <algorithm>
#include <cmath>
#include <tuple>

#include "ctmdp/error.hpp"

namespace ctmdp {
namespace {

void check_delta(double delta) {
    if (!(delta > 0.0 && delta < 1.0)) throw InvalidDelta(delta);
}

ConfidenceSet empty_set(const Statistics& stats, std::uint64_t t_k, double delta, double lambda_min,
                        double lambda_max) {
    check_delta(delta);
    if (t_k < 1) throw InputError("episode start t_k must be at least 1");
    if (!(lambda_min > 0.0 && lambda_max >= lambda_min)) {
        throw InputError("rate bounds must satisfy 0 < lambda_min <= lambda_max");
    }
    const std::size_t S = stats.num_states();
    const std::size_t A = stats.num_actions();
    ConfidenceSet set;
    set.num_states = S;
    set.num_actions = A;
    set.episode_start = t_k;
    set.delta = delta;
    set.lambda_min = lambda_min;
    set.lambda_max = lambda_max;
    set.p_hat.assign(S * A * S, 0.0);
    set.p_radius.assign(S * A, 0.0);
    set.mean_hat.assign(S * A, 0.0);
    set.m_radius.assign(S * A, 0.0);
    set.mean_lo.assign(S * A, 1.0 / lambda_max);
    set.mean_hi.assign(S * A, 1.0 / lambda_min);
    for (std::size_t s = 0; s < S; ++s) {
        for (std::size_t a = 0; a < A; ++a) {
            const auto& pair = stats.at(s, a);
            double* row = set.p_hat.data() + set.pair(s, a) * S;
            if (pair.visit_count == 0) {
                row[0] = 1.0;
            } else {
                for (std::size_t j = 0; j < S; ++j) {
                    row[j] = static_cast<double>(pair.transition_counts[j]) /
                             static_cast<double>(pair.visit_count);
                }
                set.mean_hat[set.pair(s, a)] = truncated_mean(pair);
            }
        }
    }
    return set;
}

}  // namespace

double truncation_threshold(std::uint64_t sample_index, double delta, double lambda_min) {
    check_delta(delta);
    return std::sqrt(2.0 * static_cast<double>(sample_index) /
                     (lambda_min * lambda_min * std::log(1.0 / delta)));
}

void record_transition(PairStatistics& stats, double holding_time, std::size_t next_state,
                       double delta, double lambda_min) {
    check_delta(delta);
    if (!(holding_time >= 0.0)) throw InputError("holding time must be nonnegative");
    if (next_state >= stats.transition_counts.size()) throw InputError("next state out of range");
    ++stats.visit_count;
    ++stats.transition_counts[next_state];
    ++stats.sample_index;
    stats.raw_sum += holding_time;
    if (holding_time <= truncation_threshold(stats.sample_index, delta, lambda_min)) {
        stats.truncated_sum += holding_time;
    }
}

double truncated_mean(const PairStatistics& stats) {
    if (stats.visit_count == 0) throw NoSamples();
    return stats.truncated_sum / static_cast<double>(stats.visit_count);
}

Statistics::Statistics(std::size_t num_states, std::size_t num_actions)
    : num_states_(num_states), num_actions_(num_actions), pairs_(num_states * num_actions) {
    for (auto& p : pairs_) p.transition_counts.assign(num_states, 0);
}

void Statistics::record(std::size_t s, std::size_t a, double holding_time, std::size_t next_state,
                        double delta, double lambda_min) {
    record_transition(at(s, a), holding_time, next_state, delta, lambda_min);
}

std::uint64_t Statistics::total_visits() const {
    std::uint64_t total = 0;
    for (const auto& p : pairs_) total += p.visit_count;
    return total;
}

nlohmann::json statistics_to_json(const Statistics& stats) {
    nlohmann::json pairs = nlohmann::json::array();
    for (std::size_t s = 0; s < stats.num_states(); ++s) {
        for (std::size_t a = 0; a < stats.num_actions(); ++a) {
            const auto& p = stats.at(s, a);
            pairs.push_back({{"state", s},
                             {"action", a},
                             {"visit_count", p.visit_count},
                             {"transition_counts", p.transition_counts},
                             {"truncated_sum", p.truncated_sum},
                             {"raw_sum", p.raw_sum},
                             {"sample_index", p.sample_index}});
        }
    }
    return {{"num_states", stats.num_states()}, {"num_actions", stats.num_actions()}, {"pairs", pairs}};
}

Statistics statistics_from_json(const nlohmann::json& doc) {
    Statistics stats(doc.at("num_states").get<std::size_t>(), doc.at("num_actions").get<std::size_t>());
    for (const auto& entry : doc.at("pairs")) {
        auto& p = stats.at(entry.at("state").get<std::size_t>(), entry.at("action").get<std::size_t>());
        p.visit_count = entry.at("visit_count").get<std::uint64_t>();
        p.transition_counts = entry.at("transition_counts").get<std::vector<std::uint64_t>>();
        p.truncated_sum = entry.at("truncated_sum").get<double>();
        p.raw_sum = entry.at("raw_sum").get<double>();
        p.sample_index = entry.at("sample_index").get<std::uint64_t>();
        if (p.transition_counts.size() != stats.num_states()) {
            throw InputError("statistics checkpoint has a malformed transition count row");
        }
    }
    return stats;
}

double transition_radius(std::size_t num_states, std::size_t num_actions, std::uint64_t t_k,
                         double delta, std::uint64_t visits) {
    const double n = static_cast<double>(std::max<std::uint64_t>(1, visits));
    return std::sqrt(14.0 * static_cast<double>(num_states) *
                     std::log(2.0 * static_cast<double>(num_actions) * static_cast<double>(t_k) / delta) /
                     n);
}

double mean_radius(std::size_t num_states, std::size_t num_actions, std::uint64_t t_k, double delta,
                   double lambda_min, std::uint64_t visits) {
    const double n = static_cast<double>(std::max<std::uint64_t>(1, visits));
    const double pairs = static_cast<double>(num_actions) * static_cast<double>(num_states);
    return (4.0 / lambda_min) *
           std::sqrt(14.0 * std::log(2.0 * pairs * static_cast<double>(t_k) / delta) / n);
}

std::pair<double, double> plausible_mean_interval(double mean_hat, double radius, double lambda_min,
                                                  double lambda_max) {
    const double floor = 1.0 / lambda_max;
    const double ceiling = 1.0 / lambda_min;
    const double lo = std::max(mean_hat - radius, floor);
    const double hi = std::min(mean_hat + radius, ceiling);
    if (lo <= hi) return {lo, hi};
    return {floor, ceiling};
}

std::pair<double, double> ConfidenceSet::rate_interval(std::size_t s, std::size_t a) const {
    const std::size_t i = pair(s, a);
    const double lo = std::clamp(1.0 / mean_hi[i], lambda_min, lambda_max);
    const double hi = std::clamp(1.0 / mean_lo[i], lambda_min, lambda_max);
    return {lo, hi};
}

ConfidenceSet build_confidence_set(const Statistics& stats, std::uint64_t t_k, double delta,
                                   double lambda_min, double lambda_max) {
    ConfidenceSet set = empty_set(stats, t_k, delta, lambda_min, lambda_max);
    for (std::size_t s = 0; s < set.num_states; ++s) {
        for (std::size_t a = 0; a < set.num_actions; ++a) {
            const std::size_t i = set.pair(s, a);
            const std::uint64_t n = stats.at(s, a).visit_count;
            set.p_radius[i] = transition_radius(set.num_states, set.num_actions, t_k, delta, n);
            set.m_radius[i] = mean_radius(set.num_states, set.num_actions, t_k, delta, lambda_min, n);
            std::tie(set.mean_lo[i], set.mean_hi[i]) =
                plausible_mean_interval(set.mean_hat[i], set.m_radius[i], lambda_min, lambda_max);
        }
    }
    return set;
}

ConfidenceSet build_point_estimate_set(const Statistics& stats, std::uint64_t t_k, double delta,
                                       double lambda_min, double lambda_max) {
    ConfidenceSet set = empty_set(stats, t_k, delta, lambda_min, lambda_max);
    for (std::size_t i = 0; i < set.mean_hat.size(); ++i) {
        const double m = std::clamp(set.mean_hat[i], 1.0 / lambda_max, 1.0 / lambda_min);
        set.mean_lo[i] = m;
        set.mean_hi[i] = m;
    }
    return set;
}

bool contains(const ConfidenceSet& set, const CtmdpModel& model, double slack) {
    if (model.num_states() != set.num_states || model.num_actions() != set.num_actions) return false;
    for (std::size_t s = 0; s < set.num_states; ++s) {
        for (std::size_t a = 0; a < set.num_actions; ++a) {
            auto p = model.transition(s, a);
            auto q = set.p_hat_at(s, a);
            double l1 = 0.0;
            for (std::size_t j = 0; j < set.num_states; ++j) l1 += std::abs(p[j] - q[j]);
            if (l1 > set.p_radius[set.pair(s, a)] + slack) return false;
            const auto [lo, hi] = set.rate_interval(s, a);
            const double rate = model.rate(s, a);
            if (rate < lo * (1.0 - slack) - slack || rate > hi * (1.0 + slack) + slack) return false;
        }
    }
    return true;
}

}  // namespace ctmdp
