#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "ctmdp/model.hpp"

namespace ctmdp {

/// Sufficient statistics of one state-action pair.
struct PairStatistics {
    std::uint64_t visit_count = 0;
    std::vector<std::uint64_t> transition_counts;  // N(s,a,s')
    double truncated_sum = 0.0;  // sum of samples that passed their truncation threshold
    double raw_sum = 0.0;        // sum of every sample
    std::uint64_t sample_index = 0;

    bool operator==(const PairStatistics&) const = default;
};

/// Truncation level sqrt(2 i / (lambda_min^2 log(1/delta))) for the i-th (1-based) sample.
double truncation_threshold(std::uint64_t sample_index, double delta, double lambda_min);

/// Count one observed transition and holding time. Throws InvalidDelta.
void record_transition(PairStatistics& stats, double holding_time, std::size_t next_state,
                       double delta, double lambda_min);

/// Truncated empirical mean holding time, truncated_sum / N. Throws NoSamples.
double truncated_mean(const PairStatistics& stats);

/// Statistics for every pair of an S x A model.
class Statistics {
public:
    Statistics() = default;
    Statistics(std::size_t num_states, std::size_t num_actions);

    std::size_t num_states() const { return num_states_; }
    std::size_t num_actions() const { return num_actions_; }

    PairStatistics& at(std::size_t s, std::size_t a) { return pairs_[s * num_actions_ + a]; }
    const PairStatistics& at(std::size_t s, std::size_t a) const { return pairs_[s * num_actions_ + a]; }

    void record(std::size_t s, std::size_t a, double holding_time, std::size_t next_state,
                double delta, double lambda_min);

    std::uint64_t total_visits() const;

    bool operator==(const Statistics&) const = default;

private:
    std::size_t num_states_ = 0;
    std::size_t num_actions_ = 0;
    std::vector<PairStatistics> pairs_;
};

nlohmann::json statistics_to_json(const Statistics& stats);
Statistics statistics_from_json(const nlohmann::json& doc);

/// L1 radius sqrt(14 S log(2 A t_k / delta) / max(1, N)).
double transition_radius(std::size_t num_states, std::size_t num_actions, std::uint64_t t_k,
                         double delta, std::uint64_t visits);

/// Mean-holding-time radius (4/lambda_min) sqrt(14 log(2 A S t_k / delta) / max(1, N)).
double mean_radius(std::size_t num_states, std::size_t num_actions, std::uint64_t t_k, double delta,
                   double lambda_min, std::uint64_t visits);

/// [m - d, m + d] intersected with [1/lambda_max, 1/lambda_min], or the whole
/// of [1/lambda_max, 1/lambda_min] when the intersection is empty.
std::pair<double, double> plausible_mean_interval(double mean_hat, double radius, double lambda_min,
                                                  double lambda_max);

/**
 * Plausible-model set of one episode: an L1 ball around the empirical
 * transition law and an interval for the mean holding time 1/lambda, per pair.
 *
 * The mean interval is [m - d, m + d] intersected with [1/lambda_max, 1/lambda_min];
 * when that intersection is empty the whole of [1/lambda_max, 1/lambda_min] is used.
 */
struct ConfidenceSet {
    std::size_t num_states = 0;
    std::size_t num_actions = 0;
    std::uint64_t episode_start = 1;  // t_k
    double delta = 0.0;
    double lambda_min = 0.0;
    double lambda_max = 0.0;
    std::vector<double> p_hat;          // S x A x S
    std::vector<double> p_radius;       // S x A
    std::vector<double> mean_hat;       // S x A, 0 for unvisited pairs
    std::vector<double> m_radius;       // S x A
    std::vector<double> mean_lo;        // S x A, clamped interval for 1/lambda
    std::vector<double> mean_hi;

    std::size_t pair(std::size_t s, std::size_t a) const { return s * num_actions + a; }
    std::span<const double> p_hat_at(std::size_t s, std::size_t a) const {
        return {p_hat.data() + pair(s, a) * num_states, num_states};
    }
    /// Plausible rates [1/mean_hi, 1/mean_lo], a subset of [lambda_min, lambda_max].
    std::pair<double, double> rate_interval(std::size_t s, std::size_t a) const;
};

/// Confidence set at episode start t_k (t_k >= 1). Unvisited pairs get a point
/// mass on state 0 as p_hat.
ConfidenceSet build_confidence_set(const Statistics& stats, std::uint64_t t_k, double delta,
                                   double lambda_min, double lambda_max);

/// Degenerate set for a certainty-equivalent agent: zero radii and the mean
/// estimate projected onto [1/lambda_max, 1/lambda_min].
ConfidenceSet build_point_estimate_set(const Statistics& stats, std::uint64_t t_k, double delta,
                                       double lambda_min, double lambda_max);

/// True iff every transition row of `model` is within the L1 radius and every
/// rate within the plausible interval (both up to `slack`).
bool contains(const ConfidenceSet& set, const CtmdpModel& model, double slack = 1e-12);

}  // namespace ctmdp
