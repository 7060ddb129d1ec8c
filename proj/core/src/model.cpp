#include "ctmdp/model.hpp"

#include <limits>

#include "ctmdp/error.hpp"

namespace ctmdp {

CtmdpModel::CtmdpModel(std::size_t num_states, std::size_t num_actions, double lambda_min,
                       double lambda_max, std::vector<double> reward, std::vector<double> rate,
                       std::vector<double> transition, Support support)
    : num_states_(num_states),
      num_actions_(num_actions),
      lambda_min_(lambda_min),
      lambda_max_(lambda_max),
      reward_(std::move(reward)),
      rate_(std::move(rate)),
      transition_(std::move(transition)),
      support_(std::move(support)) {
    if (num_states_ == 0 || num_actions_ == 0) {
        throw ModelFormatError("num_states and num_actions must be positive");
    }
    const std::size_t pairs = num_states_ * num_actions_;
    if (reward_.size() != pairs) throw ModelFormatError("reward must be an S x A array");
    if (rate_.size() != pairs) throw ModelFormatError("rate must be an S x A array");
    if (transition_.size() != pairs * num_states_) {
        throw ModelFormatError("transition must be an S x A x S array");
    }
    if (support_.empty()) {
        support_.reserve(pairs);
        for (std::size_t s = 0; s < num_states_; ++s) {
            for (std::size_t a = 0; a < num_actions_; ++a) {
                support_.push_back(positive_support(this->transition(s, a)));
            }
        }
    } else if (support_.size() != pairs) {
        throw ModelFormatError("support must have one entry per state-action pair");
    }
    for (const auto& entry : support_) {
        for (std::size_t j : entry) {
            if (j >= num_states_) throw ModelFormatError("support entry out of range");
        }
    }
}

CtmdpModel CtmdpModel::with_scaled_rates(double factor) const {
    std::vector<double> scaled = rate_;
    for (double& r : scaled) r *= factor;
    return CtmdpModel(num_states_, num_actions_, lambda_min_ * factor, lambda_max_ * factor, reward_,
                      std::move(scaled), transition_, support_);
}

std::vector<std::size_t> positive_support(std::span<const double> p) {
    std::vector<std::size_t> out;
    for (std::size_t j = 0; j < p.size(); ++j) {
        if (p[j] > 0.0) out.push_back(j);
    }
    return out;
}

std::uint64_t policy_count(std::size_t num_states, std::size_t num_actions, std::uint64_t cap) {
    std::uint64_t count = 1;
    for (std::size_t s = 0; s < num_states; ++s) {
        if (count > (cap + 1) / num_actions) return cap + 1;
        count *= num_actions;
        if (count > cap) return cap + 1;
    }
    return count;
}

}  // namespace ctmdp
