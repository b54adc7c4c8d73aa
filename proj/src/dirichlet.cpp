#include "assemblage/dirichlet.hpp"

#include <cmath>

#include "assemblage/error.hpp"

namespace assemblage {

PosteriorState::PosteriorState(std::string scope_id, std::size_t categories, std::size_t intervals,
                               PriorSpec prior)
    : scope_id_(std::move(scope_id)), k_(categories), j_(intervals), prior_(prior) {
  if (k_ < 2) throw ConfigError("a posterior needs at least 2 categories, got " + std::to_string(k_));
  if (j_ < 1) throw ConfigError("a posterior needs at least 1 interval");
  if (!(prior_.concentration >= 0.0) || !std::isfinite(prior_.concentration))
    throw ConfigError("prior concentration must be a finite non-negative number");
  counts_.assign(k_ * j_, 0.0);
  totals_.assign(j_, 0.0);
}

void PosteriorState::update(const TemporalSpread& spread) {
  if (spread.category_index >= k_)
    throw ContractError("category index " + std::to_string(spread.category_index) +
                        " out of range for K=" + std::to_string(k_));
  if (spread.interval_count != j_ || spread.last_interval >= j_ || spread.first_interval > spread.last_interval)
    throw ContractError("spread has " + std::to_string(spread.interval_count) + " intervals, state has " +
                        std::to_string(j_));
  for (std::size_t j = spread.first_interval; j <= spread.last_interval; ++j) {
    counts_[j * k_ + spread.category_index] += spread.amount;
    totals_[j] += spread.amount;
  }
}

void PosteriorState::posterior_mean(std::size_t j, std::span<double> out) const {
  if (j >= j_) throw ContractError("interval " + std::to_string(j) + " out of range");
  if (out.size() != k_) throw ContractError("output length does not match K");
  if (!has_mean(j))
    throw EmptyIntervalError("scope '" + scope_id_ + "' has no data in interval " + std::to_string(j) +
                             " and a zero prior");
  const double alpha = prior_.concentration;
  const double denom = static_cast<double>(k_) * alpha + totals_[j];
  const double* c = counts_.data() + j * k_;
  for (std::size_t i = 0; i < k_; ++i) out[i] = (alpha + c[i]) / denom;
}

std::vector<double> PosteriorState::posterior_mean(std::size_t j) const {
  std::vector<double> out(k_);
  posterior_mean(j, out);
  return out;
}

PosteriorState new_state(std::string scope_id, std::size_t categories, std::size_t intervals, PriorSpec prior) {
  return PosteriorState(std::move(scope_id), categories, intervals, prior);
}

}  // namespace assemblage
