#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "assemblage/ingestion.hpp"

namespace assemblage {

/// Symmetric Dirichlet prior: the same concentration for every category and
/// interval. Zero gives plain empirical frequencies.
struct PriorSpec {
  double concentration = 1.0;
};

/// Dirichlet-categorical posterior for one scope across J intervals.
/// Holds the accumulated (fractional) category counts per interval; the
/// posterior for interval j is Dir(alpha + c_j).
class PosteriorState {
public:
  PosteriorState(std::string scope_id, std::size_t categories, std::size_t intervals, PriorSpec prior);

  const std::string& scope_id() const noexcept { return scope_id_; }
  std::size_t categories() const noexcept { return k_; }
  std::size_t intervals() const noexcept { return j_; }
  const PriorSpec& prior() const noexcept { return prior_; }

  double count(std::size_t j, std::size_t i) const { return counts_[j * k_ + i]; }
  double total(std::size_t j) const { return totals_[j]; }
  std::span<const double> counts(std::size_t j) const { return {counts_.data() + j * k_, k_}; }

  /// Adds one draw: the spread's mass for its category in every covered interval.
  void update(const TemporalSpread& spread);

  /// True when posterior_mean(j) is defined.
  bool has_mean(std::size_t j) const noexcept { return prior_.concentration > 0.0 || totals_[j] > 0.0; }

  /// (alpha + c_ij) / (K alpha + n_j). Throws EmptyIntervalError when alpha = 0 and n_j = 0.
  std::vector<double> posterior_mean(std::size_t j) const;
  void posterior_mean(std::size_t j, std::span<double> out) const;

private:
  std::string scope_id_;
  std::size_t k_;
  std::size_t j_;
  PriorSpec prior_;
  std::vector<double> counts_;  // J x K, row-major
  std::vector<double> totals_;  // n_j
};

/// Convenience constructor mirroring the module contract.
PosteriorState new_state(std::string scope_id, std::size_t categories, std::size_t intervals, PriorSpec prior);

}  // namespace assemblage
