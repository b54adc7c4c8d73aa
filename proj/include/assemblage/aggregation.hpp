#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "assemblage/dirichlet.hpp"

namespace assemblage {

/// How a multi-project scope turns member data into one distribution.
///  - unweighted: pool all member draws into one urn.
///  - weighted: average the members' posterior means (each member counts
///    equally regardless of how much it has yielded).
enum class AggregationMode { unweighted, weighted };

std::string_view to_string(AggregationMode m) noexcept;
AggregationMode parse_aggregation_mode(std::string_view name);

struct ScopeDefinition {
  std::string scope_id;
  std::vector<std::string> member_projects;
  /// Per-member weights for weighted mode; empty means 1/D each.
  std::vector<double> member_weights;
};

/// Validates a scope: non-empty, unique members, weights (if any) non-negative,
/// one per member, summing to 1 within 1e-9. Throws ConfigError.
void validate_scope(const ScopeDefinition& scope);

/// Posterior mean of a state that accumulates every member project's draws.
std::vector<double> scope_mean_unweighted(const PosteriorState& pool_state, std::size_t j);

/// Weighted average of member posterior means at interval j. `weights` empty
/// means uniform 1/D. Members are summed in scope_id order, so the result
/// does not depend on the order of `states`.
///
/// A member without data at j contributes its prior mean; with a zero prior
/// that is undefined and EmptyIntervalError is thrown.
std::vector<double> scope_mean_weighted(std::span<const PosteriorState* const> states, std::size_t j,
                                        std::span<const double> weights = {});
void scope_mean_weighted(std::span<const PosteriorState* const> states, std::size_t j,
                         std::span<const double> weights, std::span<double> out);

}  // namespace assemblage
