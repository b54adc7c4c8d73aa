#include "assemblage/aggregation.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

#include "assemblage/error.hpp"

namespace assemblage {

std::string_view to_string(AggregationMode m) noexcept {
  return m == AggregationMode::unweighted ? "unweighted" : "weighted";
}

AggregationMode parse_aggregation_mode(std::string_view name) {
  if (name == "unweighted") return AggregationMode::unweighted;
  if (name == "weighted") return AggregationMode::weighted;
  throw ConfigError("unknown mode '" + std::string(name) + "' (expected unweighted or weighted)");
}

void validate_scope(const ScopeDefinition& scope) {
  if (scope.scope_id.empty()) throw ConfigError("scope with an empty id");
  if (scope.member_projects.empty()) throw ConfigError("scope '" + scope.scope_id + "' has no member projects");
  std::set<std::string> seen;
  for (const auto& m : scope.member_projects)
    if (!seen.insert(m).second) throw ConfigError("scope '" + scope.scope_id + "' lists project '" + m + "' twice");
  if (scope.member_weights.empty()) return;
  if (scope.member_weights.size() != scope.member_projects.size())
    throw ConfigError("scope '" + scope.scope_id + "' needs one weight per member project");
  double total = 0.0;
  for (double w : scope.member_weights) {
    if (!(w >= 0.0) || !std::isfinite(w)) throw ConfigError("scope '" + scope.scope_id + "' has a negative weight");
    total += w;
  }
  if (std::abs(total - 1.0) > 1e-9) throw ConfigError("weights of scope '" + scope.scope_id + "' do not sum to 1");
}

std::vector<double> scope_mean_unweighted(const PosteriorState& pool_state, std::size_t j) {
  return pool_state.posterior_mean(j);
}

void scope_mean_weighted(std::span<const PosteriorState* const> states, std::size_t j,
                         std::span<const double> weights, std::span<double> out) {
  if (states.empty()) throw ContractError("weighted scope mean over zero members");
  if (!weights.empty() && weights.size() != states.size())
    throw ContractError("weighted scope mean: weight count does not match member count");
  const std::size_t k = states.front()->categories();
  const std::size_t intervals = states.front()->intervals();
  if (out.size() != k) throw ContractError("output length does not match K");
  for (const auto* s : states)
    if (s->categories() != k || s->intervals() != intervals)
      throw ContractError("weighted scope mean: members disagree on K or J");

  std::vector<std::size_t> order(states.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return states[a]->scope_id() < states[b]->scope_id(); });

  std::vector<double> member(k);
  std::fill(out.begin(), out.end(), 0.0);
  for (std::size_t d : order) {
    states[d]->posterior_mean(j, member);
    const double w = weights.empty() ? 1.0 : weights[d];
    for (std::size_t i = 0; i < k; ++i) out[i] += w * member[i];
  }
  if (weights.empty()) {
    const double D = static_cast<double>(states.size());
    for (auto& x : out) x /= D;
  }
}

std::vector<double> scope_mean_weighted(std::span<const PosteriorState* const> states, std::size_t j,
                                        std::span<const double> weights) {
  if (states.empty()) throw ContractError("weighted scope mean over zero members");
  std::vector<double> out(states.front()->categories());
  scope_mean_weighted(states, j, weights, out);
  return out;
}

}  // namespace assemblage
