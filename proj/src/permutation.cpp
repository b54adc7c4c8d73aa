#include "assemblage/permutation.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <map>
#include <mutex>
#include <numeric>
#include <set>
#include <thread>

#include "assemblage/error.hpp"
#include "assemblage/shuffle.hpp"

namespace assemblage {

void check_prior_compatibility(const RunConfig& config) {
  if (!(config.prior.concentration >= 0.0)) throw ConfigError("prior concentration must be >= 0");
  if (config.mode == AggregationMode::weighted && config.prior.concentration == 0.0)
    throw ConfigError("weighted mode requires alpha0 > 0: an empty member has no defined posterior mean");
  if (config.metric == Metric::kl && config.prior.concentration == 0.0)
    throw ConfigError("the kl metric requires alpha0 > 0: zero probabilities make the divergence infinite");
}

void validate_run_config(const RunConfig& config) {
  if (config.permutations < 1) throw ConfigError("permutations must be at least 1");
  if (config.workers < 1) throw ConfigError("workers must be at least 1");
  check_prior_compatibility(config);
  if (config.scopes.empty()) throw ConfigError("no scopes defined");
  if (config.comparisons.empty()) throw ConfigError("no comparisons defined");
  std::set<std::string> ids;
  for (const auto& s : config.scopes) {
    validate_scope(s);
    if (!ids.insert(s.scope_id).second) throw ConfigError("duplicate scope id '" + s.scope_id + "'");
  }
  for (const auto& [a, b] : config.comparisons) {
    if (!ids.count(a)) throw ConfigError("comparison refers to undeclared scope '" + a + "'");
    if (!ids.count(b)) throw ConfigError("comparison refers to undeclared scope '" + b + "'");
  }
}

// Private per-permutation state: project states plus pooled scope states.
class PermutationEngine::Replay final : public ReplayView {
public:
  explicit Replay(const PermutationEngine& e) : engine_(e) {
    const auto& cfg = e.config_;
    const auto J = cfg.window.interval_count();
    project_states_.reserve(e.projects_.size());
    for (const auto& p : e.projects_) project_states_.emplace_back(p, e.k_, J, cfg.prior);
    pooled_.reserve(cfg.scopes.size());
    for (const auto& s : cfg.scopes) pooled_.emplace_back(s.scope_id, e.k_, J, cfg.prior);
    member_ptrs_.resize(e.scopes_.size());
    for (std::size_t s = 0; s < e.scopes_.size(); ++s)
      for (auto m : e.scopes_[s].members) member_ptrs_[s].push_back(&project_states_[m]);
  }

  void apply(const TemporalSpread& spread) {
    const auto p = engine_.record_project_[spread.record_index];
    project_states_[p].update(spread);
    for (auto s : engine_.project_scopes_[p]) pooled_[s].update(spread);
  }

  std::size_t scope_count() const override { return pooled_.size(); }
  const std::string& scope_id(std::size_t scope) const override { return pooled_[scope].scope_id(); }
  const PosteriorState& pooled_state(std::size_t scope) const override { return pooled_[scope]; }

  bool scope_mean(std::size_t scope, std::size_t j, std::span<double> out) const override {
    if (engine_.config_.mode == AggregationMode::unweighted) {
      if (!pooled_[scope].has_mean(j)) return false;
      pooled_[scope].posterior_mean(j, out);
      return true;
    }
    const auto& members = member_ptrs_[scope];
    for (const auto* m : members)
      if (!m->has_mean(j)) return false;
    scope_mean_weighted(members, j, engine_.scopes_[scope].weights, out);
    return true;
  }

private:
  const PermutationEngine& engine_;
  std::vector<PosteriorState> project_states_;
  std::vector<PosteriorState> pooled_;
  std::vector<std::vector<const PosteriorState*>> member_ptrs_;
};

PermutationEngine::PermutationEngine(const std::vector<FindRecord>& records, std::size_t categories,
                                     RunConfig config)
    : records_(records), k_(categories), config_(std::move(config)) {
  validate_run_config(config_);
  if (k_ < 2) throw ConfigError("at least 2 categories are required");
  if (records_.empty()) throw ConfigError("no records to draw from");
  for (const auto& r : records_)
    if (r.category_index >= k_) throw ContractError("record '" + r.key + "' has an out-of-range category index");

  spreads_ = spread_records(records_, config_.window);
  if (spreads_.spreads.empty()) throw ConfigError("every record lies outside the study window");

  std::map<std::string, std::size_t> project_index;
  record_project_.resize(records_.size());
  for (std::size_t i = 0; i < records_.size(); ++i) {
    auto [it, inserted] = project_index.emplace(records_[i].project, projects_.size());
    if (inserted) projects_.push_back(records_[i].project);
    record_project_[i] = it->second;
  }
  // Scope members with no records still get a (prior-only) state.
  for (const auto& s : config_.scopes)
    for (const auto& m : s.member_projects)
      if (project_index.emplace(m, projects_.size()).second) projects_.push_back(m);

  project_scopes_.resize(projects_.size());
  std::map<std::string, std::size_t> scope_index;
  for (std::size_t s = 0; s < config_.scopes.size(); ++s) {
    const auto& def = config_.scopes[s];
    scope_index[def.scope_id] = s;
    Scope scope;
    scope.weights = def.member_weights;
    for (const auto& m : def.member_projects) {
      const auto p = project_index.at(m);
      scope.members.push_back(p);
      project_scopes_[p].push_back(s);
    }
    scopes_.push_back(std::move(scope));
  }
  for (const auto& [a, b] : config_.comparisons) {
    comparisons_.emplace_back(scope_index.at(a), scope_index.at(b));
    comparison_labels_.push_back(a + "-vs-" + b);
  }
}

std::vector<std::size_t> PermutationEngine::permutation_order(std::size_t r) const {
  std::vector<std::size_t> order(spreads_.spreads.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  if (!config_.identity_order) shuffle_indices(order, config_.seed, r);
  return order;
}

PermutationResult PermutationEngine::run_permutation(std::size_t r, const DrawObserver& observer) const {
  if (r >= config_.permutations) throw ContractError("permutation index out of range");
  PermutationResult out;
  Replay replay(*this);
  const auto order = permutation_order(r);
  const std::size_t nscopes = scopes_.size();
  std::vector<double> means(nscopes * k_);
  std::vector<char> defined(nscopes);
  std::vector<char> needed(nscopes, 0);
  for (const auto& [a, b] : comparisons_) needed[a] = needed[b] = 1;

  std::size_t t = 0;
  for (auto idx : order) {
    const auto& spread = spreads_.spreads[idx];
    replay.apply(spread);
    ++t;
    for (std::size_t j = spread.first_interval; j <= spread.last_interval; ++j) {
      for (std::size_t s = 0; s < nscopes; ++s)
        if (needed[s]) defined[s] = replay.scope_mean(s, j, std::span<double>(means.data() + s * k_, k_));
      for (std::size_t c = 0; c < comparisons_.size(); ++c) {
        const auto [a, b] = comparisons_[c];
        if (!defined[a] || !defined[b]) {
          ++out.undefined;
          continue;
        }
        const std::span<const double> p(means.data() + a * k_, k_);
        const std::span<const double> q(means.data() + b * k_, k_);
        out.samples.push_back(PhiSample{static_cast<std::uint32_t>(c), static_cast<std::uint32_t>(j),
                                        static_cast<std::uint32_t>(r), static_cast<std::uint32_t>(t),
                                        distance(config_.metric, p, q).value});
      }
    }
    if (observer) observer(DrawEvent{r, t, records_[spread.record_index], spread, replay});
  }
  out.draws = t;
  return out;
}

RunResult PermutationEngine::run_all() const {
  const std::size_t R = config_.permutations;
  std::vector<PermutationResult> parts(R);
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto work = [&] {
    for (std::size_t r = next++; r < R; r = next++) {
      try {
        parts[r] = run_permutation(r);
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
        next = R;
      }
    }
  };
  const std::size_t workers = std::min(config_.workers, R);
  if (workers <= 1) {
    work();
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(work);
  }
  if (failure) std::rethrow_exception(failure);

  // Stable counting sort on (comparison, interval); parts are visited in
  // permutation order and each part is already in draw order.
  const std::size_t J = config_.window.interval_count();
  const std::size_t keys = comparisons_.size() * J;
  std::vector<std::size_t> offset(keys + 1, 0);
  RunResult result;
  std::size_t total = 0;
  for (const auto& part : parts) {
    for (const auto& s : part.samples) ++offset[s.comparison * J + s.interval + 1];
    total += part.samples.size();
    result.draw_events += part.draws;
    result.undefined_samples += part.undefined;
  }
  std::partial_sum(offset.begin(), offset.end(), offset.begin());
  result.samples.resize(total);
  std::vector<std::size_t> cursor(offset.begin(), offset.end() - 1);
  for (auto& part : parts) {
    for (const auto& s : part.samples) result.samples[cursor[s.comparison * J + s.interval]++] = s;
    part.samples = {};
  }
  for (std::size_t key = 0; key < keys; ++key) {
    if (offset[key] == offset[key + 1]) continue;
    result.groups.push_back(SampleGroup{static_cast<std::uint32_t>(key / J), static_cast<std::uint32_t>(key % J),
                                        offset[key], offset[key + 1]});
  }
  return result;
}

PermutationResult run_permutation(const std::vector<FindRecord>& records, std::size_t categories, std::size_t r,
                                  const RunConfig& config) {
  return PermutationEngine(records, categories, config).run_permutation(r);
}

RunResult run_all(const std::vector<FindRecord>& records, std::size_t categories, const RunConfig& config) {
  return PermutationEngine(records, categories, config).run_all();
}

}  // namespace assemblage
