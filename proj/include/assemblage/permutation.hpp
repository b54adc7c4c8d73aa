#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "assemblage/aggregation.hpp"
#include "assemblage/dirichlet.hpp"
#include "assemblage/ingestion.hpp"
#include "assemblage/metrics.hpp"

namespace assemblage {

struct RunConfig {
  std::size_t permutations = 40;
  std::uint64_t seed = 0;
  PriorSpec prior{1.0};
  AggregationMode mode = AggregationMode::unweighted;
  StudyWindow window;
  std::vector<ScopeDefinition> scopes;
  std::vector<std::pair<std::string, std::string>> comparisons;
  Metric metric = Metric::hellinger;
  /// Replay every permutation in input order instead of shuffling.
  bool identity_order = false;
  std::size_t workers = 1;
};

/// Rejects prior/mode/metric combinations that cannot be evaluated: weighted
/// mode and the kl metric both need alpha0 > 0. Throws ConfigError.
void check_prior_compatibility(const RunConfig& config);

/// Checks the invariants of a RunConfig that do not depend on data. Throws ConfigError.
void validate_run_config(const RunConfig& config);

/// One distance value after one draw, for one comparison and interval.
struct PhiSample {
  std::uint32_t comparison;   ///< index into RunConfig::comparisons
  std::uint32_t interval;     ///< 0-based
  std::uint32_t permutation;  ///< 0-based
  std::uint32_t draw_index;   ///< 1-based position in the permuted stream
  double value;
};

/// Read access to all scope states in the middle of a replay.
class ReplayView {
public:
  virtual ~ReplayView() = default;
  virtual std::size_t scope_count() const = 0;
  virtual const std::string& scope_id(std::size_t scope) const = 0;
  /// State pooling every draw from the scope's member projects.
  virtual const PosteriorState& pooled_state(std::size_t scope) const = 0;
  /// Scope mean under the run's aggregation mode; false when undefined (zero prior, no data).
  virtual bool scope_mean(std::size_t scope, std::size_t j, std::span<double> out) const = 0;
};

struct DrawEvent {
  std::size_t permutation;
  std::size_t draw_index;  ///< 1-based
  const FindRecord& record;
  const TemporalSpread& spread;
  const ReplayView& view;
};

using DrawObserver = std::function<void(const DrawEvent&)>;

struct PermutationResult {
  std::vector<PhiSample> samples;  ///< draw order
  std::size_t draws = 0;
  std::size_t undefined = 0;  ///< comparisons skipped because a side had no defined mean
};

struct SampleGroup {
  std::uint32_t comparison;
  std::uint32_t interval;
  std::size_t begin;  ///< offset into RunResult::samples
  std::size_t end;
};

struct RunResult {
  /// Ordered by comparison, interval, permutation, draw_index.
  std::vector<PhiSample> samples;
  std::vector<SampleGroup> groups;  ///< non-empty groups only, same order
  std::size_t draw_events = 0;      ///< accepted records x permutations
  std::size_t undefined_samples = 0;
};

/// Replays Dirichlet-categorical updating over shuffled record orders and
/// measures every comparison after every draw.
///
/// Each draw adds one record's temporal spread to its project state and to
/// the pooled state of every scope containing that project. Then, for every
/// comparison and every interval the record touches, one sample is emitted.
class PermutationEngine {
public:
  /// `records` must outlive the engine. Out-of-window records are excluded
  /// from the draw stream (see skipped_records()).
  PermutationEngine(const std::vector<FindRecord>& records, std::size_t categories, RunConfig config);

  const RunConfig& config() const noexcept { return config_; }
  std::size_t categories() const noexcept { return k_; }
  std::size_t draws_per_permutation() const noexcept { return spreads_.spreads.size(); }
  const std::vector<std::size_t>& skipped_records() const noexcept { return spreads_.skipped_records; }
  const std::vector<std::string>& comparison_labels() const noexcept { return comparison_labels_; }

  /// Order of the accepted records (indices into spreads) for permutation r.
  std::vector<std::size_t> permutation_order(std::size_t r) const;

  PermutationResult run_permutation(std::size_t r, const DrawObserver& observer = {}) const;

  /// All R permutations, possibly on several threads; output does not depend
  /// on the worker count.
  RunResult run_all() const;

private:
  struct Scope {
    std::vector<std::size_t> members;  // project indices
    std::vector<double> weights;       // empty = uniform
  };

  const std::vector<FindRecord>& records_;
  std::size_t k_;
  RunConfig config_;
  SpreadSet spreads_;
  std::vector<std::string> projects_;
  std::vector<std::size_t> record_project_;               // per record
  std::vector<std::vector<std::size_t>> project_scopes_;  // project -> scopes containing it
  std::vector<Scope> scopes_;
  std::vector<std::pair<std::size_t, std::size_t>> comparisons_;
  std::vector<std::string> comparison_labels_;

  class Replay;
};

/// Convenience wrappers matching the module contract.
PermutationResult run_permutation(const std::vector<FindRecord>& records, std::size_t categories,
                                  std::size_t r, const RunConfig& config);
RunResult run_all(const std::vector<FindRecord>& records, std::size_t categories, const RunConfig& config);

}  // namespace assemblage
