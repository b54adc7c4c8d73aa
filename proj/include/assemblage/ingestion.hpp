#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace assemblage {

/// One quantified observation: a counted group of finds of one category
/// from one context, dated to an inclusive range of signed years.
struct FindRecord {
  std::string key;
  std::string project;
  std::string region;
  std::string category;
  std::size_t category_index = 0;
  double count = 0.0;
  std::int64_t date_start = 0;
  std::int64_t date_end = 0;
  std::size_t line = 0;  ///< 1-based source line, for reporting
};

/// The declared category set of a run. Label order defines category_index.
class Parameterization {
public:
  Parameterization() = default;
  Parameterization(std::string name, std::vector<std::string> labels);

  /// One label per line; blank lines and lines starting with '#' are skipped.
  static Parameterization load(const std::string& path);
  static Parameterization parse(std::istream& in, std::string name);

  const std::string& name() const noexcept { return name_; }
  std::size_t size() const noexcept { return labels_.size(); }
  const std::vector<std::string>& labels() const noexcept { return labels_; }
  std::optional<std::size_t> index_of(std::string_view label) const;

private:
  std::string name_;
  std::vector<std::string> labels_;
  std::unordered_map<std::string, std::size_t> index_;
};

/// Study window split into equal contiguous intervals. Interval j (0-based)
/// covers years [start_year + j*interval_length, start_year + (j+1)*interval_length).
/// There is no year-zero correction.
class StudyWindow {
public:
  StudyWindow() : StudyWindow(-200, 20, 10) {}
  StudyWindow(std::int64_t start_year, std::int64_t end_year, std::int64_t interval_length);

  std::int64_t start_year() const noexcept { return start_; }
  std::int64_t end_year() const noexcept { return end_; }
  std::int64_t interval_length() const noexcept { return length_; }
  std::size_t interval_count() const noexcept { return count_; }

  /// Interval holding `year`, or nullopt when the year lies outside the window.
  std::optional<std::size_t> interval_of(std::int64_t year) const noexcept;
  std::int64_t interval_start(std::size_t j) const noexcept {
    return start_ + static_cast<std::int64_t>(j) * length_;
  }

private:
  std::int64_t start_;
  std::int64_t end_;
  std::int64_t length_;
  std::size_t count_;
};

/// A record's count split uniformly over the intervals its (clipped) date
/// range covers. Every covered interval holds the same `amount`.
struct TemporalSpread {
  std::size_t record_index = 0;
  std::size_t category_index = 0;
  std::size_t first_interval = 0;
  std::size_t last_interval = 0;  ///< inclusive
  double amount = 0.0;            ///< mass per covered interval
  std::size_t interval_count = 0; ///< J

  std::size_t span() const noexcept { return last_interval - first_interval + 1; }
  bool touches(std::size_t j) const noexcept { return j >= first_interval && j <= last_interval; }
  double at(std::size_t j) const noexcept { return touches(j) ? amount : 0.0; }
  double total() const noexcept { return amount * static_cast<double>(span()); }
  /// Length-J vector of per-interval quantities.
  std::vector<double> dense() const;
};

struct InputIssue {
  enum class Kind { parse, unknown_category, bad_count, bad_dates };
  Kind kind;
  std::size_t line;
  std::string message;
};

const char* to_string(InputIssue::Kind kind) noexcept;

struct ParseReport {
  std::vector<FindRecord> records;  ///< valid rows, file order
  std::vector<InputIssue> issues;
};

/// Reads the comma-delimited record table. Required header columns are
/// key, project, region, category, count, date_start, date_end; other
/// columns are ignored. Lines starting with '#' are comments.
///
/// Throws ParseError on the first malformed row and ValidationError on the
/// first invariant violation (unknown category, count <= 0, reversed dates).
std::vector<FindRecord> parse_records(std::istream& in, const Parameterization& params);

/// Same as parse_records but collects every problem instead of stopping.
/// A missing or incomplete header is still fatal (ParseError).
ParseReport parse_records_lenient(std::istream& in, const Parameterization& params);

std::vector<FindRecord> load_records(const std::string& path, const Parameterization& params);

/// Uniform spreading of a record over the window. Returns nullopt when the
/// date range lies wholly outside the window; partial overlaps are clipped.
std::optional<TemporalSpread> map_to_intervals(const FindRecord& record,
                                               const StudyWindow& window,
                                               std::size_t record_index = 0);

struct SpreadSet {
  std::vector<TemporalSpread> spreads;       ///< accepted records, input order
  std::vector<std::size_t> skipped_records;  ///< indices of out-of-window records
};

SpreadSet spread_records(const std::vector<FindRecord>& records, const StudyWindow& window);

}  // namespace assemblage
