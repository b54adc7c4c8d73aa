#include "assemblage/ingestion.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <sstream>

#include "assemblage/error.hpp"

namespace assemblage {
namespace {

std::string_view trim(std::string_view s) {
  const auto ws = [](char c) { return c == ' ' || c == '\t' || c == '\r' || c == '\n'; };
  while (!s.empty() && ws(s.front())) s.remove_prefix(1);
  while (!s.empty() && ws(s.back())) s.remove_suffix(1);
  return s;
}

// Splits one CSV line. Double-quoted fields may contain commas; "" is a literal quote.
std::optional<std::vector<std::string>> split_csv(std::string_view line) {
  std::vector<std::string> fields;
  std::string cur;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          cur.push_back('"');
          ++i;
        } else {
          quoted = false;
        }
      } else {
        cur.push_back(c);
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      fields.emplace_back(trim(cur));
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  if (quoted) return std::nullopt;
  fields.emplace_back(trim(cur));
  return fields;
}

bool is_skippable(std::string_view line) {
  line = trim(line);
  return line.empty() || line.front() == '#';
}

template <typename T>
bool parse_number(std::string_view s, T& out) {
  s = trim(s);
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  if (s.empty()) return false;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc{} && ptr == s.data() + s.size();
}

constexpr std::array<std::string_view, 7> kRequired = {
    "key", "project", "region", "category", "count", "date_start", "date_end"};

// Shared row loop: `sink` receives either a record or an issue.
template <typename OnRecord, typename OnIssue>
void scan_records(std::istream& in, const Parameterization& params, OnRecord on_record,
                  OnIssue on_issue) {
  std::string line;
  std::size_t lineno = 0;
  std::array<std::size_t, kRequired.size()> col{};
  bool have_header = false;
  std::size_t width = 0;

  while (std::getline(in, line)) {
    ++lineno;
    if (lineno == 1 && line.size() >= 3 && line.compare(0, 3, "\xEF\xBB\xBF") == 0) line.erase(0, 3);
    if (is_skippable(line)) continue;
    auto fields = split_csv(line);
    if (!have_header) {
      if (!fields) throw ParseError(lineno, "unterminated quote in header");
      for (std::size_t k = 0; k < kRequired.size(); ++k) {
        auto it = std::find(fields->begin(), fields->end(), kRequired[k]);
        if (it == fields->end())
          throw ParseError(lineno, "header is missing column '" + std::string(kRequired[k]) + "'");
        col[k] = static_cast<std::size_t>(it - fields->begin());
      }
      width = fields->size();
      have_header = true;
      continue;
    }
    if (!fields) {
      on_issue(InputIssue{InputIssue::Kind::parse, lineno, "unterminated quote"});
      continue;
    }
    if (fields->size() != width) {
      on_issue(InputIssue{InputIssue::Kind::parse, lineno,
                          "expected " + std::to_string(width) + " fields, found " +
                              std::to_string(fields->size())});
      continue;
    }
    const auto& f = *fields;
    FindRecord r;
    r.line = lineno;
    r.key = f[col[0]];
    r.project = f[col[1]];
    r.region = f[col[2]];
    r.category = f[col[3]];
    if (r.key.empty() || r.project.empty()) {
      on_issue(InputIssue{InputIssue::Kind::parse, lineno, "empty key or project"});
      continue;
    }
    if (!parse_number(f[col[4]], r.count) || !std::isfinite(r.count)) {
      on_issue(InputIssue{InputIssue::Kind::parse, lineno, "count '" + f[col[4]] + "' is not a number"});
      continue;
    }
    if (!parse_number(f[col[5]], r.date_start) || !parse_number(f[col[6]], r.date_end)) {
      on_issue(InputIssue{InputIssue::Kind::parse, lineno, "dates must be signed integers"});
      continue;
    }
    const auto cat = params.index_of(r.category);
    if (!cat) {
      on_issue(InputIssue{InputIssue::Kind::unknown_category, lineno,
                          "unknown category '" + r.category + "' for parameterization '" +
                              params.name() + "'"});
      continue;
    }
    r.category_index = *cat;
    if (!(r.count > 0.0)) {
      on_issue(InputIssue{InputIssue::Kind::bad_count, lineno, "count must be > 0"});
      continue;
    }
    if (r.date_end < r.date_start) {
      on_issue(InputIssue{InputIssue::Kind::bad_dates, lineno, "date_end precedes date_start"});
      continue;
    }
    on_record(std::move(r));
  }
  if (!have_header) throw ParseError(lineno, "missing header row");
}

}  // namespace

const char* to_string(InputIssue::Kind kind) noexcept {
  switch (kind) {
    case InputIssue::Kind::parse: return "parse";
    case InputIssue::Kind::unknown_category: return "unknown_category";
    case InputIssue::Kind::bad_count: return "bad_count";
    case InputIssue::Kind::bad_dates: return "bad_dates";
  }
  return "unknown";
}

Parameterization::Parameterization(std::string name, std::vector<std::string> labels)
    : name_(std::move(name)), labels_(std::move(labels)) {
  for (std::size_t i = 0; i < labels_.size(); ++i) {
    if (labels_[i].empty()) throw ConfigError("empty category label in '" + name_ + "'");
    if (!index_.emplace(labels_[i], i).second)
      throw ConfigError("duplicate category label '" + labels_[i] + "' in '" + name_ + "'");
  }
}

Parameterization Parameterization::parse(std::istream& in, std::string name) {
  std::vector<std::string> labels;
  std::string line;
  while (std::getline(in, line)) {
    if (is_skippable(line)) continue;
    labels.emplace_back(trim(line));
  }
  return Parameterization(std::move(name), std::move(labels));
}

Parameterization Parameterization::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open parameterization file '" + path + "'");
  auto stem = path.substr(path.find_last_of("/\\") + 1);
  if (auto dot = stem.rfind('.'); dot != std::string::npos && dot > 0) stem.resize(dot);
  return parse(in, stem);
}

std::optional<std::size_t> Parameterization::index_of(std::string_view label) const {
  auto it = index_.find(std::string(label));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

StudyWindow::StudyWindow(std::int64_t start_year, std::int64_t end_year, std::int64_t interval_length)
    : start_(start_year), end_(end_year), length_(interval_length), count_(0) {
  if (interval_length <= 0) throw ConfigError("interval length must be positive");
  if (end_year <= start_year) throw ConfigError("study window end must follow its start");
  if ((end_year - start_year) % interval_length != 0)
    throw ConfigError("study window length is not a multiple of the interval length");
  count_ = static_cast<std::size_t>((end_year - start_year) / interval_length);
}

std::optional<std::size_t> StudyWindow::interval_of(std::int64_t year) const noexcept {
  if (year < start_ || year >= end_) return std::nullopt;
  return static_cast<std::size_t>((year - start_) / length_);
}

std::vector<double> TemporalSpread::dense() const {
  std::vector<double> v(interval_count, 0.0);
  for (std::size_t j = first_interval; j <= last_interval; ++j) v[j] = amount;
  return v;
}

std::vector<FindRecord> parse_records(std::istream& in, const Parameterization& params) {
  std::vector<FindRecord> out;
  scan_records(
      in, params, [&](FindRecord&& r) { out.push_back(std::move(r)); },
      [](const InputIssue& issue) {
        if (issue.kind == InputIssue::Kind::parse) throw ParseError(issue.line, issue.message);
        throw ValidationError(issue.line, issue.message);
      });
  return out;
}

ParseReport parse_records_lenient(std::istream& in, const Parameterization& params) {
  ParseReport report;
  scan_records(
      in, params, [&](FindRecord&& r) { report.records.push_back(std::move(r)); },
      [&](InputIssue&& issue) { report.issues.push_back(std::move(issue)); });
  return report;
}

std::vector<FindRecord> load_records(const std::string& path, const Parameterization& params) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open data file '" + path + "'");
  return parse_records(in, params);
}

std::optional<TemporalSpread> map_to_intervals(const FindRecord& record, const StudyWindow& window,
                                               std::size_t record_index) {
  const auto last_year = window.end_year() - 1;
  if (record.date_end < window.start_year() || record.date_start > last_year) return std::nullopt;
  const auto lo = std::max(record.date_start, window.start_year());
  const auto hi = std::min(record.date_end, last_year);
  TemporalSpread s;
  s.record_index = record_index;
  s.category_index = record.category_index;
  s.first_interval = *window.interval_of(lo);
  s.last_interval = *window.interval_of(hi);
  s.interval_count = window.interval_count();
  s.amount = record.count / static_cast<double>(s.span());
  return s;
}

SpreadSet spread_records(const std::vector<FindRecord>& records, const StudyWindow& window) {
  SpreadSet set;
  set.spreads.reserve(records.size());
  for (std::size_t i = 0; i < records.size(); ++i) {
    if (auto s = map_to_intervals(records[i], window, i))
      set.spreads.push_back(*s);
    else
      set.skipped_records.push_back(i);
  }
  return set;
}

}  // namespace assemblage
