#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "assemblage/density.hpp"
#include "assemblage/ingestion.hpp"
#include "assemblage/permutation.hpp"

namespace assemblage {

inline constexpr const char* kVersion = "0.3.0";

/// Scope as written in the config file: explicit projects, every project of
/// some regions, or every project in the data.
struct ScopeSelector {
  std::string id;
  std::vector<std::string> projects;
  std::vector<std::string> regions;
  bool all = false;
  std::vector<double> weights;
};

struct OutputOptions {
  bool phi_table = true;     ///< phi.csv with every sample
  bool trajectories = true;  ///< trajectories/<comparison>.csv
  bool grids = false;        ///< grids/<comparison>.csv density dumps
  bool posterior_trace = false;
  bool compact = false;      ///< group counts only, no per-sample tables
};

struct PipelineConfig {
  std::filesystem::path config_path;
  std::filesystem::path parameterization_path;
  std::filesystem::path data_path;
  RunConfig run;
  std::vector<ScopeSelector> scope_selectors;
  DensityOptions density;
  double hpd_level = 0.90;
  OutputOptions outputs;
};

/// Command-line overrides; unset fields keep the config file's values.
struct Overrides {
  std::optional<std::filesystem::path> data;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> permutations;
  std::optional<std::size_t> workers;
  std::optional<std::string> metric;
  std::optional<std::string> mode;
  std::optional<double> alpha0;
  std::optional<double> hpd_level;
  std::optional<bool> identity_order;
  std::optional<bool> compact;
  std::optional<bool> grids;
  std::optional<bool> posterior_trace;
};

/// Reads a JSON run configuration. Relative paths inside it resolve against
/// the config file's directory. Throws ConfigError.
PipelineConfig load_config(const std::filesystem::path& path);
PipelineConfig parse_config(const std::string& json_text, const std::filesystem::path& base_dir);
void apply_overrides(PipelineConfig& config, const Overrides& overrides);

/// Expands selectors against the data. Throws ConfigError for an empty scope.
std::vector<ScopeDefinition> resolve_scopes(const std::vector<ScopeSelector>& selectors,
                                            const std::vector<FindRecord>& records);

struct PipelineStatus {
  int exit_code = 0;
  std::vector<std::string> warnings;
  std::string error;
};

/// Ingest, permute, measure, summarize, and write every artifact into `out_dir`.
/// Outputs are a pure function of (config, data, seed); worker count never
/// changes a byte.
PipelineStatus run_pipeline(PipelineConfig config, const std::filesystem::path& out_dir, std::ostream& log);

struct ValidationReport {
  std::string parameterization;
  std::size_t rows = 0;
  std::size_t valid = 0;
  std::vector<std::pair<std::string, std::size_t>> records_per_project;
  std::vector<std::pair<std::string, double>> count_per_category;
  std::vector<double> interval_mass;  ///< spread mass per interval
  std::size_t out_of_window = 0;
  std::vector<InputIssue> issues;
};

ValidationReport validate_data(const std::filesystem::path& data_path, const Parameterization& params,
                               const StudyWindow& window);
void print_report(const ValidationReport& report, const StudyWindow& window, std::ostream& out);
std::string report_json(const ValidationReport& report);

/// Lower-case hex SHA-256 of a byte string / of a file's contents.
std::string sha256_hex(const std::string& bytes);
std::string sha256_file(const std::filesystem::path& path);

}  // namespace assemblage
