#include <fstream>
#include <iomanip>
#include <map>
#include <ostream>

#include "assemblage/error.hpp"
#include "assemblage/pipeline.hpp"
#include "json.hpp"

namespace assemblage {

ValidationReport validate_data(const std::filesystem::path& data_path, const Parameterization& params,
                               const StudyWindow& window) {
  std::ifstream in(data_path);
  if (!in) throw ConfigError("cannot open data file '" + data_path.string() + "'");
  auto parsed = parse_records_lenient(in, params);

  ValidationReport report;
  report.parameterization = params.name();
  report.valid = parsed.records.size();
  report.rows = parsed.records.size() + parsed.issues.size();
  report.issues = std::move(parsed.issues);

  std::map<std::string, std::size_t> project_index;
  std::vector<double> per_category(params.size(), 0.0);
  report.interval_mass.assign(window.interval_count(), 0.0);
  for (const auto& r : parsed.records) {
    auto [it, inserted] = project_index.emplace(r.project, report.records_per_project.size());
    if (inserted) report.records_per_project.emplace_back(r.project, 0);
    ++report.records_per_project[it->second].second;
    per_category[r.category_index] += r.count;
    if (auto s = map_to_intervals(r, window))
      for (std::size_t j = s->first_interval; j <= s->last_interval; ++j) report.interval_mass[j] += s->amount;
    else
      ++report.out_of_window;
  }
  for (std::size_t i = 0; i < params.size(); ++i) report.count_per_category.emplace_back(params.labels()[i], per_category[i]);
  return report;
}

void print_report(const ValidationReport& report, const StudyWindow& window, std::ostream& out) {
  out << "parameterization: " << report.parameterization << "\n";
  out << "rows: " << report.rows << "  valid: " << report.valid << "  errors: " << report.issues.size()
      << "  outside window: " << report.out_of_window << "\n";
  out << "\nrecords per project\n";
  for (const auto& [p, n] : report.records_per_project) out << "  " << std::left << std::setw(16) << p << n << "\n";
  out << "\ncount per category\n";
  for (const auto& [c, n] : report.count_per_category) out << "  " << std::left << std::setw(16) << c << n << "\n";

  out << "\ndate coverage (spread mass per interval)\n";
  double peak = 0.0;
  for (double m : report.interval_mass) peak = std::max(peak, m);
  for (std::size_t j = 0; j < report.interval_mass.size(); ++j) {
    const auto bar = peak > 0.0 ? static_cast<std::size_t>(40.0 * report.interval_mass[j] / peak + 0.5) : 0;
    out << "  " << std::right << std::setw(3) << (j + 1) << " [" << std::setw(5) << window.interval_start(j) << ", "
        << std::setw(5) << window.interval_start(j) + window.interval_length() << ") " << std::setw(10)
        << std::fixed << std::setprecision(2) << report.interval_mass[j] << " " << std::string(bar, '#') << "\n";
  }
  out.unsetf(std::ios::floatfield);
  if (!report.issues.empty()) {
    out << "\nerrors\n";
    for (const auto& i : report.issues) out << "  line " << i.line << " [" << to_string(i.kind) << "] " << i.message << "\n";
  }
}

std::string report_json(const ValidationReport& report) {
  nlohmann::ordered_json j;
  j["parameterization"] = report.parameterization;
  j["rows"] = report.rows;
  j["valid"] = report.valid;
  j["out_of_window"] = report.out_of_window;
  auto& projects = j["records_per_project"] = nlohmann::ordered_json::object();
  for (const auto& [p, n] : report.records_per_project) projects[p] = n;
  auto& cats = j["count_per_category"] = nlohmann::ordered_json::object();
  for (const auto& [c, n] : report.count_per_category) cats[c] = n;
  j["interval_mass"] = report.interval_mass;
  auto& issues = j["errors"] = nlohmann::ordered_json::array();
  for (const auto& i : report.issues)
    issues.push_back({{"line", i.line}, {"kind", to_string(i.kind)}, {"message", i.message}});
  return j.dump(2) + "\n";
}

}  // namespace assemblage
