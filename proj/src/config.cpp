#include <fstream>
#include <set>
#include <sstream>

#include "json.hpp"

#include "assemblage/error.hpp"
#include "assemblage/pipeline.hpp"

namespace assemblage {
namespace {

using nlohmann::json;
namespace fs = std::filesystem;

template <typename T>
T get_or(const json& obj, const char* key, T fallback) {
  auto it = obj.find(key);
  if (it == obj.end() || it->is_null()) return fallback;
  try {
    return it->get<T>();
  } catch (const json::exception&) {
    throw ConfigError(std::string("config key '") + key + "' has the wrong type");
  }
}

fs::path resolve(const fs::path& base, const std::string& p) {
  fs::path path(p);
  return path.is_absolute() ? path : base / path;
}

void check_known_keys(const json& obj, std::initializer_list<const char*> keys, const std::string& where) {
  std::set<std::string> known(keys.begin(), keys.end());
  for (const auto& [k, _] : obj.items())
    if (!known.count(k)) throw ConfigError("unknown key '" + k + "' in " + where);
}

}  // namespace

PipelineConfig parse_config(const std::string& json_text, const fs::path& base_dir) {
  json root;
  try {
    root = json::parse(json_text, nullptr, true, /*ignore_comments=*/true);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  if (!root.is_object()) throw ConfigError("config must be a JSON object");
  check_known_keys(root,
                   {"parameterization", "data", "window", "prior", "mode", "permutations", "seed", "metric",
                    "identity_order", "workers", "density", "scopes", "comparisons", "outputs"},
                   "config");

  PipelineConfig cfg;
  const auto param = get_or<std::string>(root, "parameterization", "");
  if (param.empty()) throw ConfigError("config needs a 'parameterization' file");
  cfg.parameterization_path = resolve(base_dir, param);
  if (const auto data = get_or<std::string>(root, "data", ""); !data.empty())
    cfg.data_path = resolve(base_dir, data);

  auto& run = cfg.run;
  if (auto it = root.find("window"); it != root.end()) {
    check_known_keys(*it, {"start_year", "end_year", "interval_length"}, "window");
    run.window = StudyWindow(get_or<std::int64_t>(*it, "start_year", -200), get_or<std::int64_t>(*it, "end_year", 20),
                             get_or<std::int64_t>(*it, "interval_length", 10));
  }
  if (auto it = root.find("prior"); it != root.end()) {
    check_known_keys(*it, {"alpha0"}, "prior");
    run.prior.concentration = get_or<double>(*it, "alpha0", 1.0);
  }
  run.mode = parse_aggregation_mode(get_or<std::string>(root, "mode", "unweighted"));
  const auto perms = get_or<std::int64_t>(root, "permutations", 40);
  if (perms < 1) throw ConfigError("permutations must be at least 1");
  run.permutations = static_cast<std::size_t>(perms);
  run.seed = get_or<std::uint64_t>(root, "seed", 0);
  run.metric = parse_metric(get_or<std::string>(root, "metric", "hellinger"));
  run.identity_order = get_or<bool>(root, "identity_order", false);
  const auto workers = get_or<std::int64_t>(root, "workers", 1);
  if (workers < 1) throw ConfigError("workers must be at least 1");
  run.workers = static_cast<std::size_t>(workers);

  if (auto it = root.find("density"); it != root.end()) {
    check_known_keys(*it, {"grid_size", "bandwidth", "bandwidth_scale", "hpd_level", "reflect"}, "density");
    const auto g = get_or<std::int64_t>(*it, "grid_size", 512);
    if (g < 2) throw ConfigError("density.grid_size must be at least 2");
    cfg.density.grid_size = static_cast<std::size_t>(g);
    cfg.density.bandwidth = get_or<double>(*it, "bandwidth", 0.0);
    cfg.density.bandwidth_scale = get_or<double>(*it, "bandwidth_scale", 1.0);
    cfg.density.reflect = get_or<bool>(*it, "reflect", true);
    cfg.hpd_level = get_or<double>(*it, "hpd_level", 0.90);
    if (cfg.density.bandwidth < 0.0 || !(cfg.density.bandwidth_scale > 0.0))
      throw ConfigError("density bandwidth settings must be positive");
  }
  if (!(cfg.hpd_level > 0.0 && cfg.hpd_level < 1.0)) throw ConfigError("hpd_level must lie in (0, 1)");

  const auto scopes = root.find("scopes");
  if (scopes == root.end() || !scopes->is_array() || scopes->empty())
    throw ConfigError("config needs a non-empty 'scopes' array");
  for (const auto& s : *scopes) {
    check_known_keys(s, {"id", "projects", "regions", "all", "weights"}, "scope");
    ScopeSelector sel;
    sel.id = get_or<std::string>(s, "id", "");
    sel.projects = get_or<std::vector<std::string>>(s, "projects", {});
    sel.regions = get_or<std::vector<std::string>>(s, "regions", {});
    sel.all = get_or<bool>(s, "all", false);
    sel.weights = get_or<std::vector<double>>(s, "weights", {});
    if (sel.id.empty()) throw ConfigError("every scope needs an 'id'");
    const int selectors = !sel.projects.empty() + !sel.regions.empty() + sel.all;
    if (selectors != 1)
      throw ConfigError("scope '" + sel.id + "' must set exactly one of projects, regions, or all");
    cfg.scope_selectors.push_back(std::move(sel));
  }

  const auto comps = root.find("comparisons");
  if (comps == root.end() || !comps->is_array() || comps->empty())
    throw ConfigError("config needs a non-empty 'comparisons' array");
  for (const auto& c : *comps) {
    if (!c.is_array() || c.size() != 2 || !c[0].is_string() || !c[1].is_string())
      throw ConfigError("each comparison must be a pair of scope ids");
    run.comparisons.emplace_back(c[0].get<std::string>(), c[1].get<std::string>());
  }
  std::set<std::string> ids;
  for (const auto& s : cfg.scope_selectors)
    if (!ids.insert(s.id).second) throw ConfigError("duplicate scope id '" + s.id + "'");
  for (const auto& [a, b] : run.comparisons)
    if (!ids.count(a) || !ids.count(b)) throw ConfigError("comparison " + a + "/" + b + " names an undeclared scope");

  if (auto it = root.find("outputs"); it != root.end()) {
    check_known_keys(*it, {"phi_table", "trajectories", "grids", "posterior_trace", "compact"}, "outputs");
    cfg.outputs.phi_table = get_or<bool>(*it, "phi_table", true);
    cfg.outputs.trajectories = get_or<bool>(*it, "trajectories", true);
    cfg.outputs.grids = get_or<bool>(*it, "grids", false);
    cfg.outputs.posterior_trace = get_or<bool>(*it, "posterior_trace", false);
    cfg.outputs.compact = get_or<bool>(*it, "compact", false);
  }
  return cfg;
}

PipelineConfig load_config(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path.string() + "'");
  std::ostringstream text;
  text << in.rdbuf();
  auto cfg = parse_config(text.str(), path.parent_path());
  cfg.config_path = path;
  return cfg;
}

void apply_overrides(PipelineConfig& config, const Overrides& o) {
  auto& run = config.run;
  if (o.data) config.data_path = *o.data;
  if (o.seed) run.seed = *o.seed;
  if (o.permutations) {
    if (*o.permutations < 1) throw ConfigError("permutations must be at least 1");
    run.permutations = *o.permutations;
  }
  if (o.workers) {
    if (*o.workers < 1) throw ConfigError("workers must be at least 1");
    run.workers = *o.workers;
  }
  if (o.metric) run.metric = parse_metric(*o.metric);
  if (o.mode) run.mode = parse_aggregation_mode(*o.mode);
  if (o.alpha0) run.prior.concentration = *o.alpha0;
  if (o.hpd_level) {
    if (!(*o.hpd_level > 0.0 && *o.hpd_level < 1.0)) throw ConfigError("hpd level must lie in (0, 1)");
    config.hpd_level = *o.hpd_level;
  }
  if (o.identity_order) run.identity_order = *o.identity_order;
  if (o.compact) config.outputs.compact = *o.compact;
  if (o.grids) config.outputs.grids = *o.grids;
  if (o.posterior_trace) config.outputs.posterior_trace = *o.posterior_trace;
}

std::vector<ScopeDefinition> resolve_scopes(const std::vector<ScopeSelector>& selectors,
                                            const std::vector<FindRecord>& records) {
  // Projects in first-appearance order, with their region.
  std::vector<std::pair<std::string, std::string>> projects;
  std::set<std::string> seen;
  for (const auto& r : records)
    if (seen.insert(r.project).second) projects.emplace_back(r.project, r.region);

  std::vector<ScopeDefinition> out;
  for (const auto& sel : selectors) {
    ScopeDefinition def;
    def.scope_id = sel.id;
    def.member_weights = sel.weights;
    if (!sel.projects.empty()) {
      def.member_projects = sel.projects;
    } else {
      const std::set<std::string> regions(sel.regions.begin(), sel.regions.end());
      for (const auto& [p, region] : projects)
        if (sel.all || regions.count(region)) def.member_projects.push_back(p);
    }
    if (def.member_projects.empty()) throw ConfigError("scope '" + sel.id + "' matches no projects in the data");
    validate_scope(def);
    out.push_back(std::move(def));
  }
  return out;
}

}  // namespace assemblage
