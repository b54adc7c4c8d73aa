#include "assemblage/pipeline.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <map>
#include <ostream>

#include "assemblage/error.hpp"
#include "assemblage/simd/kernels.hpp"
#include "json.hpp"

namespace assemblage {
namespace {

namespace fs = std::filesystem;
using ojson = nlohmann::ordered_json;

void append(std::string& s, double v) {
  char buf[32];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  s.append(buf, ptr);
}

void append(std::string& s, std::uint64_t v) {
  char buf[24];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  s.append(buf, ptr);
}

void write_file(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot write '" + path.string() + "'");
  out << text;
  if (!out) throw Error("write failed for '" + path.string() + "'");
}

std::string provenance(const std::string& digest) { return "# manifest-sha256: " + digest + "\n"; }

ojson config_echo(const PipelineConfig& cfg) {
  const auto& run = cfg.run;
  ojson j;
  j["permutations"] = run.permutations;
  j["seed"] = run.seed;
  j["alpha0"] = run.prior.concentration;
  j["mode"] = to_string(run.mode);
  j["metric"] = to_string(run.metric);
  j["identity_order"] = run.identity_order;
  j["window"] = {{"start_year", run.window.start_year()},
                 {"end_year", run.window.end_year()},
                 {"interval_length", run.window.interval_length()},
                 {"interval_count", run.window.interval_count()}};
  j["density"] = {{"grid_size", cfg.density.grid_size},
                  {"bandwidth", cfg.density.bandwidth},
                  {"bandwidth_scale", cfg.density.bandwidth_scale},
                  {"reflect", cfg.density.reflect},
                  {"hpd_level", cfg.hpd_level}};
  auto& scopes = j["scopes"] = ojson::array();
  for (const auto& s : run.scopes) {
    ojson e{{"id", s.scope_id}, {"projects", s.member_projects}};
    if (!s.member_weights.empty()) e["weights"] = s.member_weights;
    scopes.push_back(std::move(e));
  }
  auto& comps = j["comparisons"] = ojson::array();
  for (const auto& [a, b] : run.comparisons) comps.push_back({a, b});
  return j;
}

void write_error_report(const fs::path& out_dir, const std::string& parameterization,
                        const std::vector<InputIssue>& issues) {
  ojson j;
  j["parameterization"] = parameterization;
  auto& rows = j["errors"] = ojson::array();
  for (const auto& i : issues) rows.push_back({{"line", i.line}, {"kind", to_string(i.kind)}, {"message", i.message}});
  write_file(out_dir / "errors.json", j.dump(2) + "\n");
}

}  // namespace

PipelineStatus run_pipeline(PipelineConfig cfg, const fs::path& out_dir, std::ostream& log) {
  PipelineStatus status;
  auto& run = cfg.run;
  try {
    check_prior_compatibility(run);
    if (cfg.data_path.empty()) throw ConfigError("no data file given (config 'data' or --data)");
    const auto params = Parameterization::load(cfg.parameterization_path.string());
    if (params.size() < 2) throw ConfigError("parameterization '" + params.name() + "' declares fewer than 2 categories");

    std::ifstream data(cfg.data_path);
    if (!data) throw ConfigError("cannot open data file '" + cfg.data_path.string() + "'");
    auto parsed = parse_records_lenient(data, params);
    fs::create_directories(out_dir);
    if (!parsed.issues.empty()) {
      write_error_report(out_dir, params.name(), parsed.issues);
      status.exit_code = 2;
      status.error = std::to_string(parsed.issues.size()) + " invalid row(s); see " + (out_dir / "errors.json").string();
      return status;
    }
    const auto& records = parsed.records;
    run.scopes = resolve_scopes(cfg.scope_selectors, records);

    const PermutationEngine engine(records, params.size(), run);
    log << "records: " << records.size() << " (" << engine.skipped_records().size() << " outside window), "
        << "permutations: " << run.permutations << ", workers: " << run.workers << "\n";
    const auto result = engine.run_all();
    const auto& labels = engine.comparison_labels();

    // Manifest first: every other file carries its digest.
    ojson manifest;
    manifest["software"] = {{"name", "assemblage"}, {"version", kVersion}};
    manifest["config"] = config_echo(cfg);
    ojson inputs;
    if (!cfg.config_path.empty())
      inputs["config"] = {{"file", cfg.config_path.filename().string()}, {"sha256", sha256_file(cfg.config_path)}};
    inputs["data"] = {{"file", cfg.data_path.filename().string()}, {"sha256", sha256_file(cfg.data_path)}};
    inputs["parameterization"] = {{"file", cfg.parameterization_path.filename().string()},
                                  {"sha256", sha256_file(cfg.parameterization_path)}};
    manifest["inputs"] = inputs;
    manifest["parameterization"] = {{"name", params.name()}, {"categories", params.labels()}};

    std::map<std::string, std::pair<std::size_t, std::size_t>> per_project;  // accepted, skipped
    for (const auto& r : records) ++per_project[r.project].first;
    for (auto i : engine.skipped_records()) {
      --per_project[records[i].project].first;
      ++per_project[records[i].project].second;
    }
    ojson proj = ojson::object();
    for (const auto& [p, c] : per_project) proj[p] = {{"accepted", c.first}, {"skipped", c.second}};
    manifest["records"] = {{"total", records.size()},
                           {"accepted", engine.draws_per_permutation()},
                           {"skipped", engine.skipped_records().size()},
                           {"per_project", proj}};
    manifest["draw_events"] = result.draw_events;
    manifest["phi_samples"] = result.samples.size();
    manifest["undefined_samples"] = result.undefined_samples;
    manifest["kernels"] = std::string(simd::to_string(simd::kernels().isa));

    for (std::size_t c = 0; c < labels.size(); ++c) {
      const bool any = std::any_of(result.groups.begin(), result.groups.end(),
                                   [&](const SampleGroup& g) { return g.comparison == c; });
      if (!any) status.warnings.push_back("comparison " + labels[c] + " produced no samples in any interval");
    }
    manifest["warnings"] = status.warnings;
    const auto manifest_text = manifest.dump(2) + "\n";
    const auto digest = sha256_hex(manifest_text);
    write_file(out_dir / "manifest.json", manifest_text);

    // Skip report.
    {
      std::string s = provenance(digest) + "key,project,date_start,date_end\n";
      for (auto i : engine.skipped_records()) {
        const auto& r = records[i];
        s += r.key + "," + r.project + "," + std::to_string(r.date_start) + "," + std::to_string(r.date_end) + "\n";
      }
      write_file(out_dir / "skipped.csv", s);
    }

    // Group counts (always written; the compact form of the phi table).
    {
      std::string s = provenance(digest) + "comparison,interval,n\n";
      for (const auto& g : result.groups) {
        s += labels[g.comparison] + ",";
        append(s, std::uint64_t{g.interval + 1});
        s += ",";
        append(s, std::uint64_t{g.end - g.begin});
        s += "\n";
      }
      write_file(out_dir / "groups.csv", s);
    }

    if (cfg.outputs.phi_table && !cfg.outputs.compact) {
      std::string s = provenance(digest) + "comparison,interval,permutation,draw_index,phi\n";
      s.reserve(s.size() + result.samples.size() * 40);
      for (const auto& x : result.samples) {
        s += labels[x.comparison];
        s += ',';
        append(s, std::uint64_t{x.interval + 1});
        s += ',';
        append(s, std::uint64_t{x.permutation});
        s += ',';
        append(s, std::uint64_t{x.draw_index});
        s += ',';
        append(s, x.value);
        s += '\n';
      }
      write_file(out_dir / "phi.csv", s);
    }

    if (cfg.outputs.trajectories && !cfg.outputs.compact) {
      fs::create_directories(out_dir / "trajectories");
      for (std::size_t c = 0; c < labels.size(); ++c) {
        std::string s = provenance(digest) + "interval,permutation,draw_index,phi\n";
        for (const auto& g : result.groups) {
          if (g.comparison != c) continue;
          for (auto i = g.begin; i < g.end; ++i) {
            const auto& x = result.samples[i];
            append(s, std::uint64_t{x.interval + 1});
            s += ',';
            append(s, std::uint64_t{x.permutation});
            s += ',';
            append(s, std::uint64_t{x.draw_index});
            s += ',';
            append(s, x.value);
            s += '\n';
          }
        }
        write_file(out_dir / "trajectories" / (labels[c] + ".csv"), s);
      }
    }

    // Endpoint per group: last sample of each permutation; all agree up to rounding.
    {
      std::string s = provenance(digest) + "comparison,interval,phi_final,permutation_spread\n";
      for (const auto& g : result.groups) {
        double first = 0.0, lo = 0.0, hi = 0.0;
        bool seen = false;
        for (auto i = g.begin; i < g.end; ++i) {
          const bool last_of_perm = i + 1 == g.end || result.samples[i + 1].permutation != result.samples[i].permutation;
          if (!last_of_perm) continue;
          const double v = result.samples[i].value;
          if (!seen) first = lo = hi = v;
          lo = std::min(lo, v);
          hi = std::max(hi, v);
          seen = true;
        }
        s += labels[g.comparison] + ",";
        append(s, std::uint64_t{g.interval + 1});
        s += ",";
        append(s, first);
        s += ",";
        append(s, hi - lo);
        s += "\n";
      }
      write_file(out_dir / "final_phi.csv", s);
    }

    // Density summaries.
    {
      DensityOptions dopt = cfg.density;
      if (run.metric == Metric::kl) dopt.upper.reset();
      std::vector<std::string> rows;
      std::size_t max_regions = 1;
      std::map<std::size_t, std::string> grid_dumps;
      std::vector<double> values;
      for (const auto& g : result.groups) {
        std::string row = labels[g.comparison] + ",";
        append(row, std::uint64_t{g.interval + 1});
        row += ",";
        append(row, std::uint64_t{g.end - g.begin});
        if (g.end - g.begin < 2) {
          row += ",NA";
          rows.push_back(std::move(row));
          continue;
        }
        values.clear();
        for (auto i = g.begin; i < g.end; ++i) values.push_back(result.samples[i].value);
        const auto summary = summarize(values, cfg.hpd_level, dopt);
        row += ",";
        append(row, summary.mode);
        for (const auto& iv : summary.hpd_region) {
          row += ",";
          append(row, iv.lo);
          row += ",";
          append(row, iv.hi);
        }
        max_regions = std::max(max_regions, summary.hpd_region.size());
        rows.push_back(std::move(row));
        if (cfg.outputs.grids) {
          auto& dump = grid_dumps[g.comparison];
          for (std::size_t k = 0; k < summary.grid.size(); ++k) {
            append(dump, std::uint64_t{g.interval + 1});
            dump += ",";
            append(dump, summary.grid[k]);
            dump += ",";
            append(dump, summary.density[k]);
            dump += "\n";
          }
        }
      }
      std::string s = provenance(digest) + "comparison,interval,n,mode";
      for (std::size_t r = 1; r <= max_regions; ++r)
        s += ",hpd_lo_" + std::to_string(r) + ",hpd_hi_" + std::to_string(r);
      s += "\n";
      for (const auto& row : rows) s += row + "\n";
      write_file(out_dir / "summary.csv", s);

      if (cfg.outputs.grids) {
        fs::create_directories(out_dir / "grids");
        for (std::size_t c = 0; c < labels.size(); ++c)
          write_file(out_dir / "grids" / (labels[c] + ".csv"),
                     provenance(digest) + "interval,x,density\n" + grid_dumps[c]);
      }
    }

    if (cfg.outputs.posterior_trace) {
      std::string s = provenance(digest) + "permutation,draw_index,scope,interval,alpha0,n";
      for (const auto& l : params.labels()) s += ",c_" + l;
      s += "\n";
      const double alpha0 = run.prior.concentration;
      for (std::size_t r = 0; r < run.permutations; ++r) {
        engine.run_permutation(r, [&](const DrawEvent& ev) {
          for (std::size_t sc = 0; sc < ev.view.scope_count(); ++sc) {
            const auto& st = ev.view.pooled_state(sc);
            for (auto j = ev.spread.first_interval; j <= ev.spread.last_interval; ++j) {
              append(s, std::uint64_t{ev.permutation});
              s += ',';
              append(s, std::uint64_t{ev.draw_index});
              s += ',' + st.scope_id() + ',';
              append(s, std::uint64_t{j + 1});
              s += ',';
              append(s, alpha0);
              s += ',';
              append(s, st.total(j));
              for (double c : st.counts(j)) {
                s += ',';
                append(s, c);
              }
              s += '\n';
            }
          }
        });
      }
      write_file(out_dir / "posterior_trace.csv", s);
    }

    for (const auto& w : status.warnings) log << "warning: " << w << "\n";
    return status;
  } catch (const ConfigError& e) {
    status.exit_code = 3;
    status.error = e.what();
  } catch (const Error& e) {
    status.exit_code = 4;
    status.error = e.what();
  } catch (const fs::filesystem_error& e) {
    status.exit_code = 4;
    status.error = e.what();
  }
  return status;
}

}  // namespace assemblage
