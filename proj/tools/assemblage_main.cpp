// assemblage: Monte Carlo Hellinger trajectories between count assemblages.

#include <chrono>
#include <iostream>

#include "CLI11.hpp"
#include "assemblage/error.hpp"
#include "assemblage/pipeline.hpp"

namespace {

using namespace assemblage;

template <typename T>
void set_if(CLI::Option* opt, std::optional<T>& dst, const T& value) {
  if (opt->count() > 0) dst = value;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Compare categorical count assemblages with permuted Dirichlet-categorical Hellinger trajectories"};
  app.set_version_flag("--version", std::string(kVersion));
  app.require_subcommand(1);

  auto* run = app.add_subcommand("run", "Run the full pipeline and write all result files");
  std::string config_path, out_dir, data_path, metric, mode;
  std::uint64_t seed = 0;
  std::size_t permutations = 0, workers = 0;
  double alpha0 = 0.0, hpd_level = 0.0;
  bool compact = false, grids = false, trace = false, identity = false;
  run->add_option("--config", config_path, "JSON run configuration")->required()->check(CLI::ExistingFile);
  run->add_option("--out", out_dir, "Output directory")->required();
  auto* o_data = run->add_option("--data", data_path, "Record table (overrides the config)")->check(CLI::ExistingFile);
  auto* o_seed = run->add_option("--seed", seed, "Shuffle seed");
  auto* o_perm = run->add_option("--permutations", permutations, "Number of permutations R")->check(CLI::PositiveNumber);
  auto* o_work = run->add_option("--workers", workers, "Worker threads")->check(CLI::PositiveNumber);
  auto* o_metric = run->add_option("--metric", metric, "hellinger or kl")->check(CLI::IsMember({"hellinger", "kl"}));
  auto* o_mode = run->add_option("--mode", mode, "unweighted or weighted")->check(CLI::IsMember({"unweighted", "weighted"}));
  auto* o_alpha = run->add_option("--alpha0", alpha0, "Flat prior concentration")->check(CLI::NonNegativeNumber);
  auto* o_hpd = run->add_option("--hpd-level", hpd_level, "Credible level of the HPD region")->check(CLI::Range(0.0, 1.0));
  auto* o_compact = run->add_flag("--compact", compact, "Write group counts instead of per-sample tables");
  auto* o_grids = run->add_flag("--dump-grids", grids, "Write density grids for plotting");
  auto* o_trace = run->add_flag("--trace-posteriors", trace, "Write per-draw pooled counts for every scope");
  auto* o_ident = run->add_flag("--identity-order", identity, "Replay records in file order instead of shuffling");

  auto* val = app.add_subcommand("validate", "Check a record table without running inference");
  std::string v_data, v_config, v_params;
  bool v_json = false;
  val->add_option("--data", v_data, "Record table")->required()->check(CLI::ExistingFile);
  auto* v_cfg_opt = val->add_option("--config", v_config, "Run configuration (for parameterization and window)")
                        ->check(CLI::ExistingFile);
  auto* v_par_opt = val->add_option("--parameterization", v_params, "Category list, one label per line")
                        ->check(CLI::ExistingFile);
  v_cfg_opt->excludes(v_par_opt);
  val->add_flag("--json", v_json, "Print the report as JSON");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run) {
      auto cfg = load_config(config_path);
      Overrides ov;
      if (o_data->count()) ov.data = data_path;
      set_if(o_seed, ov.seed, seed);
      set_if(o_perm, ov.permutations, permutations);
      set_if(o_work, ov.workers, workers);
      set_if(o_metric, ov.metric, metric);
      set_if(o_mode, ov.mode, mode);
      set_if(o_alpha, ov.alpha0, alpha0);
      set_if(o_hpd, ov.hpd_level, hpd_level);
      if (o_compact->count()) ov.compact = true;
      if (o_grids->count()) ov.grids = true;
      if (o_trace->count()) ov.posterior_trace = true;
      if (o_ident->count()) ov.identity_order = true;
      apply_overrides(cfg, ov);

      const auto t0 = std::chrono::steady_clock::now();
      const auto status = run_pipeline(std::move(cfg), out_dir, std::cerr);
      const std::chrono::duration<double> dt = std::chrono::steady_clock::now() - t0;
      if (status.exit_code != 0) {
        std::cerr << "error: " << status.error << "\n";
        return status.exit_code;
      }
      std::cerr << "done in " << dt.count() << " s\n";
      return 0;
    }

    Parameterization params;
    StudyWindow window;
    if (v_cfg_opt->count()) {
      const auto cfg = load_config(v_config);
      params = Parameterization::load(cfg.parameterization_path.string());
      window = cfg.run.window;
    } else if (v_par_opt->count()) {
      params = Parameterization::load(v_params);
    } else {
      std::cerr << "error: validate needs --config or --parameterization\n";
      return 3;
    }
    const auto report = validate_data(v_data, params, window);
    if (v_json)
      std::cout << report_json(report);
    else
      print_report(report, window, std::cout);
    return report.issues.empty() ? 0 : 1;
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 4;
  }
}
