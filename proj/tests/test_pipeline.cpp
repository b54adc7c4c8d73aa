#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>

#include "assemblage/error.hpp"
#include "assemblage/pipeline.hpp"
#include "doctest.h"

using namespace assemblage;
namespace fs = std::filesystem;

namespace {

const fs::path kFixtures = FIXTURE_DIR;

fs::path scratch(const std::string& name) {
  const auto dir = fs::temp_directory_path() / ("assemblage_unit_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

std::map<std::string, std::string> tree(const fs::path& dir) {
  std::map<std::string, std::string> out;
  for (const auto& e : fs::recursive_directory_iterator(dir))
    if (e.is_regular_file()) out[fs::relative(e.path(), dir).string()] = slurp(e.path());
  return out;
}

const char* kMinimal = R"({
  "parameterization": "colors.txt",
  "data": "records.csv",
  "window": {"start_year": 0, "end_year": 10, "interval_length": 10},
  "scopes": [{"id": "a", "projects": ["urn1"]}, {"id": "b", "projects": ["urn2"]}],
  "comparisons": [["a", "b"]]
})";

}  // namespace

TEST_CASE("sha256 test vectors") {
  CHECK(sha256_hex("") == "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
  CHECK(sha256_hex("abc") == "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}

TEST_CASE("config parsing and defaults") {
  const auto cfg = parse_config(kMinimal, kFixtures / "urns");
  CHECK(cfg.parameterization_path == kFixtures / "urns" / "colors.txt");
  CHECK(cfg.data_path == kFixtures / "urns" / "records.csv");
  CHECK(cfg.run.permutations == 40);
  CHECK(cfg.run.prior.concentration == 1.0);
  CHECK(cfg.run.mode == AggregationMode::unweighted);
  CHECK(cfg.run.metric == Metric::hellinger);
  CHECK(cfg.run.window.interval_count() == 1);
  CHECK(cfg.hpd_level == 0.9);
  CHECK(cfg.density.grid_size == 512);
  REQUIRE(cfg.scope_selectors.size() == 2);
  CHECK(cfg.scope_selectors[0].projects == std::vector<std::string>{"urn1"});

  const auto full = load_config(kFixtures / "urns" / "config.json");
  CHECK(full.run.prior.concentration == 0.0);
  CHECK(full.run.seed == 1);
  CHECK(full.run.comparisons.size() == 3);
}

TEST_CASE("config errors") {
  CHECK_THROWS_AS(parse_config("{", "."), ConfigError);
  CHECK_THROWS_AS(parse_config("[]", "."), ConfigError);
  std::string typo = kMinimal;
  typo.replace(typo.find("\"data\""), 6, "\"dataa\"");
  CHECK_THROWS_AS(parse_config(typo, "."), ConfigError);
  std::string bad_pair = kMinimal;
  bad_pair.replace(bad_pair.find("[[\"a\", \"b\"]]"), 12, "[[\"a\", \"c\"]]");
  CHECK_THROWS_AS(parse_config(bad_pair, "."), ConfigError);
  std::string bad_mode = kMinimal;
  bad_mode.insert(1, "\"mode\": \"median\",");
  CHECK_THROWS_AS(parse_config(bad_mode, "."), ConfigError);
  CHECK_THROWS_AS(load_config(kFixtures / "missing.json"), ConfigError);
}

TEST_CASE("overrides") {
  auto cfg = parse_config(kMinimal, kFixtures / "urns");
  Overrides o;
  o.seed = 77;
  o.permutations = 3;
  o.metric = "kl";
  o.alpha0 = 0.5;
  apply_overrides(cfg, o);
  CHECK(cfg.run.seed == 77);
  CHECK(cfg.run.permutations == 3);
  CHECK(cfg.run.metric == Metric::kl);
  CHECK(cfg.run.prior.concentration == 0.5);
  Overrides bad;
  bad.hpd_level = 1.5;
  CHECK_THROWS_AS(apply_overrides(cfg, bad), ConfigError);
}

TEST_CASE("scope selectors resolve against the data") {
  std::vector<FindRecord> recs(4);
  const char* proj[] = {"P2", "P1", "P3", "P2"};
  const char* reg[] = {"north", "south", "north", "north"};
  for (int i = 0; i < 4; ++i) recs[i].project = proj[i], recs[i].region = reg[i];
  std::vector<ScopeSelector> sel(3);
  sel[0].id = "n";
  sel[0].regions = {"north"};
  sel[1].id = "all";
  sel[1].all = true;
  sel[2].id = "one";
  sel[2].projects = {"P1"};
  const auto scopes = resolve_scopes(sel, recs);
  CHECK(scopes[0].member_projects == std::vector<std::string>{"P2", "P3"});
  CHECK(scopes[1].member_projects == std::vector<std::string>{"P2", "P1", "P3"});
  CHECK(scopes[2].member_projects == std::vector<std::string>{"P1"});
  sel[0].regions = {"east"};
  CHECK_THROWS_AS(resolve_scopes(sel, recs), ConfigError);
}

TEST_CASE("weighted mode with a zero prior stops before any output") {
  auto cfg = load_config(kFixtures / "urns" / "config.json");
  cfg.run.mode = AggregationMode::weighted;
  const auto out = scratch("weighted_zero");
  std::ostringstream log;
  const auto status = run_pipeline(cfg, out / "run", log);
  CHECK(status.exit_code == 3);
  CHECK(status.error.find("alpha0") != std::string::npos);
  CHECK_FALSE(fs::exists(out / "run" / "manifest.json"));
}

TEST_CASE("invalid rows produce errors.json and exit code 2") {
  const auto dir = scratch("bad_rows");
  fs::copy_file(kFixtures / "urns" / "colors.txt", dir / "colors.txt");
  std::ofstream(dir / "records.csv") << "key,project,region,category,count,date_start,date_end\n"
                                        "a,urn1,r,red,1,0,9\n"
                                        "b,urn2,r,mauve,1,0,9\n"
                                        "c,urn2,r,red,1,9,0\n";
  auto cfg = parse_config(kMinimal, dir);
  std::ostringstream log;
  const auto status = run_pipeline(cfg, dir / "out", log);
  CHECK(status.exit_code == 2);
  const auto errors = slurp(dir / "out" / "errors.json");
  CHECK(errors.find("mauve") != std::string::npos);
  CHECK(errors.find("\"line\": 4") != std::string::npos);
  CHECK_FALSE(fs::exists(dir / "out" / "manifest.json"));

  const auto report = validate_data(dir / "records.csv", Parameterization::load((dir / "colors.txt").string()),
                                    StudyWindow(0, 10, 10));
  CHECK(report.rows == 3);
  CHECK(report.valid == 1);
  REQUIRE(report.issues.size() == 2);
  CHECK(report.issues[0].kind == InputIssue::Kind::unknown_category);
  CHECK(report.issues[1].kind == InputIssue::Kind::bad_dates);
  std::ostringstream text;
  print_report(report, StudyWindow(0, 10, 10), text);
  CHECK(text.str().find("line 3") != std::string::npos);
  CHECK(report_json(report).find("\"valid\": 1") != std::string::npos);
}

TEST_CASE("validation report on a clean fixture") {
  const StudyWindow w(0, 10, 10);
  const auto report = validate_data(kFixtures / "urns" / "records.csv",
                                    Parameterization::load((kFixtures / "urns" / "colors.txt").string()), w);
  CHECK(report.rows == 30);
  CHECK(report.valid == 30);
  CHECK(report.issues.empty());
  CHECK(report.out_of_window == 0);
  REQUIRE(report.records_per_project.size() == 3);
  CHECK(report.records_per_project[0].second == 10);
  REQUIRE(report.interval_mass.size() == 1);
  CHECK(report.interval_mass[0] == 30.0);
}

TEST_CASE("pipeline outputs carry the manifest digest and are deterministic") {
  auto cfg = load_config(kFixtures / "urns" / "config.json");
  cfg.run.permutations = 6;
  cfg.outputs.grids = true;
  cfg.outputs.posterior_trace = true;
  const auto dir = scratch("determinism");
  std::ostringstream log;
  REQUIRE(run_pipeline(cfg, dir / "one", log).exit_code == 0);
  cfg.run.workers = 3;
  REQUIRE(run_pipeline(cfg, dir / "two", log).exit_code == 0);
  const auto a = tree(dir / "one");
  const auto b = tree(dir / "two");
  CHECK(a == b);

  for (const char* f : {"manifest.json", "phi.csv", "final_phi.csv", "summary.csv", "groups.csv",
                        "posterior_trace.csv", "trajectories/urn1-vs-urn3.csv", "grids/urn2-vs-urn3.csv"})
    CHECK_MESSAGE(a.count(f) == 1, f);
  const std::string header = "# manifest-sha256: " + sha256_hex(a.at("manifest.json")) + "\n";
  for (const auto& [name, body] : a)
    if (name != "manifest.json") CHECK_MESSAGE(body.rfind(header, 0) == 0, name);

  const auto& final_phi = a.at("final_phi.csv");
  CHECK(final_phi.find("urn1-vs-urn2,1,0,0") != std::string::npos);
  CHECK(a.at("manifest.json").find("\"draw_events\": 180") != std::string::npos);
}

TEST_CASE("compact output omits per-sample tables") {
  auto cfg = load_config(kFixtures / "urns" / "config.json");
  cfg.run.permutations = 2;
  cfg.outputs.compact = true;
  const auto dir = scratch("compact");
  std::ostringstream log;
  REQUIRE(run_pipeline(cfg, dir, log).exit_code == 0);
  CHECK_FALSE(fs::exists(dir / "phi.csv"));
  CHECK_FALSE(fs::exists(dir / "trajectories"));
  CHECK(fs::exists(dir / "summary.csv"));
  CHECK(fs::exists(dir / "final_phi.csv"));
}
