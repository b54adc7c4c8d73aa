#include <algorithm>
#include <array>
#include <cmath>
#include <map>
#include <string>
#include <tuple>
#include <vector>

#include "assemblage/error.hpp"
#include "assemblage/permutation.hpp"
#include "doctest.h"

using namespace assemblage;

namespace {

const Parameterization& colors() {
  static const Parameterization p("colors", {"red", "green", "blue"});
  return p;
}

std::vector<FindRecord> urn_records() {
  return load_records(std::string(FIXTURE_DIR) + "/urns/records.csv", colors());
}

RunConfig urn_config(std::size_t R = 40) {
  RunConfig c;
  c.permutations = R;
  c.seed = 1;
  c.prior = PriorSpec{0.0};
  c.window = StudyWindow(0, 10, 10);
  for (const char* u : {"urn1", "urn2", "urn3"}) c.scopes.push_back({u, {u}, {}});
  c.comparisons = {{"urn1", "urn3"}, {"urn2", "urn3"}, {"urn1", "urn2"}};
  return c;
}

FindRecord rec(std::string project, std::size_t cat, double count, std::int64_t a, std::int64_t b) {
  FindRecord r;
  r.key = project + std::to_string(cat) + "_" + std::to_string(a);
  r.project = std::move(project);
  r.region = "r";
  r.category_index = cat;
  r.count = count;
  r.date_start = a;
  r.date_end = b;
  return r;
}

// Last sample of each (comparison, interval, permutation).
std::map<std::tuple<int, int, int>, double> finals(const RunResult& res) {
  std::map<std::tuple<int, int, int>, double> out;
  for (const auto& s : res.samples) out[{int(s.comparison), int(s.interval), int(s.permutation)}] = s.value;
  return out;
}

}  // namespace

TEST_CASE("identity order replays the urn table") {
  const auto records = urn_records();
  auto cfg = urn_config(1);
  cfg.identity_order = true;
  PermutationEngine engine(records, 3, cfg);

  // Oracle: running frequencies straight from the draw sequences.
  const std::map<std::string, std::string> seqs{{"urn1", "RGRRBRGGGR"}, {"urn2", "BGRRRRRGGG"}, {"urn3", "BBRGBRRBGR"}};
  std::map<std::string, std::array<int, 3>> counts;
  int checked = 0;
  engine.run_permutation(0, [&](const DrawEvent& ev) {
    const auto& urn = ev.record.project;
    auto& c = counts[urn];
    const int n = c[0] + c[1] + c[2];
    const char colour = seqs.at(urn)[static_cast<std::size_t>(n)];
    ++c[colour == 'R' ? 0 : colour == 'G' ? 1 : 2];
    const std::size_t s = urn == "urn1" ? 0 : urn == "urn2" ? 1 : 2;
    std::array<double, 3> m{};
    REQUIRE(ev.view.scope_mean(s, 0, m));
    for (int i = 0; i < 3; ++i) CHECK(m[i] == double(c[i]) / double(n + 1));
    ++checked;
  });
  CHECK(checked == 30);
}

TEST_CASE("urn table final distances") {
  const auto records = urn_records();
  const auto res = run_all(records, 3, urn_config(10));
  for (const auto& [key, v] : finals(res)) {
    const int comparison = std::get<0>(key);
    if (comparison == 2)
      CHECK(v == 0.0);  // urn1 and urn2 both end at (0.5, 0.4, 0.1)
    else
      CHECK(v == doctest::Approx(0.37402).epsilon(1e-4));
  }
}

TEST_CASE("undefined sides are skipped under a zero prior") {
  const auto records = urn_records();
  auto cfg = urn_config(1);
  cfg.identity_order = true;
  const auto res = PermutationEngine(records, 3, cfg).run_permutation(0);
  // Draw 1 (urn1): all three comparisons lack a side. Draw 2 (urn2): urn1-vs-urn3
  // and urn2-vs-urn3 lack urn3. From draw 3 on everything is defined.
  CHECK(res.undefined == 5);
  CHECK(res.samples.size() == 30 * 3 - 5);
  CHECK(res.draws == 30);
  CHECK(res.samples.front().draw_index == 2);
  CHECK(res.samples.front().comparison == 2);
}

TEST_CASE("final values are exchangeable, intermediate ones are not") {
  const auto records = urn_records();
  const auto res = run_all(records, 3, urn_config(25));
  std::map<std::pair<int, int>, std::pair<double, double>> range;
  for (const auto& [key, v] : finals(res)) {
    auto [it, fresh] = range.try_emplace({std::get<0>(key), std::get<1>(key)}, v, v);
    it->second.first = std::min(it->second.first, v);
    it->second.second = std::max(it->second.second, v);
  }
  for (const auto& [k, mm] : range) CHECK(mm.second - mm.first < 1e-12);

  // Draw 15 of urn1-vs-urn3 differs between permutations.
  double lo = 10, hi = -10;
  for (const auto& s : res.samples)
    if (s.comparison == 0 && s.draw_index == 15) lo = std::min(lo, s.value), hi = std::max(hi, s.value);
  CHECK(hi - lo > 0.0);
}

TEST_CASE("a single record and a single permutation") {
  const std::vector<FindRecord> records{rec("A", 0, 2, 5, 14)};
  RunConfig cfg;
  cfg.permutations = 1;
  cfg.prior = PriorSpec{1.0};
  cfg.window = StudyWindow(0, 30, 10);
  cfg.scopes = {{"a", {"A"}, {}}, {"b", {"B"}, {}}};
  cfg.comparisons = {{"a", "b"}};
  const auto res = run_all(records, 2, cfg);
  CHECK(res.draw_events == 1);
  REQUIRE(res.samples.size() == 2);  // intervals 0 and 1
  // a: (1 + 1, 1) / 3 against the uniform prior mean of b.
  const double expect = std::sqrt(std::pow(std::sqrt(2.0 / 3) - std::sqrt(0.5), 2) +
                                  std::pow(std::sqrt(1.0 / 3) - std::sqrt(0.5), 2));
  CHECK(res.samples[0].value == doctest::Approx(expect).epsilon(1e-14));
  CHECK(res.groups.size() == 2);
}

TEST_CASE("reversed comparison pairs give identical hellinger samples") {
  const auto records = urn_records();
  auto cfg = urn_config(5);
  cfg.comparisons = {{"urn1", "urn3"}, {"urn3", "urn1"}};
  const auto res = run_all(records, 3, cfg);
  REQUIRE(res.groups.size() == 2);
  const auto& g0 = res.groups[0];
  const auto& g1 = res.groups[1];
  REQUIRE(g0.end - g0.begin == g1.end - g1.begin);
  for (std::size_t i = 0; i < g0.end - g0.begin; ++i) CHECK(res.samples[g0.begin + i].value == res.samples[g1.begin + i].value);
}

TEST_CASE("a permutation depends only on (seed, r)") {
  const auto records = urn_records();
  PermutationEngine small(records, 3, urn_config(3));
  PermutationEngine large(records, 3, urn_config(30));
  auto other_cfg = urn_config(3);
  other_cfg.seed = 2;
  PermutationEngine other(records, 3, other_cfg);
  for (std::size_t r = 0; r < 3; ++r) {
    CHECK(small.permutation_order(r) == large.permutation_order(r));
    CHECK(small.permutation_order(r) != other.permutation_order(r));
  }
  CHECK(small.permutation_order(0) != small.permutation_order(1));
}

TEST_CASE("worker count does not change the output") {
  const auto records = urn_records();
  auto cfg = urn_config(17);
  const auto one = run_all(records, 3, cfg);
  cfg.workers = 4;
  const auto four = run_all(records, 3, cfg);
  REQUIRE(one.samples.size() == four.samples.size());
  for (std::size_t i = 0; i < one.samples.size(); ++i) {
    CHECK(one.samples[i].value == four.samples[i].value);
    CHECK(one.samples[i].permutation == four.samples[i].permutation);
    CHECK(one.samples[i].draw_index == four.samples[i].draw_index);
  }
  CHECK(one.draw_events == four.draw_events);
}

TEST_CASE("samples are ordered by comparison, interval, permutation, draw") {
  std::vector<FindRecord> records;
  for (int i = 0; i < 30; ++i) records.push_back(rec(i % 2 ? "A" : "B", std::size_t(i % 3), 1 + i % 4, -20 + i, -10 + i));
  RunConfig cfg;
  cfg.permutations = 4;
  cfg.seed = 9;
  cfg.window = StudyWindow(-20, 30, 10);
  cfg.scopes = {{"a", {"A"}, {}}, {"b", {"B"}, {}}, {"ab", {"A", "B"}, {}}};
  cfg.comparisons = {{"a", "b"}, {"a", "ab"}};
  cfg.workers = 3;
  const auto res = run_all(records, 3, cfg);
  auto key = [](const PhiSample& s) { return std::make_tuple(s.comparison, s.interval, s.permutation, s.draw_index); };
  for (std::size_t i = 1; i < res.samples.size(); ++i) CHECK(key(res.samples[i - 1]) < key(res.samples[i]));
  std::size_t expected = 0;
  for (const auto& s : spread_records(records, cfg.window).spreads) expected += s.span() * 2 * 4;
  CHECK(res.samples.size() == expected);
  CHECK(res.draw_events == 30 * 4);
}

TEST_CASE("out-of-window records are excluded from the draw stream") {
  const std::vector<FindRecord> records{rec("A", 0, 1, 0, 5), rec("A", 1, 1, 500, 600), rec("B", 1, 1, 3, 3)};
  RunConfig cfg;
  cfg.permutations = 3;
  cfg.window = StudyWindow(0, 10, 10);
  cfg.scopes = {{"a", {"A"}, {}}, {"b", {"B"}, {}}};
  cfg.comparisons = {{"a", "b"}};
  PermutationEngine engine(records, 2, cfg);
  CHECK(engine.skipped_records() == std::vector<std::size_t>{1});
  CHECK(engine.draws_per_permutation() == 2);
  CHECK(engine.run_all().draw_events == 6);
}

TEST_CASE("weighted scope mean is recomputed from member states after every draw") {
  std::vector<FindRecord> records;
  for (int i = 0; i < 24; ++i) records.push_back(rec(std::string(1, char('A' + i % 3)), std::size_t(i * 7 % 4), 1 + i % 3, 0, 9));
  RunConfig cfg;
  cfg.permutations = 2;
  cfg.seed = 4;
  cfg.prior = PriorSpec{0.5};
  cfg.mode = AggregationMode::weighted;
  cfg.window = StudyWindow(0, 10, 10);
  cfg.scopes = {{"abc", {"A", "B", "C"}, {}}, {"a", {"A"}, {}}};
  cfg.comparisons = {{"abc", "a"}};
  PermutationEngine engine(records, 4, cfg);
  std::map<std::string, PosteriorState> oracle;
  for (const char* p : {"A", "B", "C"}) oracle.emplace(p, new_state(p, 4, 1, cfg.prior));
  engine.run_permutation(1, [&](const DrawEvent& ev) {
    oracle.at(ev.record.project).update(ev.spread);
    std::vector<double> expect(4, 0.0);
    for (auto& [name, st] : oracle) {
      const auto m = st.posterior_mean(0);
      for (std::size_t i = 0; i < 4; ++i) expect[i] += m[i] / 3.0;
    }
    std::vector<double> got(4);
    REQUIRE(ev.view.scope_mean(0, 0, got));
    for (std::size_t i = 0; i < 4; ++i) CHECK(got[i] == doctest::Approx(expect[i]).epsilon(1e-14));
  });
}

TEST_CASE("configuration checks") {
  const auto records = urn_records();
  auto cfg = urn_config();
  cfg.mode = AggregationMode::weighted;
  CHECK_THROWS_AS(PermutationEngine(records, 3, cfg), ConfigError);
  cfg = urn_config();
  cfg.metric = Metric::kl;
  CHECK_THROWS_AS(PermutationEngine(records, 3, cfg), ConfigError);
  cfg = urn_config();
  cfg.permutations = 0;
  CHECK_THROWS_AS(PermutationEngine(records, 3, cfg), ConfigError);
  cfg = urn_config();
  cfg.comparisons.push_back({"urn1", "urn9"});
  CHECK_THROWS_AS(PermutationEngine(records, 3, cfg), ConfigError);
  cfg = urn_config();
  cfg.scopes.push_back({"urn1", {"urn2"}, {}});
  CHECK_THROWS_AS(PermutationEngine(records, 3, cfg), ConfigError);
}
