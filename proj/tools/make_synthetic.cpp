// Generates the synthetic three-region fixture with known per-interval
// category frequencies.
//
// Records are stratified rather than sampled: each (region, interval) cell
// gets a record quota, split across categories by largest remainder of
// quota * f, and sherd counts and date-span types cycle inside each
// category. The pooled composition of a cell therefore matches f up to
// rounding, which is what makes the truth file a usable oracle.

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <numeric>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "assemblage/shuffle.hpp"

namespace {

using assemblage::CounterStream;

struct Region {
  std::string name;
  double share;  // fraction of all records
  std::vector<std::string> projects;
  std::vector<unsigned> intensity;  // relative project sizes
  std::vector<double> base;         // per-category base profile (form first, ware after)
};

struct Scheme {
  std::string name;
  std::vector<std::string> labels;
  std::size_t offset;  // into Region::base
};

constexpr double kPi = 3.14159265358979323846;

std::vector<double> frequencies(const Region& region, std::size_t region_index, const Scheme& scheme,
                                std::size_t j, std::size_t intervals) {
  const auto K = scheme.labels.size();
  std::vector<double> f(K);
  double total = 0.0;
  for (std::size_t i = 0; i < K; ++i) {
    const double t = 2.0 * kPi * static_cast<double>(j) / static_cast<double>(intervals);
    const double wave = 0.25 * std::sin(t * static_cast<double>(1 + i % 3) + static_cast<double>(region_index));
    f[i] = region.base[scheme.offset + i] * std::exp(wave);
    total += f[i];
  }
  for (auto& x : f) x /= total;
  return f;
}

// Largest-remainder apportionment of `n` items by `weights`.
std::vector<std::size_t> apportion(std::size_t n, const std::vector<double>& weights) {
  const double total = std::accumulate(weights.begin(), weights.end(), 0.0);
  std::vector<std::size_t> out(weights.size());
  std::vector<std::pair<double, std::size_t>> rem;
  std::size_t used = 0;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    const double exact = static_cast<double>(n) * weights[i] / total;
    out[i] = static_cast<std::size_t>(std::floor(exact));
    used += out[i];
    rem.emplace_back(exact - std::floor(exact), i);
  }
  std::stable_sort(rem.begin(), rem.end(), [](const auto& a, const auto& b) { return a.first > b.first; });
  for (std::size_t k = 0; used < n; ++k, ++used) ++out[rem[k % rem.size()].second];
  return out;
}

struct Row {
  std::string project, region, category;
  int count;
  long start, end;
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Generate the synthetic multi-region assemblage fixture"};
  std::string out_dir = ".";
  std::string prefix = "synthetic";
  std::size_t total = 15840;
  std::size_t outside = 24;
  std::uint64_t seed = 7;
  app.add_option("--out", out_dir, "Output directory");
  app.add_option("--prefix", prefix, "File name prefix");
  app.add_option("--records", total, "In-window records per parameterization");
  app.add_option("--outside", outside, "Extra records dated wholly after the window");
  app.add_option("--seed", seed, "Seed for date ranges, project assignment and row order");
  CLI11_PARSE(app, argc, argv);

  const long start_year = -200, length = 10;
  const std::size_t J = 22;

  const std::vector<Region> regions = {
      {"etr", 0.34, {"E1", "E2", "E3", "E4", "E5"}, {4, 2, 2, 1, 1},
       {3.0, 2.0, 1.2, 1.0, 0.8, 0.8, /*ware*/ 3.0, 1.5, 1.0, 0.8, 1.0}},
      {"lat", 0.44, {"L1", "L2", "L3", "L4", "L5"}, {3, 3, 2, 1, 1},
       {1.0, 1.2, 3.0, 2.0, 0.8, 1.0, /*ware*/ 1.0, 3.0, 1.5, 1.0, 0.8}},
      {"apu", 0.22, {"A1", "A2", "A3", "A4"}, {3, 1, 1, 1},
       {0.8, 0.8, 1.0, 1.5, 3.0, 2.2, /*ware*/ 0.8, 1.0, 1.2, 3.0, 2.0}},
  };
  const std::vector<Scheme> schemes = {
      {"form", {"bowl", "plate", "cup", "jug", "jar", "lamp"}, 0},
      {"ware", {"black_gloss", "coarse", "red_slip", "thin_walled", "amphora"}, 6},
  };

  std::filesystem::create_directories(out_dir);
  for (std::size_t sc = 0; sc < schemes.size(); ++sc) {
    const auto& scheme = schemes[sc];
    CounterStream rng(seed, sc);
    std::vector<Row> rows;
    std::ofstream truth(std::filesystem::path(out_dir) / (prefix + "_truth_" + scheme.name + ".csv"));
    truth << "scope,interval";
    for (const auto& l : scheme.labels) truth << "," << l;
    truth << "\n";
    truth.precision(17);

    std::vector<double> shares;
    for (const auto& r : regions) shares.push_back(r.share);
    // Cell quotas: split the total over regions, then evenly over intervals.
    const auto per_region = apportion(total, shares);
    std::vector<std::vector<double>> global_mass(J, std::vector<double>(scheme.labels.size(), 0.0));
    std::vector<double> global_total(J, 0.0);

    for (std::size_t ri = 0; ri < regions.size(); ++ri) {
      const auto& region = regions[ri];
      const auto cells = apportion(per_region[ri], std::vector<double>(J, 1.0));
      std::vector<double> intensity(region.intensity.begin(), region.intensity.end());
      std::size_t project_cursor = 0;
      for (std::size_t j = 0; j < J; ++j) {
        const auto f = frequencies(region, ri, scheme, j, J);
        truth << region.name << "," << (j + 1);
        for (double x : f) truth << "," << x;
        truth << "\n";
        for (std::size_t i = 0; i < f.size(); ++i) {
          global_mass[j][i] += static_cast<double>(cells[j]) * f[i];
        }
        global_total[j] += static_cast<double>(cells[j]);

        const auto quota = apportion(cells[j], f);
        for (std::size_t i = 0; i < quota.size(); ++i) {
          const auto phase = static_cast<int>(rng.below(6));
          const auto span_phase = rng.below(20);
          for (std::size_t q = 0; q < quota[i]; ++q) {
            Row row;
            row.region = region.name;
            row.category = scheme.labels[i];
            row.count = 1 + static_cast<int>((q + static_cast<std::size_t>(phase)) % 6);
            // Project by weighted round robin.
            std::size_t acc = 0, pick = 0;
            const auto wsum = std::accumulate(region.intensity.begin(), region.intensity.end(), 0u);
            const auto slot = project_cursor++ % wsum;
            for (pick = 0; pick < region.intensity.size(); ++pick) {
              acc += region.intensity[pick];
              if (slot < acc) break;
            }
            row.project = region.projects[pick];
            // Mostly single-decade dates, some two- and three-decade spans.
            const long decade = start_year + static_cast<long>(j) * length;
            // Span type cycles with period 20 (16 single, 3 double, 1 triple) so
            // every category exports the same share of its mass to neighbours.
            const auto u = (q + span_phase) % 20;
            if (u < 16 || J == 1) {
              row.start = decade + static_cast<long>(rng.below(10));
              row.end = row.start + static_cast<long>(rng.below(static_cast<std::uint64_t>(decade + length - row.start)));
            } else if (u < 19) {
              const long lo = j + 1 < J ? decade : decade - length;
              row.start = lo + static_cast<long>(rng.below(10));
              row.end = lo + length + static_cast<long>(rng.below(10));
            } else {
              const long lo = decade - length;
              row.start = lo + static_cast<long>(rng.below(10));
              row.end = std::min(lo + 2 * length + static_cast<long>(rng.below(10)), start_year + static_cast<long>(J) * length - 1);
            }
            rows.push_back(row);
          }
        }
      }
    }
    for (std::size_t j = 0; j < J; ++j) {
      truth << "ita," << (j + 1);
      for (double m : global_mass[j]) truth << "," << m / global_total[j];
      truth << "\n";
    }
    for (std::size_t k = 0; k < outside; ++k) {
      const auto& region = regions[k % regions.size()];
      rows.push_back(Row{region.projects[0], region.name, scheme.labels[k % scheme.labels.size()], 1,
                         start_year + static_cast<long>(J) * length + 10, start_year + static_cast<long>(J) * length + 40});
    }

    std::vector<std::size_t> order(rows.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    assemblage::shuffle_indices(order, seed, 1000 + sc);

    std::ofstream data(std::filesystem::path(out_dir) / (prefix + "_" + scheme.name + ".csv"));
    data << "# synthetic fixture, parameterization " << scheme.name << ", generated by make_synthetic --records "
         << total << " --outside " << outside << " --seed " << seed << "\n";
    data << "key,project,region,category,count,date_start,date_end,frtype,nw\n";
    for (std::size_t k = 0; k < order.size(); ++k) {
      const auto& r = rows[order[k]];
      data << scheme.name[0] << (k + 1) << "," << r.project << "," << r.region << "," << r.category << "," << r.count
           << "," << r.start << "," << r.end << ",sherd,\n";
    }
    std::ofstream labels(std::filesystem::path(out_dir) / (scheme.name + ".txt"));
    for (const auto& l : scheme.labels) labels << l << "\n";
    std::cout << scheme.name << ": " << rows.size() << " records\n";
  }
  return 0;
}
