#include "assemblage/density.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "assemblage/error.hpp"
#include "assemblage/simd/kernels.hpp"

namespace assemblage {
namespace {

constexpr double kInvSqrt2Pi = 0.39894228040143267794;
// Kernel contributions beyond this many bandwidths are below exp(-50).
constexpr double kCutoff = 10.0;

// Linear-interpolation quantile of sorted data (Hyndman & Fan type 7).
double quantile_sorted(std::span<const double> sorted, double p) {
  const double h = (static_cast<double>(sorted.size()) - 1.0) * p;
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const auto hi = std::min(lo + 1, sorted.size() - 1);
  return sorted[lo] + (h - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
}

double sample_sd(std::span<const double> x) {
  const double n = static_cast<double>(x.size());
  const double mean = std::accumulate(x.begin(), x.end(), 0.0) / n;
  double ss = 0.0;
  for (double v : x) ss += (v - mean) * (v - mean);
  return std::sqrt(ss / (n - 1.0));
}

}  // namespace

std::vector<double> trapezoid_weights(std::size_t n, double step) {
  std::vector<double> w(n, step);
  if (n > 0) {
    w.front() *= 0.5;
    w.back() *= 0.5;
  }
  return w;
}

double silverman_bandwidth(std::span<const double> samples) {
  if (samples.size() < 2) throw InsufficientDataError("bandwidth needs at least 2 samples");
  std::vector<double> sorted(samples.begin(), samples.end());
  std::sort(sorted.begin(), sorted.end());
  const double sd = sample_sd(sorted);
  if (!(sd > 0.0)) return 0.0;
  const double iqr = quantile_sorted(sorted, 0.75) - quantile_sorted(sorted, 0.25);
  double spread = std::min(sd, iqr / 1.34);
  if (!(spread > 0.0)) spread = sd;
  return 0.9 * spread * std::pow(static_cast<double>(sorted.size()), -0.2);
}

DensitySummary kde(std::span<const double> samples, const DensityOptions& options) {
  if (samples.size() < 2)
    throw InsufficientDataError("density estimate needs at least 2 samples, got " + std::to_string(samples.size()));
  if (options.grid_size < 2) throw ConfigError("density grid needs at least 2 points");
  if (options.upper && !(*options.upper > 0.0)) throw ConfigError("density support upper bound must be positive");

  std::vector<double> sorted(samples.begin(), samples.end());
  std::sort(sorted.begin(), sorted.end());
  const double slack = 1e-9;
  if (sorted.front() < -slack || (options.upper && sorted.back() > *options.upper + slack))
    throw ContractError("density samples fall outside the support");
  for (auto& v : sorted) {
    v = std::max(v, 0.0);
    if (options.upper) v = std::min(v, *options.upper);
  }

  DensitySummary out;
  out.sample_count = sorted.size();
  const auto G = options.grid_size;

  double h = options.bandwidth > 0.0 ? options.bandwidth : silverman_bandwidth(sorted);
  h *= options.bandwidth_scale;
  const bool degenerate = sorted.front() == sorted.back() || !(h > 0.0);

  double upper = options.upper ? *options.upper : sorted.back() + 4.0 * h;
  if (!(upper > 0.0)) upper = 1.0;  // open-ended support, every sample at 0
  const double step = upper / static_cast<double>(G - 1);
  out.grid.resize(G);
  for (std::size_t g = 0; g < G; ++g) out.grid[g] = step * static_cast<double>(g);
  out.grid.back() = upper;
  out.density.assign(G, 0.0);
  const auto weights = trapezoid_weights(G, step);

  if (degenerate) {
    const double v = sorted.front();
    const auto g = static_cast<std::size_t>(std::lround(v / step));
    const auto cell = std::min(g, G - 1);
    out.density[cell] = 1.0 / weights[cell];
    out.degenerate_value = v;
    out.bandwidth = 0.0;
    out.mode = v;
    return out;
  }
  out.bandwidth = h;

  // Mirror images of samples near each reflecting boundary.
  std::vector<double> points = sorted;
  if (options.reflect) {
    for (double v : sorted) {
      if (v < kCutoff * h) points.push_back(-v);
      if (options.upper && v > upper - kCutoff * h) points.push_back(2.0 * upper - v);
    }
    std::sort(points.begin(), points.end());
  }

  const auto& kern = simd::kernels();
  const double inv_h = 1.0 / h;
  for (std::size_t g = 0; g < G; ++g) {
    const double x = out.grid[g];
    const auto lo = std::lower_bound(points.begin(), points.end(), x - kCutoff * h);
    const auto hi = std::upper_bound(lo, points.end(), x + kCutoff * h);
    const auto n = static_cast<std::size_t>(hi - lo);
    if (n > 0) out.density[g] = kern.gaussian_sum(&*lo, n, x, inv_h);
  }
  const double scale = kInvSqrt2Pi / (static_cast<double>(sorted.size()) * h);
  double mass = 0.0;
  for (std::size_t g = 0; g < G; ++g) {
    out.density[g] *= scale;
    mass += weights[g] * out.density[g];
  }
  if (!(mass > 0.0)) throw InsufficientDataError("density estimate has no mass on the grid");
  for (auto& d : out.density) d /= mass;
  return out;
}

double mode_estimate(const DensitySummary& summary) {
  if (summary.degenerate_value) return *summary.degenerate_value;
  if (summary.density.empty()) throw ContractError("mode of an empty density");
  const auto it = std::max_element(summary.density.begin(), summary.density.end());
  return summary.grid[static_cast<std::size_t>(it - summary.density.begin())];
}

std::vector<CredibleInterval> hpd_region(const DensitySummary& summary, double level) {
  if (!(level > 0.0 && level < 1.0)) throw ContractError("credible level must lie in (0, 1)");
  if (summary.degenerate_value) return {{*summary.degenerate_value, *summary.degenerate_value}};
  const auto G = summary.density.size();
  if (G < 2) throw ContractError("hpd region of an empty density");
  const auto weights = trapezoid_weights(G, summary.grid[1] - summary.grid[0]);

  std::vector<std::size_t> order(G);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return summary.density[a] > summary.density[b]; });
  double mass = 0.0;
  double threshold = summary.density[order.back()];
  for (auto g : order) {
    mass += weights[g] * summary.density[g];
    if (mass >= level) {
      threshold = summary.density[g];
      break;
    }
  }

  std::vector<CredibleInterval> region;
  std::size_t g = 0;
  while (g < G) {
    if (summary.density[g] < threshold) {
      ++g;
      continue;
    }
    const auto start = g;
    while (g + 1 < G && summary.density[g + 1] >= threshold) ++g;
    region.push_back({summary.grid[start], summary.grid[g]});
    ++g;
  }
  return region;
}

DensitySummary summarize(std::span<const double> samples, double level, const DensityOptions& options) {
  auto s = kde(samples, options);
  s.mode = mode_estimate(s);
  s.hpd_level = level;
  s.hpd_region = hpd_region(s, level);
  return s;
}

}  // namespace assemblage
