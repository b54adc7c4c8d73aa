#include "assemblage/metrics.hpp"

#include <cmath>
#include <string>

#include "assemblage/error.hpp"
#include "assemblage/simd/kernels.hpp"

namespace assemblage {
namespace {

constexpr double kSumTolerance = 1e-9;

void check_pair(std::span<const double> p, std::span<const double> q) {
  if (p.size() != q.size())
    throw ContractError("probability vectors differ in length (" + std::to_string(p.size()) + " vs " +
                        std::to_string(q.size()) + ")");
  if (p.size() < 2) throw ContractError("probability vectors need at least 2 components");
  for (auto v : {p, q}) {
    double s = 0.0;
    for (double x : v) {
      if (!(x >= 0.0)) throw ContractError("probability vector has a negative or NaN component");
      s += x;
    }
    if (std::abs(s - 1.0) > kSumTolerance) throw ContractError("probability vector does not sum to 1");
  }
}

}  // namespace

std::string_view to_string(Metric m) noexcept {
  return m == Metric::hellinger ? "hellinger" : "kl";
}

Metric parse_metric(std::string_view name) {
  if (name == "hellinger") return Metric::hellinger;
  if (name == "kl") return Metric::kl;
  throw ConfigError("unknown metric '" + std::string(name) + "' (expected hellinger or kl)");
}

double bhattacharyya_coefficient(std::span<const double> p, std::span<const double> q) {
  if (p.size() != q.size()) throw ContractError("probability vectors differ in length");
  return simd::kernels().bhattacharyya(p.data(), q.data(), p.size());
}

PhiValue hellinger(std::span<const double> p, std::span<const double> q) {
  check_pair(p, q);
  // Sum of squared root differences equals 2 (1 - BC) for normalized inputs
  // but stays exactly 0 for p == q, where 1 - BC would leave ulp residue.
  const double h2 = simd::kernels().hellinger_sq(p.data(), q.data(), p.size());
  return {std::sqrt(std::max(0.0, h2)), Metric::hellinger};
}

PhiValue kl_divergence(std::span<const double> p, std::span<const double> q) {
  check_pair(p, q);
  double d = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (p[i] == 0.0) continue;
    if (q[i] == 0.0)
      throw InfiniteDivergenceError("KL divergence is infinite: q[" + std::to_string(i) + "] = 0 where p > 0");
    d += p[i] * std::log(p[i] / q[i]);
  }
  return {std::max(0.0, d), Metric::kl};
}

PhiValue distance(Metric metric, std::span<const double> p, std::span<const double> q) {
  return metric == Metric::hellinger ? hellinger(p, q) : kl_divergence(p, q);
}

}  // namespace assemblage
