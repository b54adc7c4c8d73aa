#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <vector>

#include "assemblage/error.hpp"
#include "assemblage/metrics.hpp"
#include "doctest.h"

using namespace assemblage;

namespace {

std::vector<double> simplex_point(std::mt19937_64& rng, std::size_t k) {
  std::exponential_distribution<double> e(1.0);
  std::vector<double> p(k);
  double s = 0;
  for (auto& x : p) s += (x = e(rng));
  for (auto& x : p) x /= s;
  return p;
}

}  // namespace

TEST_CASE("hellinger examples") {
  const std::vector<double> a{0.2, 0.3, 0.5};
  CHECK(hellinger(a, a).value == 0.0);
  const std::vector<double> e1{1, 0, 0}, e2{0, 1, 0};
  CHECK(hellinger(e1, e2).value == doctest::Approx(std::sqrt(2.0)).epsilon(1e-15));
  const std::vector<double> p{0.5, 0.4, 0.1}, q{0.4, 0.2, 0.4};
  // BC = sqrt(0.20) + sqrt(0.08) + sqrt(0.04)
  const double bc = std::sqrt(0.20) + std::sqrt(0.08) + std::sqrt(0.04);
  CHECK(bhattacharyya_coefficient(p, q) == doctest::Approx(bc).epsilon(1e-15));
  CHECK(hellinger(p, q).value == doctest::Approx(0.37402).epsilon(1e-4 / 0.37402));
  CHECK(hellinger(p, q).metric == Metric::hellinger);
}

TEST_CASE("kl examples") {
  const std::vector<double> p{0.5, 0.5}, q{0.25, 0.75};
  CHECK(kl_divergence(p, p).value == 0.0);
  CHECK(kl_divergence(p, q).value == doctest::Approx(0.5 * std::log(2.0) + 0.5 * std::log(2.0 / 3.0)));
  CHECK(kl_divergence(p, q).value == doctest::Approx(0.14384).epsilon(1e-4));
  const std::vector<double> z{0.0, 1.0};
  CHECK(kl_divergence(z, q).value == doctest::Approx(std::log(1.0 / 0.75)));
  CHECK_THROWS_AS(kl_divergence(q, z), InfiniteDivergenceError);
}

TEST_CASE("contract errors") {
  const std::vector<double> p3{0.2, 0.3, 0.5}, p2{0.5, 0.5}, bad{0.2, 0.3, 0.6}, neg{-0.1, 0.6, 0.5}, one{1.0};
  CHECK_THROWS_AS(hellinger(p3, p2), ContractError);
  CHECK_THROWS_AS(hellinger(p3, bad), ContractError);
  CHECK_THROWS_AS(hellinger(neg, p3), ContractError);
  CHECK_THROWS_AS(hellinger(one, one), ContractError);
  CHECK_THROWS_AS(kl_divergence(p3, bad), ContractError);
  CHECK(parse_metric("kl") == Metric::kl);
  CHECK_THROWS_AS(parse_metric("chi2"), ConfigError);
}

TEST_CASE("metric properties over random simplex points") {
  std::mt19937_64 rng(99);
  for (int t = 0; t < 5000; ++t) {
    const std::size_t k = 2 + static_cast<std::size_t>(t % 9);
    const auto p = simplex_point(rng, k), q = simplex_point(rng, k), r = simplex_point(rng, k);
    const double pq = hellinger(p, q).value;
    CHECK(pq == hellinger(q, p).value);
    CHECK(pq >= 0.0);
    CHECK(pq <= std::sqrt(2.0) + 1e-12);
    CHECK(hellinger(p, p).value == 0.0);
    CHECK(pq <= hellinger(p, r).value + hellinger(r, q).value + 1e-12);

    // Same relabelling on both sides.
    std::vector<std::size_t> perm(k);
    std::iota(perm.begin(), perm.end(), std::size_t{0});
    std::reverse(perm.begin(), perm.end());
    std::rotate(perm.begin(), perm.begin() + static_cast<std::ptrdiff_t>(t % k), perm.end());
    std::vector<double> pp(k), qq(k);
    for (std::size_t i = 0; i < k; ++i) pp[i] = p[perm[i]], qq[i] = q[perm[i]];
    CHECK(hellinger(pp, qq).value == doctest::Approx(pq).epsilon(1e-12));

    // The guaranteed bound: KL >= -2 ln BC >= 2 (1 - BC) = H^2.
    const double kl = kl_divergence(p, q).value;
    CHECK(kl >= 0.0);
    CHECK(kl >= pq * pq - 1e-12);
  }
}

TEST_CASE("KL does not dominate H itself for nearby distributions") {
  // For close p, q: KL ~ H^2 / 2 < H.
  const std::vector<double> p{0.5, 0.5}, q{0.51, 0.49};
  CHECK(kl_divergence(p, q).value < hellinger(p, q).value);
}
