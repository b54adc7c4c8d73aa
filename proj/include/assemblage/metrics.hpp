#pragma once

#include <span>
#include <string_view>

namespace assemblage {

enum class Metric { hellinger, kl };

std::string_view to_string(Metric m) noexcept;
/// Accepts "hellinger" or "kl"; throws ConfigError otherwise.
Metric parse_metric(std::string_view name);

struct PhiValue {
  double value = 0.0;
  Metric metric = Metric::hellinger;
};

/// sum_i sqrt(p_i q_i)
double bhattacharyya_coefficient(std::span<const double> p, std::span<const double> q);

/// Hellinger distance on the [0, sqrt(2)] scale: sqrt(sum_i (sqrt(p_i) - sqrt(q_i))^2),
/// which equals sqrt(2 (1 - BC)) for probability vectors.
/// Both inputs must be probability vectors of the same length (sum within 1e-9).
PhiValue hellinger(std::span<const double> p, std::span<const double> q);

/// sum_i p_i ln(p_i / q_i), with 0 ln(0/q) = 0. Throws InfiniteDivergenceError
/// when some q_i = 0 while p_i > 0.
PhiValue kl_divergence(std::span<const double> p, std::span<const double> q);

PhiValue distance(Metric metric, std::span<const double> p, std::span<const double> q);

}  // namespace assemblage
