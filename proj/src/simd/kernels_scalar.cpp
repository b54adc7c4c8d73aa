#include <cmath>

#include "assemblage/simd/kernels.hpp"

namespace assemblage::simd::detail {

double bhattacharyya_scalar(const double* p, const double* q, std::size_t n) {
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) acc += std::sqrt(p[i] * q[i]);
  return acc;
}

double hellinger_sq_scalar(const double* p, const double* q, std::size_t n) {
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double d = std::sqrt(p[i]) - std::sqrt(q[i]);
    acc += d * d;
  }
  return acc;
}

double gaussian_sum_scalar(const double* samples, std::size_t n, double x, double inv_h) {
  double acc = 0.0;
  for (std::size_t s = 0; s < n; ++s) {
    const double z = (x - samples[s]) * inv_h;
    acc += std::exp(-0.5 * z * z);
  }
  return acc;
}

}  // namespace assemblage::simd::detail
