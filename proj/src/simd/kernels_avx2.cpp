// Compiled with -mavx2 -mfma; only called after a runtime CPU check.

#include <immintrin.h>

#include <cmath>

#include "assemblage/simd/kernels.hpp"

namespace assemblage::simd::detail {
namespace {

inline double hsum(__m256d v) {
  const __m128d lo = _mm256_castpd256_pd128(v);
  const __m128d hi = _mm256_extractf128_pd(v, 1);
  const __m128d s = _mm_add_pd(lo, hi);
  return _mm_cvtsd_f64(_mm_add_sd(s, _mm_unpackhi_pd(s, s)));
}

// exp(x) for x in [-708, 0]: x = k ln2 + r with |r| <= ln2/2, exp(r) by a
// degree-13 Taylor polynomial (truncation < 1e-17 relative), then scale by 2^k.
inline __m256d exp_neg(__m256d x) {
  const __m256d log2e = _mm256_set1_pd(1.4426950408889634);
  const __m256d ln2_hi = _mm256_set1_pd(6.93147180369123816490e-01);
  const __m256d ln2_lo = _mm256_set1_pd(1.90821492927058770002e-10);
  x = _mm256_max_pd(x, _mm256_set1_pd(-708.0));
  const __m256d k = _mm256_round_pd(_mm256_mul_pd(x, log2e), _MM_FROUND_TO_NEAREST_INT | _MM_FROUND_NO_EXC);
  __m256d r = _mm256_fnmadd_pd(k, ln2_hi, x);
  r = _mm256_fnmadd_pd(k, ln2_lo, r);

  static constexpr double c[] = {
      1.0 / 6227020800.0, 1.0 / 479001600.0, 1.0 / 39916800.0, 1.0 / 3628800.0, 1.0 / 362880.0,
      1.0 / 40320.0,      1.0 / 5040.0,      1.0 / 720.0,      1.0 / 120.0,     1.0 / 24.0,
      1.0 / 6.0,          0.5,               1.0,              1.0};
  __m256d p = _mm256_set1_pd(c[0]);
  for (int i = 1; i < 14; ++i) p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(c[i]));

  // 2^k via the exponent field.
  const __m128i ki = _mm256_cvtpd_epi32(k);
  __m256i e = _mm256_cvtepi32_epi64(ki);
  e = _mm256_slli_epi64(_mm256_add_epi64(e, _mm256_set1_epi64x(1023)), 52);
  return _mm256_mul_pd(p, _mm256_castsi256_pd(e));
}

}  // namespace

double bhattacharyya_avx2(const double* p, const double* q, std::size_t n) {
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d prod = _mm256_mul_pd(_mm256_loadu_pd(p + i), _mm256_loadu_pd(q + i));
    acc = _mm256_add_pd(acc, _mm256_sqrt_pd(prod));
  }
  double sum = hsum(acc);
  for (; i < n; ++i) sum += std::sqrt(p[i] * q[i]);
  return sum;
}

double hellinger_sq_avx2(const double* p, const double* q, std::size_t n) {
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d d = _mm256_sub_pd(_mm256_sqrt_pd(_mm256_loadu_pd(p + i)), _mm256_sqrt_pd(_mm256_loadu_pd(q + i)));
    acc = _mm256_add_pd(acc, _mm256_mul_pd(d, d));
  }
  double sum = hsum(acc);
  for (; i < n; ++i) {
    const double d = std::sqrt(p[i]) - std::sqrt(q[i]);
    sum += d * d;
  }
  return sum;
}

double gaussian_sum_avx2(const double* samples, std::size_t n, double x, double inv_h) {
  const __m256d vx = _mm256_set1_pd(x);
  const __m256d vh = _mm256_set1_pd(inv_h);
  const __m256d neg_half = _mm256_set1_pd(-0.5);
  __m256d acc0 = _mm256_setzero_pd();
  __m256d acc1 = _mm256_setzero_pd();
  std::size_t s = 0;
  for (; s + 8 <= n; s += 8) {
    const __m256d z0 = _mm256_mul_pd(_mm256_sub_pd(vx, _mm256_loadu_pd(samples + s)), vh);
    const __m256d z1 = _mm256_mul_pd(_mm256_sub_pd(vx, _mm256_loadu_pd(samples + s + 4)), vh);
    acc0 = _mm256_add_pd(acc0, exp_neg(_mm256_mul_pd(neg_half, _mm256_mul_pd(z0, z0))));
    acc1 = _mm256_add_pd(acc1, exp_neg(_mm256_mul_pd(neg_half, _mm256_mul_pd(z1, z1))));
  }
  for (; s + 4 <= n; s += 4) {
    const __m256d z = _mm256_mul_pd(_mm256_sub_pd(vx, _mm256_loadu_pd(samples + s)), vh);
    acc0 = _mm256_add_pd(acc0, exp_neg(_mm256_mul_pd(neg_half, _mm256_mul_pd(z, z))));
  }
  double sum = hsum(_mm256_add_pd(acc0, acc1));
  for (; s < n; ++s) {
    const double z = (x - samples[s]) * inv_h;
    sum += std::exp(-0.5 * z * z);
  }
  return sum;
}

}  // namespace assemblage::simd::detail
