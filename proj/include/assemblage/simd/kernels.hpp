#pragma once

// Data-parallel inner loops. Each kernel has a scalar reference and, on
// x86-64, an AVX2+FMA variant chosen at runtime. Variants agree to within a
// few ulps; the scalar path is the definition.

#include <cstddef>
#include <string_view>

namespace assemblage::simd {

enum class Isa { scalar, avx2 };

std::string_view to_string(Isa isa) noexcept;

struct KernelTable {
  Isa isa;
  /// sum_i sqrt(p_i * q_i). Symmetric in (p, q) bit-for-bit.
  double (*bhattacharyya)(const double* p, const double* q, std::size_t n);
  /// sum_i (sqrt(p_i) - sqrt(q_i))^2. Symmetric bit-for-bit, exactly 0 when p == q.
  double (*hellinger_sq)(const double* p, const double* q, std::size_t n);
  /// sum_s exp(-0.5 * ((x - samples[s]) * inv_h)^2). Callers keep |x - s| * inv_h
  /// below ~10 (the AVX2 exponential is accurate on [-50, 0]).
  double (*gaussian_sum)(const double* samples, std::size_t n, double x, double inv_h);
};

/// True when the CPU (and the build) can run `isa`.
bool supported(Isa isa) noexcept;

/// Kernels for a specific ISA. Throws std::invalid_argument when unsupported.
const KernelTable& kernels_for(Isa isa);

/// Best supported kernels, unless ASSEMBLAGE_SIMD=scalar forces the reference path.
/// Resolved once per process.
const KernelTable& kernels();

namespace detail {
double bhattacharyya_scalar(const double* p, const double* q, std::size_t n);
double hellinger_sq_scalar(const double* p, const double* q, std::size_t n);
double gaussian_sum_scalar(const double* samples, std::size_t n, double x, double inv_h);
#if defined(ASSEMBLAGE_HAVE_AVX2)
double bhattacharyya_avx2(const double* p, const double* q, std::size_t n);
double hellinger_sq_avx2(const double* p, const double* q, std::size_t n);
double gaussian_sum_avx2(const double* samples, std::size_t n, double x, double inv_h);
#endif
}  // namespace detail

}  // namespace assemblage::simd
