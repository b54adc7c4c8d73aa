#include <cstdlib>
#include <stdexcept>
#include <string>

#include "assemblage/simd/kernels.hpp"

namespace assemblage::simd {
namespace {

constexpr KernelTable kScalar{Isa::scalar, &detail::bhattacharyya_scalar, &detail::hellinger_sq_scalar,
                            &detail::gaussian_sum_scalar};
#if defined(ASSEMBLAGE_HAVE_AVX2)
constexpr KernelTable kAvx2{Isa::avx2, &detail::bhattacharyya_avx2, &detail::hellinger_sq_avx2,
                          &detail::gaussian_sum_avx2};
#endif

const KernelTable& resolve() {
  if (const char* forced = std::getenv("ASSEMBLAGE_SIMD")) {
    const std::string v(forced);
    if (v == "scalar") return kScalar;
    if (v == "avx2" && supported(Isa::avx2)) return kernels_for(Isa::avx2);
  }
  if (supported(Isa::avx2)) return kernels_for(Isa::avx2);
  return kScalar;
}

}  // namespace

std::string_view to_string(Isa isa) noexcept {
  switch (isa) {
    case Isa::scalar: return "scalar";
    case Isa::avx2: return "avx2";
  }
  return "unknown";
}

bool supported(Isa isa) noexcept {
  switch (isa) {
    case Isa::scalar: return true;
    case Isa::avx2:
#if defined(ASSEMBLAGE_HAVE_AVX2)
      __builtin_cpu_init();
      return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
      return false;
#endif
  }
  return false;
}

const KernelTable& kernels_for(Isa isa) {
  if (!supported(isa)) throw std::invalid_argument("ISA " + std::string(to_string(isa)) + " not available");
#if defined(ASSEMBLAGE_HAVE_AVX2)
  if (isa == Isa::avx2) return kAvx2;
#endif
  return kScalar;
}

const KernelTable& kernels() {
  static const KernelTable& table = resolve();
  return table;
}

}  // namespace assemblage::simd
