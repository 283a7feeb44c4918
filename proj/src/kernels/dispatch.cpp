#include <cstdlib>
#include <stdexcept>
#include <string>

#include "riscalc/kernels/cascade.hpp"

namespace riscalc::kernels {

bool simd_level_available(SimdLevel level) {
  switch (level) {
    case SimdLevel::scalar:
      return true;
    case SimdLevel::avx2:
#if defined(RISCALC_ENABLE_SIMD) && defined(__x86_64__)
      return __builtin_cpu_supports("avx2");
#else
      return false;
#endif
    case SimdLevel::neon:
#if defined(RISCALC_ENABLE_SIMD) && defined(__aarch64__)
      return true;
#else
      return false;
#endif
  }
  return false;
}

SimdLevel detect_simd_level() {
  if (const char* env = std::getenv("RISCALC_SIMD")) {
    const std::string name(env);
    for (SimdLevel level : {SimdLevel::scalar, SimdLevel::avx2, SimdLevel::neon}) {
      if (name == to_string(level) && simd_level_available(level)) return level;
    }
  }
  if (simd_level_available(SimdLevel::avx2)) return SimdLevel::avx2;
  if (simd_level_available(SimdLevel::neon)) return SimdLevel::neon;
  return SimdLevel::scalar;
}

CascadeKernel cascade_kernel(SimdLevel level) {
  if (!simd_level_available(level)) {
    throw std::invalid_argument("SIMD level not available: " + std::string(to_string(level)));
  }
  switch (level) {
    case SimdLevel::scalar:
      return &cascade_sum_scalar;
    case SimdLevel::avx2:
      return &cascade_sum_avx2;
    case SimdLevel::neon:
      return &cascade_sum_neon;
  }
  return &cascade_sum_scalar;
}

std::string_view to_string(SimdLevel level) {
  switch (level) {
    case SimdLevel::scalar:
      return "scalar";
    case SimdLevel::avx2:
      return "avx2";
    case SimdLevel::neon:
      return "neon";
  }
  return "unknown";
}

}  // namespace riscalc::kernels
