#pragma once

// Batched synthesis of the cascaded amplitude xi = sum_l alpha_l beta_l from
// pre-drawn Gaussian variates. A scalar reference kernel and SIMD variants
// (AVX2 on x86-64, NEON on AArch64) are selected at runtime. All variants
// perform the same IEEE operations in the same order, so they agree bit for
// bit; the library is compiled with -ffp-contract=off to keep it that way.
//
// Normal layout (structure of arrays): for element l and component c in
// {hop1 real, hop1 imag, hop2 real, hop2 imag}, the variates of samples
// 0..count-1 are contiguous at normals[(4 l + c) * count + i].

#include <cstddef>
#include <span>
#include <string_view>

namespace riscalc::kernels {

enum class SimdLevel { scalar, avx2, neon };

/// Line-of-sight amplitude v and per-component diffuse deviation sigma.
struct HopSplit {
  double los = 0.0;
  double sigma = 0.0;
};

struct CascadeBatch {
  HopSplit hop1;
  HopSplit hop2;
  std::size_t elements = 0;
  std::size_t count = 0;
  std::span<const double> normals;  // 4 * elements * count
  std::span<double> xi;             // count
};

void cascade_sum_scalar(const CascadeBatch& batch);
void cascade_sum_avx2(const CascadeBatch& batch);
void cascade_sum_neon(const CascadeBatch& batch);

using CascadeKernel = void (*)(const CascadeBatch&);

/// True when the variant was compiled in and the CPU supports it.
bool simd_level_available(SimdLevel level);

/// Best available level, unless RISCALC_SIMD names an available one.
SimdLevel detect_simd_level();

/// Kernel for a level; throws std::invalid_argument if unavailable.
CascadeKernel cascade_kernel(SimdLevel level);

std::string_view to_string(SimdLevel level);

}  // namespace riscalc::kernels
