#include "riscalc/kernels/cascade.hpp"

#if defined(RISCALC_ENABLE_SIMD) && defined(__aarch64__)
#include <arm_neon.h>

#include <cmath>
#else
#include <stdexcept>
#endif

namespace riscalc::kernels {

#if defined(RISCALC_ENABLE_SIMD) && defined(__aarch64__)

void cascade_sum_neon(const CascadeBatch& batch) {
  const std::size_t count = batch.count;
  const std::size_t vec_end = count - count % 2;
  const double* z = batch.normals.data();
  double* xi = batch.xi.data();
  const float64x2_t los1 = vdupq_n_f64(batch.hop1.los);
  const float64x2_t sig1 = vdupq_n_f64(batch.hop1.sigma);
  const float64x2_t los2 = vdupq_n_f64(batch.hop2.los);
  const float64x2_t sig2 = vdupq_n_f64(batch.hop2.sigma);
  for (std::size_t i = 0; i < count; ++i) xi[i] = 0.0;
  for (std::size_t l = 0; l < batch.elements; ++l) {
    const double* z1 = z + (4 * l) * count;
    const double* z2 = z1 + count;
    const double* z3 = z2 + count;
    const double* z4 = z3 + count;
    std::size_t i = 0;
    for (; i < vec_end; i += 2) {
      const float64x2_t re1 = vaddq_f64(los1, vmulq_f64(sig1, vld1q_f64(z1 + i)));
      const float64x2_t im1 = vmulq_f64(sig1, vld1q_f64(z2 + i));
      const float64x2_t re2 = vaddq_f64(los2, vmulq_f64(sig2, vld1q_f64(z3 + i)));
      const float64x2_t im2 = vmulq_f64(sig2, vld1q_f64(z4 + i));
      const float64x2_t alpha = vsqrtq_f64(vaddq_f64(vmulq_f64(re1, re1), vmulq_f64(im1, im1)));
      const float64x2_t beta = vsqrtq_f64(vaddq_f64(vmulq_f64(re2, re2), vmulq_f64(im2, im2)));
      vst1q_f64(xi + i, vaddq_f64(vld1q_f64(xi + i), vmulq_f64(alpha, beta)));
    }
    for (; i < count; ++i) {
      const double re1 = batch.hop1.los + batch.hop1.sigma * z1[i];
      const double im1 = batch.hop1.sigma * z2[i];
      const double re2 = batch.hop2.los + batch.hop2.sigma * z3[i];
      const double im2 = batch.hop2.sigma * z4[i];
      xi[i] = xi[i] + std::sqrt(re1 * re1 + im1 * im1) * std::sqrt(re2 * re2 + im2 * im2);
    }
  }
}

#else

void cascade_sum_neon(const CascadeBatch&) {
  throw std::logic_error("NEON kernel not compiled in");
}

#endif

}  // namespace riscalc::kernels
