#include "riscalc/kernels/cascade.hpp"

#if defined(RISCALC_ENABLE_SIMD) && defined(__x86_64__)
#include <immintrin.h>
#else
#include <stdexcept>
#endif

namespace riscalc::kernels {

#if defined(RISCALC_ENABLE_SIMD) && defined(__x86_64__)

__attribute__((target("avx2"))) void cascade_sum_avx2(const CascadeBatch& batch) {
  const std::size_t count = batch.count;
  const std::size_t vec_end = count - count % 4;
  const double* z = batch.normals.data();
  double* xi = batch.xi.data();
  const __m256d los1 = _mm256_set1_pd(batch.hop1.los);
  const __m256d sig1 = _mm256_set1_pd(batch.hop1.sigma);
  const __m256d los2 = _mm256_set1_pd(batch.hop2.los);
  const __m256d sig2 = _mm256_set1_pd(batch.hop2.sigma);
  for (std::size_t i = 0; i < count; ++i) xi[i] = 0.0;
  for (std::size_t l = 0; l < batch.elements; ++l) {
    const double* z1 = z + (4 * l) * count;
    const double* z2 = z1 + count;
    const double* z3 = z2 + count;
    const double* z4 = z3 + count;
    std::size_t i = 0;
    for (; i < vec_end; i += 4) {
      const __m256d re1 = _mm256_add_pd(los1, _mm256_mul_pd(sig1, _mm256_loadu_pd(z1 + i)));
      const __m256d im1 = _mm256_mul_pd(sig1, _mm256_loadu_pd(z2 + i));
      const __m256d re2 = _mm256_add_pd(los2, _mm256_mul_pd(sig2, _mm256_loadu_pd(z3 + i)));
      const __m256d im2 = _mm256_mul_pd(sig2, _mm256_loadu_pd(z4 + i));
      const __m256d alpha =
          _mm256_sqrt_pd(_mm256_add_pd(_mm256_mul_pd(re1, re1), _mm256_mul_pd(im1, im1)));
      const __m256d beta =
          _mm256_sqrt_pd(_mm256_add_pd(_mm256_mul_pd(re2, re2), _mm256_mul_pd(im2, im2)));
      _mm256_storeu_pd(xi + i, _mm256_add_pd(_mm256_loadu_pd(xi + i), _mm256_mul_pd(alpha, beta)));
    }
    for (; i < count; ++i) {
      const double re1 = batch.hop1.los + batch.hop1.sigma * z1[i];
      const double im1 = batch.hop1.sigma * z2[i];
      const double re2 = batch.hop2.los + batch.hop2.sigma * z3[i];
      const double im2 = batch.hop2.sigma * z4[i];
      xi[i] = xi[i] + __builtin_sqrt(re1 * re1 + im1 * im1) * __builtin_sqrt(re2 * re2 + im2 * im2);
    }
  }
}

#else

void cascade_sum_avx2(const CascadeBatch&) {
  throw std::logic_error("AVX2 kernel not compiled in");
}

#endif

}  // namespace riscalc::kernels
