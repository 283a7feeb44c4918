#include <cmath>

#include "riscalc/kernels/cascade.hpp"

namespace riscalc::kernels {

void cascade_sum_scalar(const CascadeBatch& batch) {
  const std::size_t count = batch.count;
  const double* z = batch.normals.data();
  double* xi = batch.xi.data();
  for (std::size_t i = 0; i < count; ++i) xi[i] = 0.0;
  for (std::size_t l = 0; l < batch.elements; ++l) {
    const double* z1 = z + (4 * l) * count;
    const double* z2 = z1 + count;
    const double* z3 = z2 + count;
    const double* z4 = z3 + count;
    for (std::size_t i = 0; i < count; ++i) {
      const double re1 = batch.hop1.los + batch.hop1.sigma * z1[i];
      const double im1 = batch.hop1.sigma * z2[i];
      const double re2 = batch.hop2.los + batch.hop2.sigma * z3[i];
      const double im2 = batch.hop2.sigma * z4[i];
      const double alpha = std::sqrt(re1 * re1 + im1 * im1);
      const double beta = std::sqrt(re2 * re2 + im2 * im2);
      xi[i] = xi[i] + alpha * beta;
    }
  }
}

}  // namespace riscalc::kernels
