#pragma once

// Real-argument Meijer G-function
//
//   G^{m,n}_{p,q}(z | a_1..a_p ; b_1..b_q)
//     = 1/(2 pi i) \int_L  prod_{j<=m} Γ(b_j - s) prod_{i<=n} Γ(1 - a_i + s)
//                        / [prod_{j>m} Γ(1 - b_j + s) prod_{i>n} Γ(a_i - s)]  z^s ds
//
// evaluated by numerical quadrature along a contour that crosses the real
// axis once, at the minimum of the integrand between the two pole families,
// and whose tails bend toward the side where the integrand decays fastest.
// A residue series over the right-hand poles is available as a cross-check
// and as a fallback.

#include <vector>

namespace riscalc::specfun {

struct MeijerGSpec {
  int m = 0;
  int n = 0;
  std::vector<double> a;  // upper row, size p
  std::vector<double> b;  // lower row, size q

  int p() const { return static_cast<int>(a.size()); }
  int q() const { return static_cast<int>(b.size()); }

  /// Throws UnsupportedParameters on bad counts, non-finite parameters or a
  /// pole collision between the two Γ families.
  void validate() const;
};

/// value = mantissa * exp(log_scale); keeps results with huge or tiny
/// magnitude representable until prefactors are applied.
struct ScaledValue {
  double mantissa = 0.0;
  double log_scale = 0.0;

  double value() const;
  /// Multiplies by exp(log_factor) and returns the plain double.
  double value_times_exp(double log_factor) const;
};

enum class MeijerGMethod { exact_zero, contour, residue };

struct MeijerGResult {
  ScaledValue value;
  double rel_error = 0.0;  // estimated relative error
  MeijerGMethod method = MeijerGMethod::contour;
  bool perturbed = false;  // residue series nudged coincident poles apart
};

/// Contour quadrature first, residue series if the contour does not reach
/// its tolerance. Throws AccuracyError (with the best estimate) if neither does.
MeijerGResult meijer_g_evaluate(const MeijerGSpec& spec, double z);

/// Plain double result of meijer_g_evaluate.
double meijer_g(const MeijerGSpec& spec, double z);

/// Mellin-Barnes contour quadrature only.
MeijerGResult meijer_g_contour(const MeijerGSpec& spec, double z);

/// Sum of residues at the poles of Γ(b_j - s), j <= m. Requires p < q, or
/// p == q with z < 1. When two of those pole families are closer than 1e-6
/// (modulo integers) the later parameter is shifted by 1e-9 and the result
/// is flagged `perturbed`.
MeijerGResult meijer_g_residue(const MeijerGSpec& spec, double z);

}  // namespace riscalc::specfun
