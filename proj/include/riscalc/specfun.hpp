#pragma once

// Scalar special functions used by the channel model and the closed-form
// metrics. All functions are pure and reentrant.

#include <complex>

namespace riscalc::specfun {

/// ln Γ(x) for x > 0.
double ln_gamma(double x);

/// ln |Γ(x)| for any real x that is not a non-positive integer; `sign`
/// receives the sign of Γ(x).
double ln_abs_gamma(double x, int& sign);

/// ln Γ(z) for complex z away from the poles. The imaginary part is only
/// determined modulo 2π, which is all that exp(ln Γ) needs.
std::complex<double> ln_gamma(std::complex<double> z);

/// Regularized lower incomplete gamma P(s, x) = γ(s, x) / Γ(s).
double reg_inc_gamma_lower(double s, double x);

/// Regularized upper incomplete gamma Q(s, x) = 1 - P(s, x), computed
/// without cancellation in the upper tail.
double reg_inc_gamma_upper(double s, double x);

/// ln P(s, x); stays finite when P underflows.
double log_reg_inc_gamma_lower(double s, double x);

/// Unregularized upper incomplete gamma Γ(s, x) for any real s and x > 0.
double upper_inc_gamma(double s, double x);

/// Modified Bessel function of the first kind, order 0 or 1.
double bessel_i(int order, double x);

/// e^{-|x|} I_order(x), finite for all finite x.
double bessel_i_scaled(int order, double x);

/// Modified Bessel function of the second kind, real order, x > 0.
double bessel_k(double order, double x);

/// Laguerre function L_{1/2}(x) = e^{x/2}[(1-x) I0(-x/2) - x I1(-x/2)].
double laguerre_half(double x);

/// Gaussian tail probability Q(x) = erfc(x / sqrt 2) / 2.
double gaussian_q(double x);

namespace detail {
// The two evaluation routes for the incomplete gamma, exposed so they can be
// checked against each other where both converge.
double inc_gamma_lower_series(double s, double x);
double inc_gamma_upper_continued_fraction(double s, double x);
}  // namespace detail

}  // namespace riscalc::specfun
