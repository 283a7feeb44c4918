#pragma once

// Statistical model of the RIS-assisted link: two Rician hops per element,
// the cascaded amplitude xi = sum_l alpha_l beta_l, its Gamma fit and the
// resulting end-to-end SNR distribution gamma = gamma_bar * xi^2.

#include "riscalc/kernels/cascade.hpp"
#include "riscalc/rng.hpp"

namespace riscalc::channel {

struct RicianHop {
  double K = 0.0;      // v^2 / (2 sigma^2)
  double Omega = 1.0;  // E[amplitude^2] = v^2 + 2 sigma^2

  void validate() const;
  double los_power() const;      // v^2
  double diffuse_power() const;  // 2 sigma^2
  /// LoS amplitude v and per-component deviation sigma.
  kernels::HopSplit split() const;
};

struct LinkModel {
  RicianHop hop1;
  RicianHop hop2;
  int n_elements = 1;

  void validate() const;
  /// K1 = K2 = K, Omega1 = Omega2 = omega.
  static LinkModel symmetric(double K, int n, double omega = 1.0);
};

struct CascadedMoments {
  double mean = 0.0;      // E[xi_l]
  double variance = 0.0;  // Var(xi_l)
};

struct GammaFit {
  double a = 0.0;
  double b = 1.0;
  double mean_xi = 0.0;
  double var_xi = 0.0;

  void validate() const;
};

/// E[alpha] = (1/2) sqrt(pi Omega / (K+1)) L_{1/2}(-K).
double rician_mean_amplitude(const RicianHop& hop);

/// Rician amplitude density.
double rician_pdf(const RicianHop& hop, double r);

CascadedMoments cascaded_moments(const LinkModel& link);

/// Gamma(a+1, b) fit matched to E[xi] and Var(xi) of the N-element sum.
GammaFit gamma_fit(const LinkModel& link);

/// Density and CDF of the fitted xi.
double fit_xi_pdf(const GammaFit& fit, double y);
double fit_xi_cdf(const GammaFit& fit, double y);

/// Density and CDF of gamma = gamma_bar xi^2 under the fit.
double snr_pdf(const GammaFit& fit, double gamma_bar, double g);
double snr_cdf(const GammaFit& fit, double gamma_bar, double g);

/// One draw of xi; consumes one normal block per element.
double sample_cascaded_amplitude(const LinkModel& link, rng::CounterStream& stream);

/// Density of the single-element product alpha * beta by numerical
/// convolution. Throws AccuracyError if the quadrature does not converge.
double exact_product_pdf(const LinkModel& link, double y);

/// Truncated double series for the product density in the published form,
/// indices starting at zero. Qualitative comparison only.
double printed_series_pdf(const LinkModel& link, double y);

}  // namespace riscalc::channel
