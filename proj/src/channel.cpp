#include "riscalc/channel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <vector>

#include "riscalc/errors.hpp"
#include "riscalc/quadrature.hpp"
#include "riscalc/specfun.hpp"

namespace riscalc::channel {

namespace {

bool finite_positive(double x) { return std::isfinite(x) && x > 0.0; }

void require_positive(double x, const char* what) {
  if (!finite_positive(x)) throw DomainError(std::string(what) + " must be finite and > 0");
}

// ln of the Rician density, finite wherever the density is representable.
double log_rician_pdf(const RicianHop& hop, double r) {
  const double two_sigma2 = hop.diffuse_power();
  const double v = std::sqrt(hop.los_power());
  const double sigma2 = 0.5 * two_sigma2;
  const double arg = r * v / sigma2;
  // I0(arg) e^{-(r^2+v^2)/(2 sigma^2)} = I0e(arg) e^{-(r-v)^2/(2 sigma^2)}
  return std::log(r / sigma2) - (r - v) * (r - v) / two_sigma2 +
         std::log(specfun::bessel_i_scaled(0, arg));
}

}  // namespace

void RicianHop::validate() const {
  if (!std::isfinite(K) || K < 0.0) throw DomainError("K must be finite and >= 0");
  require_positive(Omega, "Omega");
}

double RicianHop::los_power() const { return K * Omega / (K + 1.0); }

double RicianHop::diffuse_power() const { return Omega / (K + 1.0); }

kernels::HopSplit RicianHop::split() const {
  return {std::sqrt(los_power()), std::sqrt(0.5 * diffuse_power())};
}

void LinkModel::validate() const {
  hop1.validate();
  hop2.validate();
  if (n_elements < 1) throw DomainError("N must be >= 1");
}

LinkModel LinkModel::symmetric(double K, int n, double omega) {
  return {{K, omega}, {K, omega}, n};
}

void GammaFit::validate() const {
  if (!std::isfinite(a) || a <= -1.0) throw DomainError("fit shape a must be > -1");
  require_positive(b, "fit scale b");
}

double rician_mean_amplitude(const RicianHop& hop) {
  hop.validate();
  return 0.5 * std::sqrt(std::numbers::pi * hop.Omega / (hop.K + 1.0)) *
         specfun::laguerre_half(-hop.K);
}

double rician_pdf(const RicianHop& hop, double r) {
  hop.validate();
  if (!std::isfinite(r)) throw DomainError("r must be finite");
  if (r <= 0.0) return 0.0;
  return std::exp(log_rician_pdf(hop, r));
}

CascadedMoments cascaded_moments(const LinkModel& link) {
  link.validate();
  const double mean = rician_mean_amplitude(link.hop1) * rician_mean_amplitude(link.hop2);
  const double second = link.hop1.Omega * link.hop2.Omega;
  return {mean, second - mean * mean};
}

GammaFit gamma_fit(const LinkModel& link) {
  const CascadedMoments m = cascaded_moments(link);
  const double n = link.n_elements;
  GammaFit fit;
  fit.mean_xi = n * m.mean;
  fit.var_xi = n * m.variance;
  fit.a = fit.mean_xi * fit.mean_xi / fit.var_xi - 1.0;
  fit.b = fit.var_xi / fit.mean_xi;
  fit.validate();
  return fit;
}

double fit_xi_pdf(const GammaFit& fit, double y) {
  fit.validate();
  if (!std::isfinite(y) || y < 0.0) throw DomainError("y must be finite and >= 0");
  if (y == 0.0) {
    if (fit.a > 0.0) return 0.0;
    if (fit.a == 0.0) return 1.0 / fit.b;
    return std::numeric_limits<double>::infinity();
  }
  const double ap1 = fit.a + 1.0;
  return std::exp(fit.a * std::log(y) - y / fit.b - ap1 * std::log(fit.b) -
                  specfun::ln_gamma(ap1));
}

double fit_xi_cdf(const GammaFit& fit, double y) {
  fit.validate();
  if (!std::isfinite(y) || y < 0.0) throw DomainError("y must be finite and >= 0");
  return specfun::reg_inc_gamma_lower(fit.a + 1.0, y / fit.b);
}

double snr_pdf(const GammaFit& fit, double gamma_bar, double g) {
  fit.validate();
  require_positive(gamma_bar, "gamma_bar");
  require_positive(g, "g");
  const double ap1 = fit.a + 1.0;
  const double log_value = 0.5 * (fit.a - 1.0) * std::log(g) -
                           std::sqrt(g) / (fit.b * std::sqrt(gamma_bar)) -
                           std::numbers::ln2 - ap1 * std::log(fit.b) - specfun::ln_gamma(ap1) -
                           0.5 * ap1 * std::log(gamma_bar);
  return std::exp(log_value);
}

double snr_cdf(const GammaFit& fit, double gamma_bar, double g) {
  fit.validate();
  require_positive(gamma_bar, "gamma_bar");
  if (!std::isfinite(g) || g < 0.0) throw DomainError("g must be finite and >= 0");
  return specfun::reg_inc_gamma_lower(fit.a + 1.0, std::sqrt(g) / (fit.b * std::sqrt(gamma_bar)));
}

double sample_cascaded_amplitude(const LinkModel& link, rng::CounterStream& stream) {
  link.validate();
  const kernels::HopSplit h1 = link.hop1.split();
  const kernels::HopSplit h2 = link.hop2.split();
  double xi = 0.0;
  for (int l = 0; l < link.n_elements; ++l) {
    const auto z = stream.next_normal_block();
    const double re1 = h1.los + h1.sigma * z[0];
    const double im1 = h1.sigma * z[1];
    const double re2 = h2.los + h2.sigma * z[2];
    const double im2 = h2.sigma * z[3];
    xi = xi + std::sqrt(re1 * re1 + im1 * im1) * std::sqrt(re2 * re2 + im2 * im2);
  }
  return xi;
}

double exact_product_pdf(const LinkModel& link, double y) {
  link.validate();
  require_positive(y, "y");
  // f(y) = \int f_alpha(e^u) f_beta(y e^{-u}) du over u = ln x.
  const auto log_integrand = [&](double u) {
    const double x = std::exp(u);
    const double w = y / x;
    if (x == 0.0 || w == 0.0 || !std::isfinite(x) || !std::isfinite(w)) {
      return -std::numeric_limits<double>::infinity();
    }
    return log_rician_pdf(link.hop1, x) + log_rician_pdf(link.hop2, w);
  };
  const auto reach = [](const RicianHop& hop) {
    return std::sqrt(hop.los_power()) + 40.0 * std::sqrt(hop.diffuse_power());
  };
  const double u_hi = std::log(reach(link.hop1));
  const double u_lo = std::log(y) - std::log(reach(link.hop2));
  if (!(u_lo < u_hi)) return 0.0;

  constexpr int kScan = 400;
  std::vector<double> grid(kScan + 1);
  std::vector<double> logs(kScan + 1);
  double peak = -std::numeric_limits<double>::infinity();
  for (int i = 0; i <= kScan; ++i) {
    grid[i] = u_lo + (u_hi - u_lo) * i / kScan;
    logs[i] = log_integrand(grid[i]);
    peak = std::max(peak, logs[i]);
  }
  if (!std::isfinite(peak)) return 0.0;
  int first = 0;
  int last = kScan;
  const double cut = peak - std::log(1e25);
  while (first < kScan && logs[first] < cut) ++first;
  while (last > 0 && logs[last] < cut) --last;
  first = std::max(first - 1, 0);
  last = std::min(last + 1, kScan);
  std::vector<double> breaks;
  for (int i = first; i <= last; i += 8) breaks.push_back(grid[i]);
  if (breaks.back() != grid[last]) breaks.push_back(grid[last]);
  if (breaks.size() < 2) breaks = {grid[first], grid[std::min(first + 1, kScan)]};

  const auto integrand = [&](double u) { return std::exp(log_integrand(u) - peak); };
  const quad::Result r = quad::integrate(integrand, std::span<const double>(breaks),
                                         quad::Options{0.0, 1e-13, 4000});
  if (!r.converged) throw AccuracyError("product density quadrature did not converge",
                                        r.abs_error / std::max(std::abs(r.value), 1e-300));
  return r.value * std::exp(peak);
}

double printed_series_pdf(const LinkModel& link, double y) {
  link.validate();
  require_positive(y, "y");
  const double k1 = link.hop1.K;
  const double k2 = link.hop2.K;
  const double omega = link.hop1.Omega * link.hop2.Omega;
  const double x = 2.0 * y * std::sqrt(omega);
  const auto log_power = [](double base, int e) {
    if (e == 0) return 0.0;
    return base > 0.0 ? e * std::log(base) : -std::numeric_limits<double>::infinity();
  };
  constexpr int kCap = 60;
  constexpr double kStop = 1e-14;
  double total = 0.0;
  for (int j = 0; j < kCap; ++j) {
    double row = 0.0;
    for (int i = 0; i < kCap; ++i) {
      const double bessel = specfun::bessel_k(static_cast<double>(j - i), x);
      if (!std::isfinite(bessel)) break;
      const double log_term = (i + j + 1) * std::log(y) + std::log(4.0) + log_power(k2, i) +
                              log_power(k1, j) + 0.5 * (i + j + 2) * std::log(omega) -
                              2.0 * specfun::ln_gamma(i + 1.0) -
                              2.0 * specfun::ln_gamma(j + 1.0) - k1 * k2;
      const double term = std::exp(log_term) * bessel;
      row += term;
      if (i > 0 && std::abs(term) < kStop * std::abs(total + row)) break;
    }
    total += row;
    if (j > 0 && std::abs(row) < kStop * std::abs(total)) break;
  }
  return total;
}

}  // namespace riscalc::channel
