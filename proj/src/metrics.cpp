#include "riscalc/metrics.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "riscalc/errors.hpp"
#include "riscalc/meijer_g.hpp"
#include "riscalc/quadrature.hpp"
#include "riscalc/specfun.hpp"

namespace riscalc::metrics {

namespace {

using channel::GammaFit;

constexpr double kNegInf = -std::numeric_limits<double>::infinity();
const double kLogSqrtPi = 0.5 * std::log(std::numbers::pi);

void require_gamma_bar(double gamma_bar) {
  if (!std::isfinite(gamma_bar) || gamma_bar <= 0.0) {
    throw DomainError("gamma_bar must be finite and > 0");
  }
}

double flush_underflow(double value) { return std::abs(value) < kUnderflowFloor ? 0.0 : value; }

// Integral of exp(log_f) over [lower, inf) as (value, log_scale): the
// integrand is normalized by its maximum on the scan grid first.
struct ScaledIntegral {
  double value;
  double log_scale;
  double total() const { return value == 0.0 ? 0.0 : value * std::exp(log_scale); }
};

template <class LogF>
ScaledIntegral integrate_log_half_line(LogF log_f, double lower, double scale, const char* what) {
  double peak = kNegInf;
  for (int i = 0; i <= 20 * 16; ++i) {
    const double t = lower + scale * std::pow(10.0, -12.0 + i / 16.0);
    peak = std::max(peak, log_f(t));
  }
  if (!std::isfinite(peak)) return {0.0, 0.0};
  const auto f = [&](double t) {
    const double l = log_f(t);
    return l == kNegInf ? 0.0 : std::exp(l - peak);
  };
  const quad::Result r = quad::integrate_half_line(f, lower, scale, quad::Options{0.0, 1e-13, 8000});
  if (!r.converged) {
    throw AccuracyError(std::string(what) + ": quadrature did not converge",
                        r.abs_error / std::max(std::abs(r.value), 1e-300));
  }
  return {r.value, peak};
}

// ln of the density of t = sqrt(gamma): Gamma(a+1, s) with s = b sqrt(gamma_bar).
double log_amplitude_density(const GammaFit& fit, double s, double t) {
  if (t <= 0.0) return kNegInf;
  const double ap1 = fit.a + 1.0;
  return fit.a * std::log(t) - t / s - ap1 * std::log(s) - specfun::ln_gamma(ap1);
}

struct ConstraintTerms {
  double log_h;           // ln H(u)
  double dlog_h_dlog_u;   // d ln H / d ln u
};

// H(u) = Q(a+1,u)/u^2 - Γ(a-1,u)/Γ(a+1), the power constraint times gamma_bar b^2.
ConstraintTerms constraint_terms(double a, double u) {
  const double ap1 = a + 1.0;
  if (u >= ap1 && u >= 1.0) {
    const double s1 = specfun::detail::inc_gamma_upper_continued_fraction(ap1, u);
    const double s2 = specfun::detail::inc_gamma_upper_continued_fraction(a - 1.0, u);
    const double diff = s1 - s2;
    const double log_h = (a - 1.0) * std::log(u) - u - specfun::ln_gamma(ap1) + std::log(diff);
    return {log_h, -2.0 * s1 / diff};
  }
  const double q1 = specfun::reg_inc_gamma_upper(ap1, u);
  double tail;
  if (a > 1.0) {
    tail = specfun::reg_inc_gamma_upper(a - 1.0, u) / (a * (a - 1.0));
  } else {
    tail = specfun::upper_inc_gamma(a - 1.0, u) * std::exp(-specfun::ln_gamma(ap1));
  }
  const double h = q1 / (u * u) - tail;
  return {std::log(h), -2.0 * q1 / (u * u * h)};
}

double cutoff_to_u(const GammaFit& fit, double gamma_bar, double gamma0) {
  return std::sqrt(gamma0 / gamma_bar) / fit.b;
}

specfun::MeijerGSpec capacity_kernel(double a, int m, double b0) {
  return {m, 4, {-0.5 * a, 0.5 * (1.0 - a), 1.0, 1.0}, {b0, 0.0}};
}

double log_capacity_prefactor(double a) {
  return a * std::numbers::ln2 - std::log(std::numbers::ln2) - kLogSqrtPi -
         specfun::ln_gamma(a + 1.0);
}

std::string lower_case(std::string_view text) {
  std::string out(text);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

}  // namespace

void ModulationScheme::validate() const {
  if (!std::isfinite(p) || p <= 0.0) throw DomainError("modulation p must be > 0");
  if (!std::isfinite(q) || q <= 0.0) throw DomainError("modulation q must be > 0");
}

std::vector<ModulationScheme> modulation_catalog() {
  std::vector<ModulationScheme> out{{"bpsk", 1.0, 1.0}};
  for (int m : {4, 8, 16, 64}) {
    const double s = std::sin(std::numbers::pi / m);
    out.push_back({m == 4 ? "qpsk" : std::to_string(m) + "psk", 2.0, s * s});
  }
  for (int m : {4, 8, 16, 64}) {
    out.push_back({std::to_string(m) + "qam", 4.0 * (1.0 - 1.0 / std::sqrt(double(m))),
                   3.0 / (2.0 * (m - 1))});
  }
  return out;
}

ModulationScheme find_modulation(std::string_view name) {
  std::string key = lower_case(name);
  if (key == "4psk") key = "qpsk";
  for (auto& mod : modulation_catalog()) {
    if (mod.name == key) return mod;
  }
  throw ConfigError("unknown modulation '" + std::string(name) + "'");
}

double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }

double asep_closed_form(const GammaFit& fit, double gamma_bar, const ModulationScheme& mod) {
  fit.validate();
  mod.validate();
  require_gamma_bar(gamma_bar);
  const double a = fit.a;
  const specfun::MeijerGSpec g{2, 3, {0.5, 0.5, 1.0}, {0.5 * (a + 1.0), 0.5 * (a + 2.0), 0.0, 0.5}};
  const double z = 1.0 / (4.0 * mod.q * gamma_bar * fit.b * fit.b);
  const auto res = specfun::meijer_g_evaluate(g, z);
  const double log_pref = (a - 1.0) * std::numbers::ln2 + std::log(mod.p) -
                          std::log(std::numbers::pi) - specfun::ln_gamma(a + 1.0);
  const double value = res.value.value_times_exp(log_pref);
  if (value > 0.5 * mod.p) {
    if (value > 0.5 * mod.p * (1.0 + 1e-8)) {
      throw AccuracyError("ASEP closed form exceeds p/2", value / (0.5 * mod.p) - 1.0);
    }
    return 0.5 * mod.p;
  }
  return flush_underflow(value);
}

double asep_quadrature(const GammaFit& fit, double gamma_bar, const ModulationScheme& mod) {
  fit.validate();
  mod.validate();
  require_gamma_bar(gamma_bar);
  // gamma = t^2: (p sqrt(q)/sqrt(pi)) \int e^{-q t^2} P(a+1, t/s) dt
  const double s = fit.b * std::sqrt(gamma_bar);
  const double ap1 = fit.a + 1.0;
  const auto log_f = [&](double t) {
    if (t <= 0.0) return kNegInf;
    return specfun::log_reg_inc_gamma_lower(ap1, t / s) - mod.q * t * t;
  };
  const auto r = integrate_log_half_line(log_f, 0.0, 1.0 / std::sqrt(mod.q), "asep_quadrature");
  const double log_pref = std::log(mod.p) + 0.5 * std::log(mod.q) - kLogSqrtPi;
  if (r.value == 0.0) return 0.0;
  return flush_underflow(r.value * std::exp(r.log_scale + log_pref));
}

double capacity_no_csi(const GammaFit& fit, double gamma_bar) {
  fit.validate();
  require_gamma_bar(gamma_bar);
  const auto res = specfun::meijer_g_evaluate(capacity_kernel(fit.a, 1, 1.0),
                                              4.0 * gamma_bar * fit.b * fit.b);
  return flush_underflow(res.value.value_times_exp(log_capacity_prefactor(fit.a)));
}

double capacity_no_csi_quadrature(const GammaFit& fit, double gamma_bar) {
  fit.validate();
  require_gamma_bar(gamma_bar);
  const double s = fit.b * std::sqrt(gamma_bar);
  const auto log_f = [&](double t) {
    if (t <= 0.0) return kNegInf;
    return std::log(std::log1p(t * t)) + log_amplitude_density(fit, s, t);
  };
  const auto r = integrate_log_half_line(log_f, 0.0, s, "capacity_no_csi_quadrature");
  return flush_underflow(r.total() / std::numbers::ln2);
}

double capacity_no_csi_low_snr(const GammaFit& fit, double gamma_bar) {
  fit.validate();
  require_gamma_bar(gamma_bar);
  const double a = fit.a;
  const double log_coeff = (a + 2.0) * std::numbers::ln2 + 2.0 * std::log(fit.b) +
                           specfun::ln_gamma(0.5 * (a + 3.0)) + specfun::ln_gamma(0.5 * (a + 4.0)) -
                           std::log(std::numbers::ln2) - kLogSqrtPi - specfun::ln_gamma(a + 1.0);
  return std::exp(log_coeff) * gamma_bar;
}

double waterfilling_constraint(const GammaFit& fit, double gamma_bar, double gamma0) {
  fit.validate();
  require_gamma_bar(gamma_bar);
  if (!std::isfinite(gamma0) || gamma0 <= 0.0) throw DomainError("gamma0 must be > 0");
  const double u = cutoff_to_u(fit, gamma_bar, gamma0);
  return std::exp(constraint_terms(fit.a, u).log_h) / (gamma_bar * fit.b * fit.b);
}

double waterfilling_constraint_quadrature(const GammaFit& fit, double gamma_bar, double gamma0) {
  fit.validate();
  require_gamma_bar(gamma_bar);
  if (!std::isfinite(gamma0) || gamma0 <= 0.0) throw DomainError("gamma0 must be > 0");
  // \int_{t0}^inf (1/gamma0 - 1/t^2) f_t(t) dt with t = sqrt(gamma)
  const double s = fit.b * std::sqrt(gamma_bar);
  const double t0 = std::sqrt(gamma0);
  const auto log_f = [&](double t) {
    if (t <= t0) return kNegInf;
    const double weight = (t - t0) * (t + t0) / (gamma0 * t * t);
    return std::log(weight) + log_amplitude_density(fit, s, t);
  };
  return integrate_log_half_line(log_f, t0, s, "waterfilling_constraint_quadrature").total();
}

CutoffResult waterfilling_cutoff(const GammaFit& fit, double gamma_bar) {
  fit.validate();
  require_gamma_bar(gamma_bar);
  const double log_target = std::log(gamma_bar * fit.b * fit.b);
  const auto eval = [&](double log_u) {
    const auto terms = constraint_terms(fit.a, std::exp(log_u));
    return std::pair{terms.log_h - log_target, terms.dlog_h_dlog_u};
  };
  // gamma0 in [1e-12, 1e12] gamma_bar  <=>  u in [1e-6, 1e6] / b
  double lo = std::log(1e-6 / fit.b);
  double hi = std::log(1e6 / fit.b);
  const double f_lo = eval(lo).first;
  const double f_hi = eval(hi).first;
  if (!(f_lo > 0.0 && f_hi < 0.0)) {
    throw SolverError("water-filling cutoff not bracketed in [1e-12, 1e12] * gamma_bar");
  }
  double x = 0.5 * (lo + hi);
  int iterations = 0;
  double f = 0.0;
  for (; iterations < 400; ++iterations) {
    const auto [fx, dfx] = eval(x);
    f = fx;
    if (std::abs(f) < 1e-15) break;
    if (f > 0.0) lo = x; else hi = x;
    double next = x - f / dfx;
    if (!std::isfinite(next) || next <= lo || next >= hi || hi - lo > 1.0) next = 0.5 * (lo + hi);
    if (std::abs(next - x) <= 1e-16 * std::max(1.0, std::abs(x))) {
      x = next;
      f = eval(x).first;
      ++iterations;
      break;
    }
    x = next;
  }
  const double u = std::exp(x);
  CutoffResult out;
  out.gamma0 = gamma_bar * fit.b * fit.b * u * u;
  out.residual = std::abs(std::expm1(f));
  out.iterations = iterations;
  if (!(out.residual <= 1e-10)) {
    throw SolverError("water-filling cutoff residual " + std::to_string(out.residual));
  }
  return out;
}

double capacity_csi_with_argument(const GammaFit& fit, double g_argument) {
  fit.validate();
  if (!std::isfinite(g_argument) || g_argument <= 0.0) {
    throw DomainError("G-function argument must be > 0");
  }
  const auto res = specfun::meijer_g_evaluate(capacity_kernel(fit.a, 0, 0.0), g_argument);
  return flush_underflow(res.value.value_times_exp(log_capacity_prefactor(fit.a)));
}

double capacity_csi_at_cutoff(const GammaFit& fit, double gamma_bar, double gamma0) {
  require_gamma_bar(gamma_bar);
  if (!std::isfinite(gamma0) || gamma0 <= 0.0) throw DomainError("gamma0 must be > 0");
  return capacity_csi_with_argument(fit, 4.0 * gamma_bar * fit.b * fit.b / gamma0);
}

double capacity_csi(const GammaFit& fit, double gamma_bar) {
  const CutoffResult cut = waterfilling_cutoff(fit, gamma_bar);
  return capacity_csi_at_cutoff(fit, gamma_bar, cut.gamma0);
}

double capacity_csi_quadrature(const GammaFit& fit, double gamma_bar, double gamma0) {
  fit.validate();
  require_gamma_bar(gamma_bar);
  if (!std::isfinite(gamma0) || gamma0 <= 0.0) throw DomainError("gamma0 must be > 0");
  // (1/ln2) \int_{t0}^inf 2 ln(t/t0) f_t(t) dt with t = sqrt(gamma)
  const double s = fit.b * std::sqrt(gamma_bar);
  const double t0 = std::sqrt(gamma0);
  const auto log_f = [&](double t) {
    if (t <= t0) return kNegInf;
    return std::log(2.0 * std::log1p((t - t0) / t0)) + log_amplitude_density(fit, s, t);
  };
  const auto r = integrate_log_half_line(log_f, t0, s, "capacity_csi_quadrature");
  return flush_underflow(r.total() / std::numbers::ln2);
}

CapacityPoint evaluate_capacity(const GammaFit& fit, double gamma_bar_db, CapacityMode mode,
                                Method method) {
  const double gamma_bar = db_to_linear(gamma_bar_db);
  CapacityPoint point{gamma_bar_db, 0.0, mode, method};
  switch (mode) {
    case CapacityMode::without_csi:
      point.value_bits = method == Method::closed_form ? capacity_no_csi(fit, gamma_bar)
                                                       : capacity_no_csi_quadrature(fit, gamma_bar);
      break;
    case CapacityMode::with_csi: {
      const CutoffResult cut = waterfilling_cutoff(fit, gamma_bar);
      point.value_bits = method == Method::closed_form
                             ? capacity_csi_at_cutoff(fit, gamma_bar, cut.gamma0)
                             : capacity_csi_quadrature(fit, gamma_bar, cut.gamma0);
      break;
    }
    case CapacityMode::low_snr_asymptote:
      if (method != Method::closed_form) {
        throw UnsupportedParameters("the low-SNR asymptote has no quadrature form");
      }
      point.value_bits = capacity_no_csi_low_snr(fit, gamma_bar);
      break;
  }
  return point;
}

}  // namespace riscalc::metrics
