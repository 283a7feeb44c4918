#include "riscalc/meijer_g.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <numbers>
#include <string>

#include "riscalc/errors.hpp"
#include "riscalc/quadrature.hpp"
#include "riscalc/specfun.hpp"

namespace riscalc::specfun {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kEps = std::numeric_limits<double>::epsilon();
constexpr double kAcceptRelError = 1e-9;

bool near_integer(double x, double tol) { return std::abs(x - std::nearbyint(x)) < tol; }

// ln|Γ(x)| with sign; a pole yields +inf with sign 0 so callers can decide.
double log_abs_gamma_or_pole(double x, int& sign) {
  if (x <= 0.0 && x == std::nearbyint(x)) {
    sign = 0;
    return kInf;
  }
  return ln_abs_gamma(x, sign);
}

// Real-axis log|integrand| without z^s; -inf where a denominator Γ has a pole.
double log_abs_kernel(const MeijerGSpec& g, double s, int& sign) {
  double total = 0.0;
  sign = 1;
  int sg = 0;
  auto numerator = [&](double x) {
    total += log_abs_gamma_or_pole(x, sg);
    sign *= sg == 0 ? 1 : sg;
  };
  auto denominator = [&](double x) {
    const double v = log_abs_gamma_or_pole(x, sg);
    if (sg == 0) {
      total = -kInf;
    } else {
      total -= v;
      sign *= sg;
    }
  };
  for (int j = 0; j < g.m; ++j) numerator(g.b[j] - s);
  for (int i = 0; i < g.n; ++i) numerator(1.0 - g.a[i] + s);
  for (int j = g.m; j < g.q(); ++j) denominator(1.0 - g.b[j] + s);
  for (int i = g.n; i < g.p(); ++i) denominator(g.a[i] - s);
  return total;
}

std::complex<double> log_kernel(const MeijerGSpec& g, std::complex<double> s) {
  std::complex<double> total(0.0, 0.0);
  for (int j = 0; j < g.m; ++j) total += ln_gamma(g.b[j] - s);
  for (int i = 0; i < g.n; ++i) total += ln_gamma(1.0 - g.a[i] + s);
  for (int j = g.m; j < g.q(); ++j) total -= ln_gamma(1.0 - g.b[j] + s);
  for (int i = g.n; i < g.p(); ++i) total -= ln_gamma(g.a[i] - s);
  return total;
}

struct Strip {
  double lo = -kInf;  // rightmost pole of the Γ(1 - a_i + s) family
  double hi = kInf;   // leftmost pole of the Γ(b_j - s) family
};

Strip separating_strip(const MeijerGSpec& g) {
  Strip strip;
  for (int i = 0; i < g.n; ++i) strip.lo = std::max(strip.lo, g.a[i] - 1.0);
  for (int j = 0; j < g.m; ++j) strip.hi = std::min(strip.hi, g.b[j]);
  if (!(strip.lo < strip.hi)) {
    throw UnsupportedParameters("meijer_g: no vertical contour separates the pole families");
  }
  return strip;
}

// Minimizes c -> ln|kernel(c)| + c ln z over the open strip by a scan followed
// by golden-section refinement. Points where the kernel vanishes are skipped.
double saddle_abscissa(const MeijerGSpec& g, const Strip& strip, double log_z) {
  auto objective = [&](double c) {
    int sign = 0;
    const double v = log_abs_kernel(g, c, sign);
    return std::isfinite(v) ? v + c * log_z : kInf;
  };
  // u -> c maps a bounded parameter onto the strip.
  auto to_c = [&](double u) {
    if (std::isfinite(strip.lo) && std::isfinite(strip.hi)) {
      return strip.lo + (strip.hi - strip.lo) * u;
    }
    if (std::isfinite(strip.lo)) return strip.lo + std::exp(u);
    if (std::isfinite(strip.hi)) return strip.hi - std::exp(u);
    return u;
  };
  std::vector<double> grid;
  if (std::isfinite(strip.lo) && std::isfinite(strip.hi)) {
    for (double e : {1e-8, 1e-6, 1e-4, 1e-3, 1e-2}) {
      grid.push_back(e);
      grid.push_back(1.0 - e);
    }
    constexpr int kScan = 96;
    for (int k = 0; k < kScan; ++k) grid.push_back((k + 0.5) / kScan);
  } else if (std::isfinite(strip.lo) || std::isfinite(strip.hi)) {
    for (double u = -18.0; u <= 9.0; u += 0.25) grid.push_back(u);
  } else {
    for (double u = -300.0; u <= 300.0; u += 1.0) grid.push_back(u);
  }
  std::sort(grid.begin(), grid.end());
  std::size_t best = grid.size();
  double best_value = kInf;
  for (std::size_t k = 0; k < grid.size(); ++k) {
    const double v = objective(to_c(grid[k]));
    if (v < best_value) {
      best_value = v;
      best = k;
    }
  }
  if (best == grid.size()) {
    throw UnsupportedParameters("meijer_g: integrand vanishes along the real axis of the strip");
  }
  double lo = grid[best == 0 ? 0 : best - 1];
  double hi = grid[std::min(best + 1, grid.size() - 1)];
  if (best == 0) lo = grid[0];
  // Golden-section search on u.
  const double invphi = 0.5 * (std::sqrt(5.0) - 1.0);
  double x1 = hi - invphi * (hi - lo);
  double x2 = lo + invphi * (hi - lo);
  double f1 = objective(to_c(x1));
  double f2 = objective(to_c(x2));
  for (int it = 0; it < 80 && (hi - lo) > 1e-12 * (1.0 + std::abs(lo)); ++it) {
    if (f1 < f2) {
      hi = x2;
      x2 = x1;
      f2 = f1;
      x1 = hi - invphi * (hi - lo);
      f1 = objective(to_c(x1));
    } else {
      lo = x1;
      x1 = x2;
      f1 = f2;
      x2 = lo + invphi * (hi - lo);
      f2 = objective(to_c(x2));
    }
  }
  const double u = f1 < f2 ? x1 : x2;
  const double u_best = std::min(f1, f2) <= best_value ? u : grid[best];
  return to_c(u_best);
}

// Distance from c to the nearest pole of either family.
double nearest_pole_distance(const MeijerGSpec& g, double c) {
  double d = kInf;
  for (int j = 0; j < g.m; ++j) {
    if (g.b[j] >= c) d = std::min(d, g.b[j] - c);
  }
  for (int i = 0; i < g.n; ++i) {
    if (g.a[i] - 1.0 <= c) d = std::min(d, c - (g.a[i] - 1.0));
  }
  return d;
}

// The integral is identically zero when the contour can be pushed off to the
// side with no poles and the integrand vanishes on the closing arc.
bool vanishes_identically(const MeijerGSpec& g, double z) {
  if (g.m == 0 && (g.p() < g.q() || (g.p() == g.q() && z < 1.0))) return true;
  if (g.n == 0 && (g.p() > g.q() || (g.p() == g.q() && z > 1.0))) return true;
  return false;
}

void validate_argument(double z) {
  if (!std::isfinite(z) || z <= 0.0) throw DomainError("meijer_g: argument must be positive");
}

}  // namespace

void MeijerGSpec::validate() const {
  if (m < 0 || n < 0 || m > q() || n > p()) {
    throw UnsupportedParameters("meijer_g: require 0 <= m <= q and 0 <= n <= p");
  }
  for (double v : a) {
    if (!std::isfinite(v)) throw UnsupportedParameters("meijer_g: non-finite parameter");
  }
  for (double v : b) {
    if (!std::isfinite(v)) throw UnsupportedParameters("meijer_g: non-finite parameter");
  }
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < m; ++j) {
      const double d = a[i] - b[j];
      if (near_integer(d, 1e-12) && std::nearbyint(d) >= 1.0) {
        throw UnsupportedParameters("meijer_g: pole collision between a_" + std::to_string(i + 1) +
                                    " and b_" + std::to_string(j + 1));
      }
    }
  }
}

double ScaledValue::value() const {
  if (mantissa == 0.0) return 0.0;
  return mantissa * std::exp(log_scale);
}

double ScaledValue::value_times_exp(double log_factor) const {
  if (mantissa == 0.0) return 0.0;
  return mantissa * std::exp(log_scale + log_factor);
}

MeijerGResult meijer_g_contour(const MeijerGSpec& g, double z) {
  g.validate();
  validate_argument(z);
  if (vanishes_identically(g, z)) return {{0.0, 0.0}, 0.0, MeijerGMethod::exact_zero, false};

  const Strip strip = separating_strip(g);
  const double log_z = std::log(z);
  const double c = saddle_abscissa(g, strip, log_z);
  int sign = 0;
  const double log_peak = log_abs_kernel(g, c, sign) + c * log_z;

  // Along a vertical line the integrand decays like exp(-c* pi |t|). When
  // c* <= 0 the tails bend toward +Re s if the Γ quotient decays there
  // (p < q), toward -Re s if p > q; for p == q the z^s factor decides.
  const double c_star = g.m + g.n - 0.5 * (g.p() + g.q());
  double bend = 0.0;
  if (c_star > 0.0) {
    bend = 0.0;
  } else if (g.p() < g.q()) {
    bend = 1.0;
  } else if (g.p() > g.q()) {
    bend = -1.0;
  } else if (z != 1.0) {
    bend = z < 1.0 ? 1.0 : -1.0;
  }
  const double knee = 1.0;

  auto path = [&](double t) {
    const double r = std::sqrt(t * t + knee * knee);
    return std::complex<double>(c + bend * (r - knee), t);
  };
  auto integrand_log = [&](double t) {
    const auto s = path(t);
    return log_kernel(g, s) + s * log_z - log_peak;
  };
  auto integrand = [&](double t) {
    const double r = std::sqrt(t * t + knee * knee);
    // ds/(i dt) = 1 - i bend t / r
    const std::complex<double> jac(1.0, -bend * t / r);
    const auto w = integrand_log(t);
    if (w.real() < -745.0) return 0.0;
    return (std::exp(w) * jac).real() / std::numbers::pi;
  };

  // Breakpoints grow geometrically from a width set by the nearest pole
  // until the envelope has fallen by 1e-22.
  const double first = std::min(1.0, 0.5 * nearest_pole_distance(g, c));
  std::vector<double> bp = {0.0};
  double envelope_max = 1.0;
  double t = first;
  constexpr double kTMax = 1e7;
  for (;;) {
    bp.push_back(t);
    const double env = std::exp(integrand_log(t).real());
    envelope_max = std::max(envelope_max, env);
    if (env < 1e-22 * envelope_max && t > 4.0 * first) break;
    if (t > kTMax) {
      throw AccuracyError("meijer_g: contour integrand does not decay", env / envelope_max);
    }
    t *= 2.0;
  }

  quad::Options opt;
  opt.rel_tol = 1e-13;
  opt.max_intervals = 20000;
  const auto r = quad::integrate(integrand, std::span<const double>(bp), opt);
  const double magnitude = std::abs(r.value);
  double rel_error;
  if (magnitude > 0.0) {
    rel_error = std::max(r.abs_error, 1e-15 * r.abs_integral) / magnitude;
  } else {
    rel_error = r.abs_integral > 0.0 ? kInf : 0.0;
  }
  return {{r.value, log_peak}, rel_error, MeijerGMethod::contour, false};
}

MeijerGResult meijer_g_residue(const MeijerGSpec& spec, double z) {
  spec.validate();
  validate_argument(z);
  if (spec.m == 0) return {{0.0, 0.0}, 0.0, MeijerGMethod::exact_zero, false};
  if (spec.p() > spec.q() || (spec.p() == spec.q() && z >= 1.0)) {
    throw UnsupportedParameters("meijer_g_residue: right-pole series diverges for these p, q, z");
  }

  MeijerGSpec g = spec;
  bool perturbed = false;
  for (int j = 1; j < g.m; ++j) {
    for (int h = 0; h < j; ++h) {
      if (near_integer(g.b[j] - g.b[h], 1e-6)) {
        g.b[j] += 1e-9;
        perturbed = true;
      }
    }
  }

  struct Term {
    double log_abs;
    int sign;
    double weight;  // rough size of the accumulated lgamma rounding in this term
  };
  std::vector<Term> terms;
  const double log_z = std::log(z);
  double max_log = -kInf;
  constexpr int kMaxTerms = 20000;

  for (int h = 0; h < g.m; ++h) {
    double previous = kInf;
    int k = 0;
    for (; k < kMaxTerms; ++k) {
      const double s = g.b[h] + k;
      double total = s * log_z - ln_gamma(k + 1.0);
      double weight = std::abs(s * log_z) + std::abs(ln_gamma(k + 1.0));
      int sign = (k % 2 == 0) ? 1 : -1;
      bool zero = false;
      int sg = 0;
      for (int j = 0; j < g.m; ++j) {
        if (j == h) continue;
        const double v = log_abs_gamma_or_pole(g.b[j] - s, sg);
        if (sg == 0) throw UnsupportedParameters("meijer_g_residue: coincident right poles");
        total += v;
        weight += std::abs(v);
        sign *= sg;
      }
      for (int i = 0; i < g.n; ++i) {
        const double v = log_abs_gamma_or_pole(1.0 - g.a[i] + s, sg);
        if (sg == 0) throw UnsupportedParameters("meijer_g_residue: pole collision");
        total += v;
        weight += std::abs(v);
        sign *= sg;
      }
      for (int j = g.m; j < g.q(); ++j) {
        const double v = log_abs_gamma_or_pole(1.0 - g.b[j] + s, sg);
        if (sg == 0) {
          zero = true;
        } else {
          total -= v;
          weight += std::abs(v);
          sign *= sg;
        }
      }
      for (int i = g.n; i < g.p(); ++i) {
        const double v = log_abs_gamma_or_pole(g.a[i] - s, sg);
        if (sg == 0) {
          zero = true;
        } else {
          total -= v;
          weight += std::abs(v);
          sign *= sg;
        }
      }
      if (!zero) {
        terms.push_back({total, sign, weight});
        max_log = std::max(max_log, total);
        if (k > 8 && total < previous && total < max_log - 42.0) break;
        previous = total;
      }
    }
    if (k == kMaxTerms) throw AccuracyError("meijer_g_residue: series did not converge", kInf);
  }

  double sum = 0.0, comp = 0.0, abs_sum = 0.0, err = 0.0;
  for (const auto& term : terms) {
    const double v = term.sign * std::exp(term.log_abs - max_log);
    const double t = sum + v;
    comp += std::abs(sum) >= std::abs(v) ? (sum - t) + v : (v - t) + sum;
    sum = t;
    abs_sum += std::abs(v);
    err += std::abs(v) * kEps * (8.0 + term.weight);
  }
  sum += comp;
  const double rel_error = sum != 0.0 ? (err + kEps * abs_sum) / std::abs(sum) : kInf;
  return {{sum, max_log}, rel_error, MeijerGMethod::residue, perturbed};
}

MeijerGResult meijer_g_evaluate(const MeijerGSpec& g, double z) {
  MeijerGResult best;
  bool have = false;
  try {
    best = meijer_g_contour(g, z);
    have = true;
    if (best.rel_error <= kAcceptRelError) return best;
  } catch (const AccuracyError&) {
  }
  const bool residue_applies = g.m > 0 && (g.p() < g.q() || (g.p() == g.q() && z < 1.0));
  if (residue_applies) {
    try {
      auto alt = meijer_g_residue(g, z);
      if (!have || alt.rel_error < best.rel_error) {
        best = alt;
        have = true;
      }
    } catch (const AccuracyError&) {
    } catch (const UnsupportedParameters&) {
    }
  }
  if (!have || best.rel_error > kAcceptRelError) {
    throw AccuracyError("meijer_g: no evaluation route met tolerance",
                        have ? best.rel_error : kInf);
  }
  return best;
}

double meijer_g(const MeijerGSpec& spec, double z) { return meijer_g_evaluate(spec, z).value.value(); }

}  // namespace riscalc::specfun
