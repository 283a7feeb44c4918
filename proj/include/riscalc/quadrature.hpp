#pragma once

// Globally adaptive Gauss-Kronrod (G10/K21) quadrature plus helpers for
// peaked integrands on half-lines. Used both inside the Meijer-G contour
// evaluator and by the quadrature twins of every closed form.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <limits>
#include <queue>
#include <span>
#include <vector>

#include "riscalc/errors.hpp"

namespace riscalc::quad {

struct Options {
  double abs_tol = 0.0;
  double rel_tol = 1e-12;
  std::size_t max_intervals = 4000;
};

struct Result {
  double value = 0.0;
  double abs_error = 0.0;
  double abs_integral = 0.0;  // integral of |f|, for conditioning estimates
  std::size_t evaluations = 0;
  bool converged = false;
};

namespace detail {

inline constexpr std::array<double, 11> kKronrodNodes = {
    0.995657163025808080735527280689003, 0.973906528517171720077964012084452,
    0.930157491355708226001207180059508, 0.865063366688984510732096688423493,
    0.780817726586416897063717578345042, 0.679409568299024406234327365114874,
    0.562757134668604683339000099272694, 0.433395394129247190799265943165784,
    0.294392862701460198131126603103866, 0.148874338981631210884826001129720,
    0.000000000000000000000000000000000};
inline constexpr std::array<double, 11> kKronrodWeights = {
    0.011694638867371874278064396062192, 0.032558162307964727478818972459390,
    0.054755896574351996031381300244580, 0.075039674810919952767043140916190,
    0.093125454583697605535065465083366, 0.109387158802297641899210590325805,
    0.123491976262065851077600525582085, 0.134709217311473325928054001771707,
    0.142775938577060080797094273138717, 0.147739104901338491374841515972068,
    0.149445554002916905664936468389821};
// Gauss weights for the odd-indexed Kronrod nodes (1, 3, ..., 9).
inline constexpr std::array<double, 5> kGaussWeights = {
    0.066671344308688137593568809893332, 0.149451349150580593145776339657697,
    0.219086362515982043995534934228163, 0.269266719309996355091226921569469,
    0.295524224714752870173892994651338};

struct Segment {
  double lo, hi, value, error, abs_value;
  bool operator<(const Segment& other) const { return error < other.error; }
};

template <class F>
Segment gauss_kronrod(F& f, double lo, double hi) {
  const double center = 0.5 * (lo + hi);
  const double half = 0.5 * (hi - lo);
  const double fc = f(center);
  double kronrod = fc * kKronrodWeights[10];
  double gauss = 0.0;
  double abs_sum = std::abs(fc) * kKronrodWeights[10];
  for (std::size_t i = 0; i < 10; ++i) {
    const double dx = half * kKronrodNodes[i];
    const double f1 = f(center - dx);
    const double f2 = f(center + dx);
    kronrod += kKronrodWeights[i] * (f1 + f2);
    abs_sum += kKronrodWeights[i] * (std::abs(f1) + std::abs(f2));
    if (i % 2 == 1) gauss += kGaussWeights[i / 2] * (f1 + f2);
  }
  kronrod *= half;
  gauss *= half;
  abs_sum *= std::abs(half);
  double err = std::abs(kronrod - gauss);
  // QUADPACK-style sharpening of the raw Gauss/Kronrod difference.
  if (err > 0.0 && abs_sum > 0.0) {
    const double scaled = std::pow(200.0 * err / abs_sum, 1.5);
    err = abs_sum * std::min(1.0, scaled);
  }
  err = std::max(err, 50.0 * std::numeric_limits<double>::epsilon() * abs_sum);
  return {lo, hi, kronrod, err, abs_sum};
}

}  // namespace detail

/// Integrates f over [breakpoints.front(), breakpoints.back()], splitting at
/// every breakpoint first. Never throws on non-convergence; check `converged`.
template <class F>
Result integrate(F f, std::span<const double> breakpoints, const Options& opt = {}) {
  Result result;
  if (breakpoints.size() < 2) return result;
  std::priority_queue<detail::Segment> queue;
  double total = 0.0, total_err = 0.0, total_abs = 0.0;
  std::size_t evals = 0;
  for (std::size_t i = 0; i + 1 < breakpoints.size(); ++i) {
    if (!(breakpoints[i + 1] > breakpoints[i])) continue;
    auto seg = detail::gauss_kronrod(f, breakpoints[i], breakpoints[i + 1]);
    evals += 21;
    total += seg.value;
    total_err += seg.error;
    total_abs += seg.abs_value;
    queue.push(seg);
  }
  auto target = [&] { return std::max(opt.abs_tol, opt.rel_tol * std::abs(total)); };
  // Error floor from rounding: no subdivision can beat eps * integral of |f|.
  auto floor = [&] { return 100.0 * std::numeric_limits<double>::epsilon() * total_abs; };
  while (total_err > target() && total_err > floor() && queue.size() < opt.max_intervals) {
    const auto worst = queue.top();
    queue.pop();
    const double mid = 0.5 * (worst.lo + worst.hi);
    if (!(mid > worst.lo && mid < worst.hi)) {
      queue.push(worst);
      break;
    }
    const auto left = detail::gauss_kronrod(f, worst.lo, mid);
    const auto right = detail::gauss_kronrod(f, mid, worst.hi);
    evals += 42;
    total += left.value + right.value - worst.value;
    total_err += left.error + right.error - worst.error;
    total_abs += left.abs_value + right.abs_value - worst.abs_value;
    queue.push(left);
    queue.push(right);
  }
  // Re-sum to shed drift from the running updates.
  total = total_err = total_abs = 0.0;
  while (!queue.empty()) {
    total += queue.top().value;
    total_err += queue.top().error;
    total_abs += queue.top().abs_value;
    queue.pop();
  }
  result.value = total;
  result.abs_error = total_err;
  result.abs_integral = total_abs;
  result.evaluations = evals;
  result.converged = total_err <= std::max(target(), floor());
  return result;
}

template <class F>
Result integrate(F f, double lo, double hi, const Options& opt = {}) {
  const std::array<double, 2> bp = {lo, hi};
  return integrate(f, std::span<const double>(bp), opt);
}

/// Integrates a single-peaked (or few-peaked) non-oscillatory integrand over
/// [lower, inf). A logarithmic scan over lower + scale * [1e-12, 1e8] locates
/// the mass; the tail beyond the last significant scan point is dropped once
/// it is below 1e-20 of the peak.
template <class F>
Result integrate_half_line(F f, double lower, double scale, const Options& opt = {}) {
  constexpr int kPerDecade = 16;
  constexpr double kFirstDecade = -12.0;
  constexpr double kLastDecade = 8.0;
  constexpr double kNegligible = 1e-20;
  const int n = static_cast<int>((kLastDecade - kFirstDecade) * kPerDecade) + 1;
  std::vector<double> t(n), fv(n);
  double peak = 0.0;
  int peak_index = 0;
  for (int i = 0; i < n; ++i) {
    t[i] = lower + scale * std::pow(10.0, kFirstDecade + static_cast<double>(i) / kPerDecade);
    fv[i] = std::abs(f(t[i]));
    if (!std::isfinite(fv[i])) throw DomainError("integrate_half_line: non-finite integrand");
    if (fv[i] > peak) {
      peak = fv[i];
      peak_index = i;
    }
  }
  if (peak == 0.0) return Result{0.0, 0.0, 0.0, static_cast<std::size_t>(n), true};
  int last = n - 1;
  while (last > peak_index && fv[last] < kNegligible * peak) --last;
  if (last == n - 1) {
    throw AccuracyError("integrate_half_line: integrand not negligible at scan end",
                        fv[last] / peak);
  }
  int first = 0;
  while (first < peak_index && fv[first] < kNegligible * peak) ++first;
  std::vector<double> bp;
  bp.push_back(lower);
  for (int i = std::max(first - 1, 0); i <= last + 1; i += 4) bp.push_back(t[i]);
  bp.push_back(t[peak_index]);
  bp.push_back(t[std::min(last + 1, n - 1)]);
  std::sort(bp.begin(), bp.end());
  bp.erase(std::unique(bp.begin(), bp.end()), bp.end());
  auto r = integrate(f, std::span<const double>(bp), opt);
  r.evaluations += n;
  return r;
}

}  // namespace riscalc::quad
