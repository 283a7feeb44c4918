#include <cmath>
#include <numbers>

#include "doctest.h"
#include "oracle_values.hpp"
#include "riscalc/errors.hpp"
#include "riscalc/meijer_g.hpp"
#include "riscalc/specfun.hpp"
#include "test_util.hpp"

using namespace riscalc;
using namespace riscalc::specfun;
using testutil::logspace;
using testutil::rel_err;

namespace {

MeijerGSpec asep_kernel(double a) {
  return {2, 3, {0.5, 0.5, 1.0}, {0.5 * (a + 1.0), 0.5 * (a + 2.0), 0.0, 0.5}};
}

MeijerGSpec capacity_kernel(double a, int m) {
  return {m, 4, {-0.5 * a, 0.5 * (1.0 - a), 1.0, 1.0}, {m == 1 ? 1.0 : 0.0, 0.0}};
}

}  // namespace

TEST_CASE("lower incomplete gamma identity") {
  const MeijerGSpec g{1, 1, {1.0}, {2.5, 0.0}};
  CHECK(rel_err(meijer_g(g, 1.7), oracle::kIncGammaLower_2p5_1p7) < 1e-9);
  double worst = 0.0;
  for (double x : logspace(1e-4, 1e4, 100)) {
    const double want = reg_inc_gamma_lower(2.5, x) * std::exp(ln_gamma(2.5));
    worst = std::max(worst, rel_err(meijer_g(g, x), want));
  }
  CHECK(worst <= 1e-9);
}

TEST_CASE("log(1+x) identity") {
  const MeijerGSpec g{1, 2, {1.0, 1.0}, {1.0, 0.0}};
  CHECK(rel_err(meijer_g(g, 3.0), std::log(4.0)) < 1e-9);
  double worst = 0.0;
  for (double x : logspace(1e-4, 1e4, 100)) worst = std::max(worst, rel_err(meijer_g(g, x), std::log1p(x)));
  CHECK(worst <= 1e-9);
}

TEST_CASE("log(x) step identity") {
  const MeijerGSpec g{0, 2, {1.0, 1.0}, {0.0, 0.0}};
  CHECK(rel_err(meijer_g(g, std::numbers::e), 1.0) < 1e-9);
  CHECK(std::abs(meijer_g(g, 0.5)) < 1e-12);
  double worst = 0.0;
  for (double x : logspace(1e-4, 1e4, 100)) {
    const double want = x > 1.0 ? std::log(x) : 0.0;
    const double got = meijer_g(g, x);
    worst = std::max(worst, want == 0.0 ? std::abs(got) : rel_err(got, want));
  }
  CHECK(worst <= 1e-9);
}

TEST_CASE("metric kernels against mpmath") {
  CHECK(rel_err(meijer_g(asep_kernel(2.2), 0.37), oracle::kG2334_A2p2) < 1e-8);
  CHECK(rel_err(meijer_g(asep_kernel(36.4), 0.02), oracle::kG2334_A36) < 1e-8);
  CHECK(rel_err(meijer_g(capacity_kernel(2.2, 1), 3.1), oracle::kG1442_A2p2) < 1e-8);
  CHECK(rel_err(meijer_g(capacity_kernel(36.4, 1), 0.4), oracle::kG1442_A36) < 1e-8);
  CHECK(rel_err(meijer_g(capacity_kernel(2.2, 0), 3.1), oracle::kG0442_A2p2) < 1e-8);
  CHECK(rel_err(meijer_g(capacity_kernel(36.4, 0), 0.4), oracle::kG0442_A36) < 1e-8);
}

TEST_CASE("contour and residue series agree for the ASEP kernel") {
  int compared = 0;
  for (double a : {0.61, 2.2, 19.5, 104.5}) {
    for (double z : logspace(1e-6, 1e2, 25)) {
      const auto contour = meijer_g_contour(asep_kernel(a), z);
      MeijerGResult residue;
      try {
        residue = meijer_g_residue(asep_kernel(a), z);
      } catch (const AccuracyError&) {
        continue;
      }
      if (residue.rel_error > 1e-10 || contour.rel_error > 1e-10) continue;
      ++compared;
      const double c = contour.value.mantissa;
      const double r = residue.value.mantissa * std::exp(residue.value.log_scale - contour.value.log_scale);
      CHECK_MESSAGE(rel_err(r, c) <= 1e-7, "a=" << a << " z=" << z);
    }
  }
  CHECK(compared > 50);
}

TEST_CASE("coincident residue poles are perturbed and flagged") {
  // b1 - b2 integer: Γ(1 - s) Γ(2 - s) share poles
  const MeijerGSpec g{2, 0, {}, {1.0, 2.0}};
  const auto r = meijer_g_residue(g, 0.3);
  CHECK(r.perturbed);
  // G^{2,0}_{0,2}(z | 1, 2) = 2 z^{3/2} K_1(2 sqrt z)
  const double want = 2.0 * std::pow(0.3, 1.5) * bessel_k(1.0, 2.0 * std::sqrt(0.3));
  // the nudged pole pairs cancel to about seven digits
  CHECK(rel_err(r.value.value(), want) < 1e-5);
  CHECK(rel_err(meijer_g(g, 0.3), want) < 1e-9);
}

TEST_CASE("invalid specifications") {
  CHECK_THROWS_AS(meijer_g({1, 1, {3.0}, {1.0, 0.0}}, 0.5), UnsupportedParameters);
  CHECK_THROWS_AS(meijer_g({3, 0, {}, {1.0, 0.0}}, 0.5), UnsupportedParameters);
  CHECK_THROWS_AS(meijer_g({1, 2, {1.0}, {1.0, 0.0}}, 0.5), UnsupportedParameters);
  CHECK_THROWS_AS(meijer_g({1, 2, {1.0, 1.0}, {1.0, 0.0}}, 0.0), DomainError);
  CHECK_THROWS_AS(meijer_g({1, 2, {1.0, 1.0}, {1.0, 0.0}}, -2.0), DomainError);
}
