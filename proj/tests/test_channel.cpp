#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "doctest.h"
#include "oracle_values.hpp"
#include "riscalc/channel.hpp"
#include "riscalc/errors.hpp"
#include "riscalc/montecarlo.hpp"
#include "riscalc/quadrature.hpp"
#include "riscalc/specfun.hpp"
#include "test_util.hpp"

using namespace riscalc;
using namespace riscalc::channel;
using testutil::rel_err;

TEST_CASE("Rician hop split") {
  for (double K : {0.0, 0.5, 3.0, 1e4}) {
    for (double omega : {0.25, 1.0, 7.0}) {
      const RicianHop hop{K, omega};
      CHECK(rel_err(hop.los_power() + hop.diffuse_power(), omega) < 1e-15);
      if (K > 0.0) CHECK(rel_err(hop.los_power() / hop.diffuse_power(), K) < 1e-14);
      const auto s = hop.split();
      CHECK(rel_err(s.los * s.los + 2.0 * s.sigma * s.sigma, omega) < 1e-14);
    }
  }
  CHECK_THROWS_AS((RicianHop{-1.0, 1.0}).validate(), DomainError);
  CHECK_THROWS_AS((RicianHop{1.0, 0.0}).validate(), DomainError);
  CHECK_THROWS_AS(LinkModel::symmetric(1.0, 0).validate(), DomainError);
}

TEST_CASE("cascaded moments") {
  const auto ray = cascaded_moments(LinkModel::symmetric(0.0, 1));
  CHECK(rel_err(ray.mean, oracle::kRayleighMean) < 1e-14);
  CHECK(rel_err(ray.variance, oracle::kRayleighVar) < 1e-14);

  const auto k3 = cascaded_moments(LinkModel::symmetric(3.0, 1));
  CHECK(rel_err(k3.mean, oracle::kK3Mean) < 1e-13);

  const LinkModel los{{1e4, 2.0}, {1e4, 0.5}, 1};
  const auto lim = cascaded_moments(los);
  CHECK(std::abs(lim.mean - 1.0) < 1e-3);
  CHECK(lim.variance < 1e-3);
  CHECK(lim.variance > 0.0);
}

TEST_CASE("Gamma fit") {
  const auto fit = gamma_fit(LinkModel::symmetric(0.0, 1));
  const double pi2 = std::numbers::pi * std::numbers::pi;
  CHECK(rel_err(fit.a, pi2 / (16.0 - pi2) - 1.0) < 1e-13);
  CHECK(rel_err(fit.b, (16.0 - pi2) / (4.0 * std::numbers::pi)) < 1e-13);
  CHECK(fit.a == doctest::Approx(0.60997).epsilon(1e-4));
  CHECK(fit.b == doctest::Approx(0.48779).epsilon(1e-4));

  for (double K : {0.0, 3.0, 10.0}) {
    const LinkModel one{{K, 1.3}, {K + 1.0, 0.6}, 1};
    LinkModel many = one;
    many.n_elements = 10;
    const auto f1 = gamma_fit(one);
    const auto fn = gamma_fit(many);
    CHECK(rel_err(fn.a + 1.0, 10.0 * (f1.a + 1.0)) < 1e-13);
    CHECK(rel_err(fn.b, f1.b) < 1e-13);
    CHECK(rel_err(fn.b * (fn.a + 1.0), fn.mean_xi) < 1e-14);
    CHECK(rel_err(fn.b * fn.b * (fn.a + 1.0), fn.var_xi) < 1e-14);

    const auto r = quad::integrate_half_line([&](double y) { return fit_xi_pdf(fn, y); }, 0.0, fn.b);
    CHECK(std::abs(r.value - 1.0) < 1e-10);
  }
}

TEST_CASE("SNR density and CDF") {
  const auto fit = gamma_fit(LinkModel::symmetric(3.0, 10));
  for (double gamma_bar : {0.01, 1.0, 100.0}) {
    const auto r = quad::integrate_half_line(
        [&](double t) { return 2.0 * t * snr_pdf(fit, gamma_bar, t * t); }, 0.0,
        fit.b * std::sqrt(gamma_bar));
    CHECK(std::abs(r.value - 1.0) < 1e-9);
  }
  CHECK_THROWS_AS(snr_pdf(fit, 1.0, 0.0), DomainError);
  CHECK_THROWS_AS(snr_pdf(fit, -1.0, 1.0), DomainError);
  CHECK_THROWS_AS(snr_cdf(fit, 1.0, -1.0), DomainError);
  CHECK(snr_cdf(fit, 3.0, 0.0) == 0.0);

  std::mt19937_64 gen(3);
  std::uniform_real_distribution<double> u(0.2, 3.0);
  const double gamma_bar = 10.0;
  const double mean_g = gamma_bar * (fit.var_xi + fit.mean_xi * fit.mean_xi);
  for (int i = 0; i < 50; ++i) {
    const double g = u(gen) * mean_g;
    const double y = std::sqrt(g / gamma_bar);
    CHECK(rel_err(snr_pdf(fit, gamma_bar, g), fit_xi_pdf(fit, y) / (2.0 * std::sqrt(g * gamma_bar))) <
          1e-12);
    const double h = 1e-4 * g;
    const double fd = (snr_cdf(fit, gamma_bar, g + h) - snr_cdf(fit, gamma_bar, g - h)) / (2.0 * h);
    CHECK(rel_err(fd, snr_pdf(fit, gamma_bar, g)) < 1e-6);
  }
  for (int i = 1; i <= 20; ++i) {
    const double g = mean_g * i / 10.0;
    const auto r = quad::integrate([&](double t) { return 2.0 * t * snr_pdf(fit, gamma_bar, t * t); },
                                   0.0, std::sqrt(g), quad::Options{0.0, 1e-13, 4000});
    CHECK(std::abs(r.value - snr_cdf(fit, gamma_bar, g)) < 1e-8);
  }
}

TEST_CASE("single-element product density") {
  const LinkModel ray = LinkModel::symmetric(0.0, 1);
  for (int i = 0; i < 30; ++i) {
    const double y = 0.02 + 0.15 * i;
    const double want = 4.0 * y * specfun::bessel_k(0.0, 2.0 * y);
    CHECK(rel_err(exact_product_pdf(ray, y), want) < 1e-8);
  }
  CHECK(rel_err(exact_product_pdf(ray, 0.05), oracle::kDoubleRayleigh_0p05) < 1e-8);
  CHECK(rel_err(exact_product_pdf(ray, 0.7), oracle::kDoubleRayleigh_0p7) < 1e-8);
  CHECK(rel_err(exact_product_pdf(ray, 2.5), oracle::kDoubleRayleigh_2p5) < 1e-8);

  for (const LinkModel& link : {ray, LinkModel{{3.0, 1.0}, {3.0, 1.0}, 1}}) {
    const auto m = cascaded_moments(link);
    const auto total = quad::integrate_half_line(
        [&](double y) { return exact_product_pdf(link, y); }, 0.0, 1.0);
    CHECK(std::abs(total.value - 1.0) < 1e-9);
    const auto first = quad::integrate_half_line(
        [&](double y) { return y * exact_product_pdf(link, y); }, 0.0, 1.0);
    CHECK(rel_err(first.value, m.mean) < 1e-8);
  }
}

TEST_CASE("published series form") {
  // With indices from zero the series collapses to 4y K0(2y) for K = 0.
  const LinkModel ray = LinkModel::symmetric(0.0, 1);
  for (double y : {0.1, 0.8, 2.0}) {
    CHECK(rel_err(printed_series_pdf(ray, y), 4.0 * y * specfun::bessel_k(0.0, 2.0 * y)) < 1e-12);
  }
  // For K > 0 it is evaluated for comparison only.
  const LinkModel k3 = LinkModel::symmetric(3.0, 1);
  CHECK(std::isfinite(printed_series_pdf(k3, 1.0)));
}

TEST_CASE("sampler") {
  const LinkModel near_los{{1e6, 1.5}, {1e6, 2.0}, 4};
  rng::CounterStream stream(1, 0);
  for (int i = 0; i < 100; ++i) {
    const double xi = sample_cascaded_amplitude(near_los, stream);
    CHECK(rel_err(xi, 4.0 * std::sqrt(3.0)) < 1e-2);
  }

  SUBCASE("matches the batched Monte Carlo draws bit for bit") {
    const LinkModel link{{3.0, 1.0}, {1.0, 2.0}, 7};
    montecarlo::McConfig cfg;
    cfg.n_samples = 5000;
    cfg.seed = 99;
    const auto batch = montecarlo::sample_amplitudes(link, cfg);
    for (std::uint64_t i : {0ULL, 1ULL, 511ULL, 4095ULL, 4096ULL, 4999ULL}) {
      rng::CounterStream s(cfg.seed, i);
      CHECK(sample_cascaded_amplitude(link, s) == batch[i]);
      CHECK(s.blocks_used() == 7);
    }
  }
}
