#include "riscalc/montecarlo.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <complex>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <numbers>
#include <string>
#include <thread>

#include "riscalc/errors.hpp"
#include "riscalc/rng.hpp"
#include "riscalc/specfun.hpp"

namespace riscalc::montecarlo {

namespace {

// Welford accumulator on values scaled by 2^-exp2, where exp2 tracks the
// largest magnitude seen; keeps M2 representable for values near 1e-300.
struct Moments {
  double n = 0.0;
  double mean = 0.0;
  double m2 = 0.0;
  int exp2 = 0;
  bool scaled = false;

  void rescale(int e) {
    if (!scaled) {
      exp2 = e;
      scaled = true;
      return;
    }
    if (e <= exp2) return;
    mean = std::ldexp(mean, exp2 - e);
    m2 = std::ldexp(m2, 2 * (exp2 - e));
    exp2 = e;
  }

  void add(double x) {
    if (x != 0.0) rescale(std::ilogb(x));
    const double y = std::ldexp(x, -exp2);
    n += 1.0;
    const double delta = y - mean;
    mean += delta / n;
    m2 += delta * (y - mean);
  }

  void merge(Moments o) {
    if (o.n == 0.0) return;
    if (o.scaled) rescale(o.exp2);
    if (o.scaled && o.exp2 < exp2) {
      o.mean = std::ldexp(o.mean, o.exp2 - exp2);
      o.m2 = std::ldexp(o.m2, 2 * (o.exp2 - exp2));
    }
    const double total = n + o.n;
    const double delta = o.mean - mean;
    mean += delta * (o.n / total);
    m2 += o.m2 + delta * delta * (n * o.n / total);
    n = total;
  }

  double unscaled_mean() const { return std::ldexp(mean, exp2); }
  double std_error() const {
    return n > 1.0 ? std::ldexp(std::sqrt(m2 / (n - 1.0) / n), exp2) : 0.0;
  }
};

// Runs block_fn(block_index, first_sample, count, moments[outputs]) for every
// block on a pool of workers, then merges block statistics in index order.
template <class BlockFn>
std::vector<EstimateCI> reduce_blocks(const McConfig& cfg, std::size_t outputs,
                                      BlockFn&& block_fn) {
  const std::uint64_t n_blocks = (cfg.n_samples + kBlockSize - 1) / kBlockSize;
  std::vector<Moments> partial(n_blocks * outputs);
  std::atomic<std::uint64_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;

  const auto worker = [&] {
    try {
      auto state = block_fn.make_state();
      for (std::uint64_t blk = next++; blk < n_blocks; blk = next++) {
        const std::uint64_t first = blk * kBlockSize;
        const std::uint64_t count = std::min<std::uint64_t>(kBlockSize, cfg.n_samples - first);
        block_fn.run(state, first, count, &partial[blk * outputs]);
      }
    } catch (...) {
      std::lock_guard lock(failure_mutex);
      if (!failure) failure = std::current_exception();
      next = n_blocks;
    }
  };

  const unsigned threads =
      static_cast<unsigned>(std::min<std::uint64_t>(resolve_threads(cfg.threads), n_blocks));
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(threads);
    for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  if (failure) std::rethrow_exception(failure);

  std::vector<EstimateCI> out(outputs);
  for (std::size_t k = 0; k < outputs; ++k) {
    Moments total;
    for (std::uint64_t blk = 0; blk < n_blocks; ++blk) total.merge(partial[blk * outputs + k]);
    out[k].mean = total.unscaled_mean();
    out[k].std_error = total.std_error();
    out[k].n_samples = cfg.n_samples;
    out[k].seed = cfg.seed;
  }
  return out;
}

// Draws xi for samples [first, first + count) in batches through the
// selected cascade kernel.
class AmplitudeSource {
 public:
  AmplitudeSource(const channel::LinkModel& link, const McConfig& cfg)
      : link_(link),
        cfg_(cfg),
        kernel_(kernels::cascade_kernel(cfg.simd ? *cfg.simd : kernels::detect_simd_level())) {}

  struct State {
    std::vector<double> normals;
    std::vector<double> xi;
  };

  State make_state() const {
    const std::size_t b = cfg_.batch_size;
    return {std::vector<double>(4 * link_.n_elements * b), std::vector<double>(b)};
  }

  template <class Sink>
  void draw(State& st, std::uint64_t first, std::uint64_t count, Sink&& sink) const {
    const std::size_t n = static_cast<std::size_t>(link_.n_elements);
    for (std::uint64_t start = 0; start < count; start += cfg_.batch_size) {
      const std::size_t b = static_cast<std::size_t>(
          std::min<std::uint64_t>(cfg_.batch_size, count - start));
      for (std::size_t i = 0; i < b; ++i) {
        rng::CounterStream stream(cfg_.seed, first + start + i);
        for (std::size_t l = 0; l < n; ++l) {
          const auto z = stream.next_normal_block();
          for (std::size_t c = 0; c < 4; ++c) st.normals[(4 * l + c) * b + i] = z[c];
        }
      }
      kernels::CascadeBatch batch{link_.hop1.split(), link_.hop2.split(), n, b,
                                  std::span<const double>(st.normals.data(), 4 * n * b),
                                  std::span<double>(st.xi.data(), b)};
      kernel_(batch);
      sink(std::span<const double>(st.xi.data(), b), first + start);
    }
  }

 private:
  channel::LinkModel link_;
  McConfig cfg_;
  kernels::CascadeKernel kernel_;
};

struct Constellation {
  std::vector<std::complex<double>> points;
};

Constellation constellation_for(const metrics::ModulationScheme& mod) {
  Constellation c;
  const std::string& name = mod.name;
  const auto order_prefix = [&](std::string_view suffix) {
    return std::stoi(name.substr(0, name.size() - suffix.size()));
  };
  if (name == "bpsk") {
    c.points = {{1.0, 0.0}, {-1.0, 0.0}};
  } else if (name == "qpsk" || name.ends_with("psk")) {
    const int m = name == "qpsk" ? 4 : order_prefix("psk");
    for (int k = 0; k < m; ++k) c.points.push_back(std::polar(1.0, 2.0 * std::numbers::pi * k / m));
  } else if (name.ends_with("qam")) {
    const int m = order_prefix("qam");
    // Square for even log2(M), otherwise rectangular with the short side on Q.
    int rows = 1;
    while (rows * rows * 4 <= m) rows *= 2;
    const int cols = m / rows;
    double energy = 0.0;
    for (int i = 0; i < cols; ++i) {
      for (int j = 0; j < rows; ++j) {
        const std::complex<double> pt(2.0 * i - (cols - 1), 2.0 * j - (rows - 1));
        c.points.push_back(pt);
        energy += std::norm(pt);
      }
    }
    const double scale = 1.0 / std::sqrt(energy / m);
    for (auto& pt : c.points) pt *= scale;
  } else {
    throw UnsupportedParameters("no constellation for modulation '" + name + "'");
  }
  return c;
}

}  // namespace

void McConfig::validate() const {
  if (n_samples < 1000) throw ConfigError("mc.n_samples must be >= 1000");
  if (batch_size < 1) throw ConfigError("mc.batch_size must be >= 1");
}

unsigned resolve_threads(unsigned requested) {
  if (requested > 0) return requested;
  if (const char* env = std::getenv("RISCALC_THREADS")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && v > 0) return static_cast<unsigned>(v);
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

std::vector<EstimateCI> mc_expectations(const channel::LinkModel& link, const McConfig& cfg,
                                        std::size_t outputs, const BatchEvaluator& eval) {
  link.validate();
  cfg.validate();
  if (outputs == 0) throw ConfigError("at least one output required");
  const AmplitudeSource source(link, cfg);
  struct Fn {
    const AmplitudeSource& source;
    const BatchEvaluator& eval;
    std::size_t outputs;
    std::size_t batch;
    struct State {
      AmplitudeSource::State draws;
      std::vector<double> values;
    };
    State make_state() const { return {source.make_state(), std::vector<double>(outputs * batch)}; }
    void run(State& st, std::uint64_t first, std::uint64_t count, Moments* out) const {
      source.draw(st.draws, first, count, [&](std::span<const double> xi, std::uint64_t) {
        const std::size_t b = xi.size();
        eval(xi, std::span<double>(st.values.data(), outputs * b));
        for (std::size_t k = 0; k < outputs; ++k) {
          for (std::size_t i = 0; i < b; ++i) out[k].add(st.values[k * b + i]);
        }
      });
    }
  };
  return reduce_blocks(cfg, outputs, Fn{source, eval, outputs, cfg.batch_size});
}

std::vector<double> sample_amplitudes(const channel::LinkModel& link, const McConfig& cfg) {
  link.validate();
  cfg.validate();
  std::vector<double> out(cfg.n_samples);
  const AmplitudeSource source(link, cfg);
  struct Fn {
    const AmplitudeSource& source;
    std::vector<double>& out;
    AmplitudeSource::State make_state() const { return source.make_state(); }
    void run(AmplitudeSource::State& st, std::uint64_t first, std::uint64_t count,
             Moments*) const {
      source.draw(st, first, count, [&](std::span<const double> xi, std::uint64_t at) {
        std::copy(xi.begin(), xi.end(), out.begin() + static_cast<std::ptrdiff_t>(at));
      });
    }
  };
  reduce_blocks(cfg, 1, Fn{source, out});
  return out;
}

EstimateCI mc_asep(const channel::LinkModel& link, double gamma_bar,
                   const metrics::ModulationScheme& mod, const McConfig& cfg) {
  mod.validate();
  const double scale = std::sqrt(2.0 * mod.q * gamma_bar);
  return mc_expectations(link, cfg, 1, [&](std::span<const double> xi, std::span<double> v) {
    for (std::size_t i = 0; i < xi.size(); ++i) v[i] = mod.p * specfun::gaussian_q(scale * xi[i]);
  })[0];
}

EstimateCI mc_capacity_no_csi(const channel::LinkModel& link, double gamma_bar,
                              const McConfig& cfg) {
  return mc_expectations(link, cfg, 1, [&](std::span<const double> xi, std::span<double> v) {
    for (std::size_t i = 0; i < xi.size(); ++i) {
      v[i] = std::log1p(gamma_bar * xi[i] * xi[i]) / std::numbers::ln2;
    }
  })[0];
}

CsiEstimate mc_capacity_csi(const channel::LinkModel& link, double gamma_bar, double gamma0,
                            const McConfig& cfg) {
  if (!std::isfinite(gamma0) || gamma0 <= 0.0) throw DomainError("gamma0 must be > 0");
  const auto est = mc_expectations(link, cfg, 2, [&](std::span<const double> xi,
                                                     std::span<double> v) {
    const std::size_t b = xi.size();
    for (std::size_t i = 0; i < b; ++i) {
      const double g = gamma_bar * xi[i] * xi[i];
      const bool on = g > gamma0;
      v[i] = on ? std::log2(g / gamma0) : 0.0;
      v[b + i] = on ? 1.0 / gamma0 - 1.0 / g : 0.0;
    }
  });
  return {est[0], est[1]};
}

EstimateCI symbol_error_rate_awgn(const metrics::ModulationScheme& mod, double snr,
                                  const McConfig& cfg) {
  cfg.validate();
  if (!std::isfinite(snr) || snr <= 0.0) throw DomainError("snr must be > 0");
  const Constellation con = constellation_for(mod);
  const double noise_sigma = std::sqrt(0.5 / snr);
  const std::size_t m = con.points.size();
  struct Fn {
    const Constellation& con;
    std::size_t m;
    double noise_sigma;
    std::uint64_t seed;
    int make_state() const { return 0; }
    void run(int&, std::uint64_t first, std::uint64_t count, Moments* out) const {
      for (std::uint64_t i = 0; i < count; ++i) {
        rng::CounterStream stream(seed, first + i);
        const auto u = stream.next_uniform_block();
        const auto z = stream.next_normal_block();
        const std::size_t sent = std::min(m - 1, static_cast<std::size_t>(u[0] * m));
        const std::complex<double> r =
            con.points[sent] + noise_sigma * std::complex<double>(z[0], z[1]);
        std::size_t best = 0;
        double best_d = std::norm(r - con.points[0]);
        for (std::size_t k = 1; k < m; ++k) {
          const double d = std::norm(r - con.points[k]);
          if (d < best_d) {
            best_d = d;
            best = k;
          }
        }
        out[0].add(best == sent ? 0.0 : 1.0);
      }
    }
  };
  return reduce_blocks(cfg, 1, Fn{con, m, noise_sigma, cfg.seed})[0];
}

double ks_distance(std::vector<double> samples, const channel::GammaFit& fit) {
  if (samples.empty()) throw DomainError("ks_distance needs samples");
  std::sort(samples.begin(), samples.end());
  const double n = static_cast<double>(samples.size());
  double d = 0.0;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const double f = channel::fit_xi_cdf(fit, std::max(samples[i], 0.0));
    d = std::max({d, f - i / n, (i + 1) / n - f});
  }
  return d;
}

}  // namespace riscalc::montecarlo
