#pragma once

// Semi-analytic Monte Carlo over the true cascaded Rician model: draws of xi
// are averaged through the conditional metric given the channel.
//
// Samples are grouped into fixed blocks; each block keeps its own running
// statistics and blocks are merged in index order, so an estimate depends
// only on (seed, n_samples) and never on the number of worker threads.

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "riscalc/channel.hpp"
#include "riscalc/kernels/cascade.hpp"
#include "riscalc/metrics.hpp"

namespace riscalc::montecarlo {

struct McConfig {
  std::uint64_t n_samples = 1'000'000;
  std::uint64_t seed = 20240601;
  std::size_t batch_size = 512;
  unsigned threads = 0;                      // 0: RISCALC_THREADS, else hardware
  std::optional<kernels::SimdLevel> simd;    // unset: runtime detection

  void validate() const;
};

struct EstimateCI {
  double mean = 0.0;
  double std_error = 0.0;
  std::uint64_t n_samples = 0;
  std::uint64_t seed = 0;
};

struct CsiEstimate {
  EstimateCI capacity;
  EstimateCI power_usage;
};

/// Samples per reduction block.
inline constexpr std::uint64_t kBlockSize = 4096;

/// Worker count: explicit request, else RISCALC_THREADS, else the hardware.
unsigned resolve_threads(unsigned requested);

/// Evaluates `outputs` conditional metrics for each xi of a batch.
/// `values` is laid out [output][sample] with stride xi.size().
using BatchEvaluator = std::function<void(std::span<const double> xi, std::span<double> values)>;

/// Mean and standard error of every output over n_samples draws of xi.
std::vector<EstimateCI> mc_expectations(const channel::LinkModel& link, const McConfig& cfg,
                                        std::size_t outputs, const BatchEvaluator& eval);

/// All draws of xi in sample-index order.
std::vector<double> sample_amplitudes(const channel::LinkModel& link, const McConfig& cfg);

EstimateCI mc_asep(const channel::LinkModel& link, double gamma_bar,
                   const metrics::ModulationScheme& mod, const McConfig& cfg);

EstimateCI mc_capacity_no_csi(const channel::LinkModel& link, double gamma_bar,
                              const McConfig& cfg);

/// Capacity under water-filling with cutoff gamma0, and the empirical
/// average transmit power (1/gamma0 - 1/gamma) 1{gamma > gamma0}.
CsiEstimate mc_capacity_csi(const channel::LinkModel& link, double gamma_bar, double gamma0,
                            const McConfig& cfg);

/// Symbol error rate of the actual constellation over AWGN at a fixed SNR,
/// by symbol-level simulation with minimum-distance detection.
EstimateCI symbol_error_rate_awgn(const metrics::ModulationScheme& mod, double snr,
                                  const McConfig& cfg);

/// Kolmogorov-Smirnov distance between the samples and the Gamma-fit CDF.
double ks_distance(std::vector<double> samples, const channel::GammaFit& fit);

}  // namespace riscalc::montecarlo
