#pragma once

// Metric sweeps over a scenario grid and their CSV representation.

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "riscalc/channel.hpp"
#include "riscalc/metrics.hpp"
#include "riscalc/montecarlo.hpp"

namespace riscalc::sweep {

enum class Metric { asep, cap_nocsi, cap_csi, cap_asymptote };
enum class Method { closed, quad, mc };

std::string_view to_string(Metric m);
std::string_view to_string(Method m);
Metric parse_metric(std::string_view text);
Method parse_method(std::string_view text);

/// Symmetric-link families: each K in k_values is used for both hops unless
/// k2 is set, in which case only hop 1 follows the list.
struct SweepConfig {
  std::vector<double> k_values{0.0};
  std::optional<double> k2;
  double omega1 = 1.0;
  double omega2 = 1.0;
  std::vector<int> n_values{10};
  double snr_db_start = 0.0;
  double snr_db_stop = 30.0;
  double snr_db_step = 1.0;
  std::vector<Metric> metrics{Metric::cap_nocsi};
  std::vector<Method> methods{Method::closed};
  std::string modulation = "bpsk";
  montecarlo::McConfig mc;
  unsigned threads = 0;  // grid workers; 0: RISCALC_THREADS, else hardware
  bool timing = false;   // fill runtime_ms
  std::string output_path;

  /// Throws ConfigError naming the offending field.
  void validate() const;
  std::vector<double> snr_grid() const;
};

/// Applies one `key = value` setting. Keys: k, k2, omega1, omega2, n,
/// snr_db (start:stop:step), metrics, methods, modulation, mc.samples,
/// mc.seed, mc.batch, threads, timing, output.
void apply_setting(SweepConfig& cfg, std::string_view key, std::string_view value);

/// Parses a flat key-value file: one `key = value` per line, `#` comments.
SweepConfig parse_config(std::string_view text);
SweepConfig load_config(const std::filesystem::path& path);

/// Documented keys with their defaults, for --help.
std::string config_reference();

struct ResultRow {
  Metric metric = Metric::asep;
  Method method = Method::closed;
  double K1 = 0.0;
  double K2 = 0.0;
  double omega1 = 1.0;
  double omega2 = 1.0;
  int N = 1;
  double snr_db = 0.0;
  double value = 0.0;
  std::optional<double> std_error;
  std::optional<double> runtime_ms;
  bool underflow = false;  // value was below the representable floor and set to 0
  std::string error;       // nonempty for failed points

  bool ok() const { return error.empty(); }
};

/// Evaluates one metric at one point. Never throws for evaluation failures;
/// they are returned in `error`.
ResultRow evaluate_point(Metric metric, Method method, const channel::LinkModel& link,
                         double snr_db, const metrics::ModulationScheme& mod,
                         const montecarlo::McConfig& mc, bool timing = false);

/// True when the method applies to the metric (the asymptote is closed-form only).
bool supported(Metric metric, Method method);

/// Full grid in (metric, method, K, N, snr) order. Unsupported
/// metric/method pairs are skipped.
std::vector<ResultRow> run_sweep(const SweepConfig& cfg);

/// 12 significant digits, LF endings.
std::string format_csv(const std::vector<ResultRow>& rows);
void emit_csv(const std::vector<ResultRow>& rows, const std::filesystem::path& path);
std::vector<ResultRow> parse_csv(std::string_view text);

inline constexpr std::string_view kCsvHeader =
    "metric,method,K1,K2,omega1,omega2,N,snr_db,value,std_error,runtime_ms";

}  // namespace riscalc::sweep
