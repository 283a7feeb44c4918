#include "riscalc/sweep.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <mutex>
#include <sstream>
#include <thread>

#include "riscalc/errors.hpp"

namespace riscalc::sweep {

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = s.find(sep, start);
    out.push_back(trim(s.substr(start, pos == std::string_view::npos ? pos : pos - start)));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

[[noreturn]] void bad_value(std::string_view key, std::string_view value, std::string_view why) {
  throw ConfigError(std::string(key) + ": " + std::string(why) + " (got '" + std::string(value) +
                    "')");
}

double parse_double(std::string_view key, std::string_view text) {
  text = trim(text);
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc() || ptr != text.data() + text.size() || !std::isfinite(v)) {
    bad_value(key, text, "expected a finite number");
  }
  return v;
}

std::uint64_t parse_u64(std::string_view key, std::string_view text) {
  text = trim(text);
  std::uint64_t v = 0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc() || ptr != text.data() + text.size()) {
    bad_value(key, text, "expected a non-negative integer");
  }
  return v;
}

bool parse_bool(std::string_view key, std::string_view text) {
  text = trim(text);
  if (text == "true" || text == "1" || text == "yes") return true;
  if (text == "false" || text == "0" || text == "no") return false;
  bad_value(key, text, "expected true or false");
}

template <class T, class F>
std::vector<T> parse_list(std::string_view key, std::string_view text, F item) {
  std::vector<T> out;
  for (auto part : split(text, ',')) {
    if (part.empty()) bad_value(key, text, "empty list item");
    out.push_back(item(key, part));
  }
  return out;
}

std::string format_number(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

}  // namespace

std::string_view to_string(Metric m) {
  switch (m) {
    case Metric::asep: return "asep";
    case Metric::cap_nocsi: return "cap-nocsi";
    case Metric::cap_csi: return "cap-csi";
    case Metric::cap_asymptote: return "cap-asymptote";
  }
  return "?";
}

std::string_view to_string(Method m) {
  switch (m) {
    case Method::closed: return "closed";
    case Method::quad: return "quad";
    case Method::mc: return "mc";
  }
  return "?";
}

Metric parse_metric(std::string_view text) {
  for (Metric m : {Metric::asep, Metric::cap_nocsi, Metric::cap_csi, Metric::cap_asymptote}) {
    if (trim(text) == to_string(m)) return m;
  }
  throw ConfigError("unknown metric '" + std::string(text) +
                    "' (expected asep, cap-nocsi, cap-csi or cap-asymptote)");
}

Method parse_method(std::string_view text) {
  for (Method m : {Method::closed, Method::quad, Method::mc}) {
    if (trim(text) == to_string(m)) return m;
  }
  throw ConfigError("unknown method '" + std::string(text) + "' (expected closed, quad or mc)");
}

void SweepConfig::validate() const {
  if (k_values.empty()) throw ConfigError("k: at least one value required");
  for (double k : k_values) {
    if (!(k >= 0.0)) throw ConfigError("k: values must be >= 0");
  }
  if (k2 && !(*k2 >= 0.0)) throw ConfigError("k2: must be >= 0");
  if (!(omega1 > 0.0)) throw ConfigError("omega1: must be > 0");
  if (!(omega2 > 0.0)) throw ConfigError("omega2: must be > 0");
  if (n_values.empty()) throw ConfigError("n: at least one value required");
  for (int n : n_values) {
    if (n < 1) throw ConfigError("n: values must be >= 1");
  }
  if (!(snr_db_step > 0.0)) throw ConfigError("snr_db: step must be > 0");
  if (!(snr_db_start < snr_db_stop)) throw ConfigError("snr_db: start must be < stop");
  if (snr_db_step > snr_db_stop - snr_db_start) {
    throw ConfigError("snr_db: step exceeds the range, grid would hold a single point");
  }
  if (metrics.empty()) throw ConfigError("metrics: at least one metric required");
  if (methods.empty()) throw ConfigError("methods: at least one method required");
  bool any = false;
  for (Metric m : metrics) {
    for (Method me : methods) any = any || supported(m, me);
  }
  if (!any) throw ConfigError("methods: no selected method applies to the selected metrics");
  metrics::find_modulation(modulation);
  try {
    mc.validate();
  } catch (const ConfigError& e) {
    throw ConfigError(std::string("mc: ") + e.what());
  }
}

std::vector<double> SweepConfig::snr_grid() const {
  std::vector<double> out;
  const double span = snr_db_stop - snr_db_start;
  const auto count = static_cast<long>(std::floor(span / snr_db_step + 1e-9));
  for (long i = 0; i <= count; ++i) out.push_back(snr_db_start + i * snr_db_step);
  return out;
}

void apply_setting(SweepConfig& cfg, std::string_view key, std::string_view value) {
  key = trim(key);
  value = trim(value);
  if (key == "k") {
    cfg.k_values = parse_list<double>(key, value, parse_double);
  } else if (key == "k2") {
    cfg.k2 = parse_double(key, value);
  } else if (key == "omega1") {
    cfg.omega1 = parse_double(key, value);
  } else if (key == "omega2") {
    cfg.omega2 = parse_double(key, value);
  } else if (key == "n") {
    cfg.n_values = parse_list<int>(key, value, [](std::string_view k, std::string_view v) {
      const std::uint64_t n = parse_u64(k, v);
      if (n > 1'000'000) bad_value(k, v, "too many elements");
      return static_cast<int>(n);
    });
  } else if (key == "snr_db") {
    const auto parts = split(value, ':');
    if (parts.size() != 3) bad_value(key, value, "expected start:stop:step");
    cfg.snr_db_start = parse_double(key, parts[0]);
    cfg.snr_db_stop = parse_double(key, parts[1]);
    cfg.snr_db_step = parse_double(key, parts[2]);
  } else if (key == "metrics") {
    cfg.metrics = parse_list<Metric>(key, value, [](auto, std::string_view v) {
      return parse_metric(v);
    });
  } else if (key == "methods") {
    cfg.methods = parse_list<Method>(key, value, [](auto, std::string_view v) {
      return parse_method(v);
    });
  } else if (key == "modulation") {
    cfg.modulation = std::string(value);
  } else if (key == "mc.samples") {
    cfg.mc.n_samples = parse_u64(key, value);
  } else if (key == "mc.seed") {
    cfg.mc.seed = parse_u64(key, value);
  } else if (key == "mc.batch") {
    cfg.mc.batch_size = static_cast<std::size_t>(parse_u64(key, value));
  } else if (key == "threads") {
    cfg.threads = static_cast<unsigned>(parse_u64(key, value));
  } else if (key == "timing") {
    cfg.timing = parse_bool(key, value);
  } else if (key == "output") {
    cfg.output_path = std::string(value);
  } else {
    throw ConfigError("unknown key '" + std::string(key) + "'");
  }
}

SweepConfig parse_config(std::string_view text) {
  SweepConfig cfg;
  int line_no = 0;
  for (auto line : split(text, '\n')) {
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw ConfigError("line " + std::to_string(line_no) + ": expected key = value");
    }
    try {
      apply_setting(cfg, line.substr(0, eq), line.substr(eq + 1));
    } catch (const ConfigError& e) {
      throw ConfigError("line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  return cfg;
}

SweepConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read config '" + path.string() + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str());
}

std::string config_reference() {
  const SweepConfig d;
  std::ostringstream out;
  out << "Config keys (one `key = value` per line, # starts a comment):\n"
      << "  k = 0, 3, 10        Rician K for both hops, one family per value (default 0)\n"
      << "  k2 = <K>            fix K of hop 2; hop 1 follows the k list (default unset)\n"
      << "  omega1 = <Omega>    hop 1 scale E[alpha^2] (default 1)\n"
      << "  omega2 = <Omega>    hop 2 scale E[beta^2] (default 1)\n"
      << "  n = 2, 10           RIS element counts (default 10)\n"
      << "  snr_db = a:b:step   average SNR grid in dB, inclusive (default 0:30:1)\n"
      << "  metrics = ...       asep, cap-nocsi, cap-csi, cap-asymptote (default cap-nocsi)\n"
      << "  methods = ...       closed, quad, mc (default closed)\n"
      << "  modulation = bpsk   bpsk, qpsk, 8psk, 16psk, 64psk, 4qam, 8qam, 16qam, 64qam\n"
      << "  mc.samples = N      Monte Carlo draws per point (default " << d.mc.n_samples << ")\n"
      << "  mc.seed = S         Monte Carlo root seed (default " << d.mc.seed << ")\n"
      << "  mc.batch = B        draws per kernel batch (default " << d.mc.batch_size << ")\n"
      << "  threads = T         worker threads, 0 = RISCALC_THREADS or all cores (default 0)\n"
      << "  timing = false      fill the runtime_ms column (default false)\n"
      << "  output = path.csv   CSV destination (default stdout)\n";
  return out.str();
}

bool supported(Metric metric, Method method) {
  return metric != Metric::cap_asymptote || method == Method::closed;
}

ResultRow evaluate_point(Metric metric, Method method, const channel::LinkModel& link,
                         double snr_db, const metrics::ModulationScheme& mod,
                         const montecarlo::McConfig& mc, bool timing) {
  ResultRow row;
  row.metric = metric;
  row.method = method;
  row.K1 = link.hop1.K;
  row.K2 = link.hop2.K;
  row.omega1 = link.hop1.Omega;
  row.omega2 = link.hop2.Omega;
  row.N = link.n_elements;
  row.snr_db = snr_db;
  const auto start = std::chrono::steady_clock::now();
  try {
    if (!supported(metric, method)) {
      throw UnsupportedParameters(std::string(to_string(metric)) + " has no " +
                                  std::string(to_string(method)) + " method");
    }
    const double gamma_bar = metrics::db_to_linear(snr_db);
    const channel::GammaFit fit = channel::gamma_fit(link);
    switch (metric) {
      case Metric::asep:
        if (method == Method::closed) {
          row.value = metrics::asep_closed_form(fit, gamma_bar, mod);
        } else if (method == Method::quad) {
          row.value = metrics::asep_quadrature(fit, gamma_bar, mod);
        } else {
          const auto est = montecarlo::mc_asep(link, gamma_bar, mod, mc);
          row.value = est.mean;
          row.std_error = est.std_error;
        }
        break;
      case Metric::cap_nocsi:
        if (method == Method::closed) {
          row.value = metrics::capacity_no_csi(fit, gamma_bar);
        } else if (method == Method::quad) {
          row.value = metrics::capacity_no_csi_quadrature(fit, gamma_bar);
        } else {
          const auto est = montecarlo::mc_capacity_no_csi(link, gamma_bar, mc);
          row.value = est.mean;
          row.std_error = est.std_error;
        }
        break;
      case Metric::cap_csi: {
        const double gamma0 = metrics::waterfilling_cutoff(fit, gamma_bar).gamma0;
        if (method == Method::closed) {
          row.value = metrics::capacity_csi_at_cutoff(fit, gamma_bar, gamma0);
        } else if (method == Method::quad) {
          row.value = metrics::capacity_csi_quadrature(fit, gamma_bar, gamma0);
        } else {
          const auto est = montecarlo::mc_capacity_csi(link, gamma_bar, gamma0, mc);
          row.value = est.capacity.mean;
          row.std_error = est.capacity.std_error;
        }
        break;
      }
      case Metric::cap_asymptote:
        row.value = metrics::capacity_no_csi_low_snr(fit, gamma_bar);
        break;
    }
    row.underflow = row.value == 0.0 && method != Method::mc;
  } catch (const std::exception& e) {
    row.value = std::nan("");
    row.std_error.reset();
    row.error = e.what();
  }
  if (timing) {
    row.runtime_ms =
        std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
  }
  return row;
}

std::vector<ResultRow> run_sweep(const SweepConfig& cfg) {
  cfg.validate();
  const metrics::ModulationScheme mod = metrics::find_modulation(cfg.modulation);
  const std::vector<double> grid = cfg.snr_grid();

  struct Task {
    Metric metric;
    Method method;
    channel::LinkModel link;
    double snr_db;
  };
  std::vector<Task> tasks;
  for (Metric metric : cfg.metrics) {
    for (Method method : cfg.methods) {
      if (!supported(metric, method)) continue;
      for (double k : cfg.k_values) {
        for (int n : cfg.n_values) {
          const channel::LinkModel link{{k, cfg.omega1}, {cfg.k2.value_or(k), cfg.omega2}, n};
          for (double snr : grid) tasks.push_back({metric, method, link, snr});
        }
      }
    }
  }

  const unsigned threads = static_cast<unsigned>(
      std::min<std::size_t>(montecarlo::resolve_threads(cfg.threads), tasks.size()));
  montecarlo::McConfig mc = cfg.mc;
  if (threads > 1) mc.threads = 1;
  else if (mc.threads == 0) mc.threads = cfg.threads;

  std::vector<ResultRow> rows(tasks.size());
  std::atomic<std::size_t> next{0};
  const auto worker = [&] {
    for (std::size_t i = next++; i < tasks.size(); i = next++) {
      const Task& t = tasks[i];
      rows[i] = evaluate_point(t.metric, t.method, t.link, t.snr_db, mod, mc, cfg.timing);
    }
  };
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  return rows;
}

std::string format_csv(const std::vector<ResultRow>& rows) {
  std::string out(kCsvHeader);
  out += '\n';
  for (const auto& r : rows) {
    out += to_string(r.metric);
    out += ',';
    out += to_string(r.method);
    for (double v : {r.K1, r.K2, r.omega1, r.omega2}) {
      out += ',';
      out += format_number(v);
    }
    out += ',' + std::to_string(r.N);
    out += ',' + format_number(r.snr_db);
    out += ',' + format_number(r.value);
    out += ',';
    if (r.std_error) out += format_number(*r.std_error);
    out += ',';
    if (r.runtime_ms) out += format_number(*r.runtime_ms);
    out += '\n';
  }
  return out;
}

void emit_csv(const std::vector<ResultRow>& rows, const std::filesystem::path& path) {
  if (rows.empty()) throw ConfigError("emit_csv: no rows");
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write '" + path.string() + "'");
  const std::string text = format_csv(rows);
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  out.close();
  if (!out) throw IoError("write failed for '" + path.string() + "'");
}

std::vector<ResultRow> parse_csv(std::string_view text) {
  auto lines = split(text, '\n');
  if (lines.empty() || lines.front() != kCsvHeader) throw ConfigError("csv: unexpected header");
  std::vector<ResultRow> rows;
  for (std::size_t i = 1; i < lines.size(); ++i) {
    if (lines[i].empty()) continue;
    const auto f = split(lines[i], ',');
    if (f.size() != 11) throw ConfigError("csv line " + std::to_string(i + 1) + ": expected 11 fields");
    const auto num = [&](std::string_view v) {
      if (v == "nan") return std::nan("");
      return parse_double("csv", v);
    };
    ResultRow r;
    r.metric = parse_metric(f[0]);
    r.method = parse_method(f[1]);
    r.K1 = num(f[2]);
    r.K2 = num(f[3]);
    r.omega1 = num(f[4]);
    r.omega2 = num(f[5]);
    r.N = static_cast<int>(parse_u64("csv", f[6]));
    r.snr_db = num(f[7]);
    r.value = num(f[8]);
    if (!f[9].empty()) r.std_error = num(f[9]);
    if (!f[10].empty()) r.runtime_ms = num(f[10]);
    rows.push_back(std::move(r));
  }
  return rows;
}

}  // namespace riscalc::sweep
