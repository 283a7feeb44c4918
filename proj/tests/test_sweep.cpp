#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "oracle_values.hpp"
#include "riscalc/errors.hpp"
#include "riscalc/sweep.hpp"
#include "test_util.hpp"

using namespace riscalc;
using namespace riscalc::sweep;

namespace {

std::string read_file(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

const std::filesystem::path kSource = std::filesystem::path(RISCALC_TEST_DATA_DIR).parent_path();

}  // namespace

TEST_CASE("config parsing") {
  const SweepConfig cfg = parse_config(
      "# comment\n"
      "k = 0, 3 ,10\n"
      "k2 = 1\n"
      "omega1 = 2  # trailing\n"
      "n = 2,10\n"
      "snr_db = -10:30:10\n"
      "metrics = asep, cap-csi\n"
      "methods = closed,mc\n"
      "modulation = 16QAM\n"
      "mc.samples = 5000\n"
      "mc.seed = 9\n"
      "threads = 2\n"
      "timing = true\n");
  CHECK(cfg.k_values == std::vector<double>{0.0, 3.0, 10.0});
  CHECK(cfg.k2 == 1.0);
  CHECK(cfg.omega1 == 2.0);
  CHECK(cfg.omega2 == 1.0);
  CHECK(cfg.n_values == std::vector<int>{2, 10});
  CHECK(cfg.snr_grid() == std::vector<double>{-10.0, 0.0, 10.0, 20.0, 30.0});
  CHECK(cfg.metrics == std::vector<Metric>{Metric::asep, Metric::cap_csi});
  CHECK(cfg.methods == std::vector<Method>{Method::closed, Method::mc});
  CHECK(cfg.mc.n_samples == 5000);
  CHECK(cfg.mc.seed == 9);
  CHECK(cfg.threads == 2);
  CHECK(cfg.timing);
  CHECK_NOTHROW(cfg.validate());
}

TEST_CASE("config validation names the field") {
  const auto message = [](const std::string& text) {
    try {
      parse_config(text).validate();
    } catch (const ConfigError& e) {
      return std::string(e.what());
    }
    return std::string();
  };
  CHECK(message("snr_db = 0:5:10\n").find("snr_db") != std::string::npos);
  CHECK(message("snr_db = 5:0:1\n").find("snr_db") != std::string::npos);
  CHECK(message("snr_db = 0:5:0\n").find("snr_db") != std::string::npos);
  CHECK(message("k = -1\n").find("k:") != std::string::npos);
  CHECK(message("n = 0\n").find("n:") != std::string::npos);
  CHECK(message("metrics = cap-asymptote\nmethods = quad\n").find("methods") != std::string::npos);
  CHECK(message("modulation = ook\n").find("ook") != std::string::npos);
  CHECK(message("mc.samples = 10\n").find("mc") != std::string::npos);
  CHECK(message("colour = red\n").find("colour") != std::string::npos);
  CHECK(message("k = 1,,2\n").find("line 1") != std::string::npos);
  CHECK(message("k 3\n").find("line 1") != std::string::npos);
  CHECK(message("metrics = \n").find("metrics") != std::string::npos);
}

TEST_CASE("grid ordering and error rows") {
  SweepConfig cfg = parse_config(
      "k = 10, 0\nn = 10, 2\nsnr_db = 0:20:10\nmetrics = cap-csi, cap-asymptote\n"
      "methods = quad, closed\n");
  const auto rows = run_sweep(cfg);
  // cap-asymptote has no quad row
  CHECK(rows.size() == 2 * 2 * 2 * 3 + 2 * 2 * 3);
  CHECK(rows.front().metric == Metric::cap_csi);
  CHECK(rows.front().method == Method::quad);
  CHECK(rows.front().K1 == 10.0);
  CHECK(rows.front().N == 10);
  CHECK(rows[1].snr_db == 10.0);
  CHECK(rows[3].N == 2);
  CHECK(rows.back().metric == Metric::cap_asymptote);
  for (const auto& r : rows) CHECK(r.ok());

  const auto bad = evaluate_point(Metric::cap_asymptote, Method::mc,
                                  channel::LinkModel::symmetric(3.0, 10), 0.0,
                                  metrics::find_modulation("bpsk"), {});
  CHECK_FALSE(bad.ok());
  CHECK(std::isnan(bad.value));
}

TEST_CASE("CSV format") {
  ResultRow r;
  r.metric = Metric::cap_nocsi;
  r.method = Method::mc;
  r.K1 = 3.0;
  r.K2 = 3.0;
  r.N = 10;
  r.snr_db = -12.5;
  r.value = 1.0 / 3.0;
  r.std_error = 2.0e-5 / 7.0;
  const std::string text = format_csv({r});
  CHECK(text ==
        "metric,method,K1,K2,omega1,omega2,N,snr_db,value,std_error,runtime_ms\n"
        "cap-nocsi,mc,3,3,1,1,10,-12.5,0.333333333333,2.85714285714e-06,\n");
  CHECK(text.find('\r') == std::string::npos);

  const auto back = parse_csv(text);
  REQUIRE(back.size() == 1);
  CHECK(format_csv(back) == text);
  CHECK(back[0].value == doctest::Approx(1.0 / 3.0).epsilon(1e-12));
  CHECK_FALSE(back[0].runtime_ms.has_value());

  const auto tmp = std::filesystem::temp_directory_path() / "riscalc_csv_test.csv";
  emit_csv({r}, tmp);
  CHECK(read_file(tmp) == text);
  std::filesystem::remove(tmp);
  CHECK_THROWS_AS(emit_csv({r}, "/nonexistent-dir/x.csv"), IoError);
  CHECK_THROWS_AS(emit_csv({}, tmp), ConfigError);
}

TEST_CASE("sweeps are deterministic") {
  SweepConfig cfg = parse_config(
      "k = 3\nn = 2, 10\nsnr_db = 0:20:10\nmetrics = asep, cap-nocsi, cap-csi\n"
      "methods = closed, mc\nmc.samples = 20000\nmc.seed = 77\n");
  cfg.threads = 1;
  const std::string one = format_csv(run_sweep(cfg));
  CHECK(one == format_csv(run_sweep(cfg)));
  cfg.threads = 3;
  CHECK(one == format_csv(run_sweep(cfg)));
  cfg.mc.seed = 78;
  CHECK(one != format_csv(run_sweep(cfg)));
}

TEST_CASE("capacity sweep matches the frozen golden file") {
  const SweepConfig cfg = load_config(kSource / "configs" / "capacity_n10.cfg");
  const auto rows = run_sweep(cfg);
  const auto golden = parse_csv(read_file(kSource / "tests" / "golden" / "capacity_n10.csv"));
  REQUIRE(rows.size() == golden.size());
  double worst = 0.0;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    CHECK(rows[i].metric == golden[i].metric);
    CHECK(rows[i].method == golden[i].method);
    CHECK(rows[i].K1 == golden[i].K1);
    CHECK(rows[i].N == golden[i].N);
    CHECK(rows[i].snr_db == golden[i].snr_db);
    worst = std::max(worst, testutil::rel_err(rows[i].value, golden[i].value));
  }
  CHECK(worst < 1e-10);

  // anchor a few golden rows to the independent integrals
  int anchored = 0;
  for (const auto& g : golden) {
    if (g.K1 != 3.0 || g.N != 10) continue;
    const bool nocsi = g.metric == Metric::cap_nocsi;
    if (g.snr_db == 0.0) {
      CHECK(testutil::rel_err(g.value, nocsi ? oracle::kCapNoCsi_K3N10_0dB : oracle::kCapCsi_K3N10_0dB) < 1e-8);
      ++anchored;
    } else if (g.snr_db == 10.0) {
      CHECK(testutil::rel_err(g.value, nocsi ? oracle::kCapNoCsi_K3N10_10dB : oracle::kCapCsi_K3N10_10dB) < 1e-8);
      ++anchored;
    }
  }
  CHECK(anchored == 8);
}
