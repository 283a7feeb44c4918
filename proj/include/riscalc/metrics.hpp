#pragma once

// Closed-form link metrics under the Gamma fit (Meijer-G forms), their
// defining integrals evaluated by adaptive quadrature, and the water-filling
// cutoff solver.

#include <string>
#include <string_view>
#include <vector>

#include "riscalc/channel.hpp"

namespace riscalc::metrics {

/// Unified error-probability form p Q(sqrt(2 q gamma)).
struct ModulationScheme {
  std::string name;
  double p = 1.0;
  double q = 1.0;

  void validate() const;
};

/// bpsk, M-PSK and rectangular M-QAM for M in {4, 8, 16, 64}.
std::vector<ModulationScheme> modulation_catalog();

/// Case-insensitive catalog lookup; throws ConfigError if unknown.
ModulationScheme find_modulation(std::string_view name);

enum class CapacityMode { with_csi, without_csi, low_snr_asymptote };
enum class Method { closed_form, quadrature };

struct CapacityPoint {
  double gamma_bar_db = 0.0;
  double value_bits = 0.0;
  CapacityMode mode = CapacityMode::without_csi;
  Method method = Method::closed_form;
};

struct CutoffResult {
  double gamma0 = 0.0;
  double residual = 0.0;  // |constraint(gamma0) - 1|
  int iterations = 0;
};

/// Values below this magnitude are reported as exactly zero.
inline constexpr double kUnderflowFloor = 1e-300;

double asep_closed_form(const channel::GammaFit& fit, double gamma_bar,
                        const ModulationScheme& mod);
double asep_quadrature(const channel::GammaFit& fit, double gamma_bar,
                       const ModulationScheme& mod);

double capacity_no_csi(const channel::GammaFit& fit, double gamma_bar);
double capacity_no_csi_quadrature(const channel::GammaFit& fit, double gamma_bar);
double capacity_no_csi_low_snr(const channel::GammaFit& fit, double gamma_bar);

/// (1/gamma0) P(gamma > gamma0) - E[1/gamma; gamma > gamma0] in closed form.
double waterfilling_constraint(const channel::GammaFit& fit, double gamma_bar, double gamma0);
/// Same quantity by direct quadrature of the defining integral.
double waterfilling_constraint_quadrature(const channel::GammaFit& fit, double gamma_bar,
                                          double gamma0);

/// Solves waterfilling_constraint = 1. Throws SolverError on bracket failure.
CutoffResult waterfilling_cutoff(const channel::GammaFit& fit, double gamma_bar);

double capacity_csi(const channel::GammaFit& fit, double gamma_bar);
/// Closed form given the cutoff.
double capacity_csi_at_cutoff(const channel::GammaFit& fit, double gamma_bar, double gamma0);
double capacity_csi_quadrature(const channel::GammaFit& fit, double gamma_bar, double gamma0);

/// Closed form with an explicit G-function argument, so alternative argument
/// conventions can be compared against the quadrature.
double capacity_csi_with_argument(const channel::GammaFit& fit, double g_argument);

CapacityPoint evaluate_capacity(const channel::GammaFit& fit, double gamma_bar_db,
                                CapacityMode mode, Method method);

double db_to_linear(double db);

}  // namespace riscalc::metrics
