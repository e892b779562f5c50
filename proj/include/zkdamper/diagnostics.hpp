#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "zkdamper/delay.hpp"
#include "zkdamper/field.hpp"

namespace zkdamper {

// Which energy functional a run reports.
//   kZk:        (1/2)|zeta|^2 + (h/2)   int int b z^2
//   kPerturbed: (1/2)|zeta|^2 + (xi h/2) int int b z^2
//   kMu:        (1/2)|zeta|^2 + (xi/2)  int int a z^2
enum class EnergyMode { kZk, kPerturbed, kMu };

const char* to_string(EnergyMode mode);
EnergyMode energy_mode_from_string(const std::string& name);

struct EnergyWeights {
  EnergyMode mode = EnergyMode::kMu;
  // b for kZk / kPerturbed, a for kMu.
  std::optional<ScalarField> weight;
  double xi = 1.0;
  double h = 1.0;

  double factor() const;
};

struct EnergyParts {
  double state;
  double delay;
  double total;
};

// Throws ConfigError when the weight field is missing.
EnergyParts energy(const ScalarField& zeta, const DelayLine& line, const EnergyWeights& weights);

struct LyapunovParts {
  double V;
  double V1;
  double V2;
};

// V1 = int x zeta^2, V2 = (h/2) int int (1 - rho) weight z^2, V = E + eta V1 + sigma V2.
LyapunovParts lyapunov(const ScalarField& zeta, const DelayLine& line, double eta, double sigma,
                       const ScalarField& weight, double energy_total);

struct TraceFluxes {
  double x0;  // int (d_x zeta(0,y))^2 dy
  double y0;  // int (d_y zeta(x,0))^2 dx
};

// Second-order one-sided trace derivatives using the zero boundary value.
TraceFluxes boundary_fluxes(const ScalarField& zeta);

struct EnergyRecord {
  double t = 0.0;
  double E_total = 0.0;
  double E_state = 0.0;
  double E_delay = 0.0;
  double V_lyap = 0.0;
  double V1 = 0.0;
  double V2 = 0.0;
  double flux_x0 = 0.0;
  double flux_y0 = 0.0;
  double linf_state = 0.0;
  // Not part of the CSV; feed the observability ratio.
  double l2sq_state = 0.0;       // int zeta^2
  double damped_state = 0.0;     // int a zeta^2
  double damped_delayed = 0.0;   // int a zeta(t-h)^2
};

struct LyapunovSpec {
  double eta = 0.0;
  double sigma = 0.0;
  std::optional<ScalarField> weight;  // defaults to the energy weight
};

EnergyRecord make_record(double t, const ScalarField& zeta, const DelayLine& line,
                         const EnergyWeights& weights, const LyapunovSpec& lyap,
                         const ScalarField& damping_region);

struct RateFit {
  double rate;       // negated slope of ln E; positive means decay
  double intercept;  // ln E at t = 0
  double residual;   // root-mean-square residual of the log fit
};

// Least-squares fit of ln E against t over samples with t in [t_a, t_b].
// Throws Error on non-positive energies or fewer than 10 samples.
RateFit fit_decay_rate(std::span<const double> t, std::span<const double> E, double t_a,
                       double t_b);
// Default window: the last 60% of the trajectory.
RateFit fit_decay_rate(const std::vector<EnergyRecord>& records,
                       std::optional<std::pair<double, double>> window = std::nullopt);

enum class ObservabilityStatus { kOk, kViolation, kUndefined };

struct ObservabilityResult {
  double lhs;
  double rhs;
  std::optional<double> K_emp;
  ObservabilityStatus status;
};

// lhs = int_0^T |zeta|^2, rhs = int flux_x0 + int flux_y0 + int int a (zeta^2 + zeta(t-h)^2),
// time integrals by the trapezoid rule over the records with t <= T.
ObservabilityResult observability_ratio(const std::vector<EnergyRecord>& records, double T);

// |f|_{L3} / (|f|_{H1}^{1/3} |f|_{L2}^{2/3}) with the full H1 norm.
double gn_ratio(const ScalarField& f);
// Max of gn_ratio over the ensemble plus the sin(pi x/L) sin(pi y/L) mode on
// `grid`. Throws Error for a zero field.
double gn_estimate(const Grid2D& grid, std::span<const ScalarField> ensemble);

}  // namespace zkdamper
