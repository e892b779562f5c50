#pragma once

#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "zkdamper/certificate.hpp"
#include "zkdamper/delay.hpp"
#include "zkdamper/diagnostics.hpp"
#include "zkdamper/field.hpp"
#include "zkdamper/operators.hpp"

namespace zkdamper {

struct SchemeConfig {
  double dt = 1e-3;
  double t_end = 1.0;
  double solver_tol = 1e-10;
  int record_stride = 1;
  int snapshot_stride = 0;  // 0 disables state dumps
  bool nonlinear = true;
  FluxForm flux = FluxForm::kConservative;
  DelayTransport transport = DelayTransport::kCrankNicolson;

  // dt in (0, kMaxDt], t_end >= dt, solver_tol in (0, 1e-6], strides >= 0/1.
  void validate() const;

  static constexpr double kMaxDt = 0.1;
};

struct SimState {
  ScalarField zeta;
  DelayLine history;
  double t = 0.0;
  // Nonlinear flux of the previous step, for the two-step extrapolation.
  std::optional<ScalarField> last_flux;
};

enum class StepStatus { kOk, kBlowUp };

// Crank---Nicolson on the linear part (dispersion, instantaneous and delayed
// feedback, rho-transport), Adams---Bashforth-2 on the nonlinear flux:
//   (I + dt/2 B) zeta+ = (I - dt/2 B) zeta - dt/2 e (z_end + z_end+) - dt N*
// with B = alpha D3x + gamma D1x D2y + diag(damping), e = delayed feedback and
// z_end+ = g zeta+ + r taken from the history line. The left matrix is
// factored once.
class ImexStepper {
 public:
  ImexStepper(const PhysicalParams& params, const Feedback& feedback, const SchemeConfig& scheme,
              const DelayLine& history);
  ~ImexStepper();
  ImexStepper(ImexStepper&&) noexcept;
  ImexStepper& operator=(ImexStepper&&) noexcept;

  StepStatus step(SimState& state) const;

  static constexpr double kBlowUp = 1e6;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

enum class RunStatus { kCompleted, kBlowUp, kSolverFailure };
const char* to_string(RunStatus status);

struct Envelope {
  double theta;
  double kappa;
  double tolerance = 1.05;
};

struct RunSpec {
  PhysicalParams params;
  Feedback feedback;
  // Damping coefficient a; weights the observability integrals.
  ScalarField damping_region;
  SchemeConfig scheme;
  int n_rho = 8;
  ScalarField zeta0;
  // Past states, oldest first; empty means frozen history.
  std::vector<ScalarField> history;
  EnergyWeights energy;
  LyapunovSpec lyapunov;
  std::optional<Envelope> envelope;
};

struct Trajectory {
  std::vector<EnergyRecord> records;
  std::vector<std::pair<double, ScalarField>> snapshots;
  RunStatus status = RunStatus::kCompleted;
  std::size_t envelope_violations = 0;
  std::string message;
};

Trajectory simulate(const RunSpec& spec);

// Stacked (zeta interior, z_1 interior, ..., z_n interior) vector used by the
// generator; needs a line with cell_count() == n_rho.
Eigen::VectorXd pack_state(const ScalarField& zeta, const DelayLine& line);

struct OracleScenario {
  PhysicalParams params;
  ScalarField a;
  Feedback feedback;
  double xi = 1.0;
  int n_rho = 4;
  ScalarField zeta0;
  double T = 1.0;
  double dt = 1e-3;
};

struct OracleResult {
  double relative_error;       // at dt
  double relative_error_half;  // at dt/2
  double ratio;                // relative_error / relative_error_half
  double exact_norm;
};

// Linear mode only. Compares the stepper at dt and dt/2 with exp(T A) U(0)
// for the assembled generator A. Throws ConfigError above 2000 unknowns.
OracleResult oracle_compare(const OracleScenario& scenario);

// Runs the stepper (linear, cn transport) from zeta0 with frozen history and
// returns the packed state at T.
Eigen::VectorXd propagate_linear(const OracleScenario& scenario, double dt);

}  // namespace zkdamper
