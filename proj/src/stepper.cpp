#include "zkdamper/stepper.hpp"

#include <cmath>
#include <limits>

#include <Eigen/SparseLU>
#include <spdlog/spdlog.h>

#include "zkdamper/error.hpp"
#include "zkdamper/expm.hpp"

namespace zkdamper {

void SchemeConfig::validate() const {
  if (!(dt > 0.0)) throw ConfigError("dt must be positive");
  if (dt > kMaxDt) throw ConfigError("dt exceeds the sanity cap of 0.1");
  if (!(t_end >= dt)) throw ConfigError("t_end must be at least dt");
  if (!(solver_tol > 0.0 && solver_tol <= 1e-6)) throw ConfigError("solver_tol must lie in (0, 1e-6]");
  if (record_stride < 1) throw ConfigError("record_stride must be at least 1");
  if (snapshot_stride < 0) throw ConfigError("snapshot_stride must be nonnegative");
}

namespace {

Eigen::VectorXd to_vector(const ScalarField& f) {
  const auto v = f.interior();
  return Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
}

}  // namespace

struct ImexStepper::Impl {
  SchemeConfig scheme;
  Grid2D grid;
  Eigen::SparseMatrix<double> B;  // dispersion + instantaneous damping
  Eigen::VectorXd delayed;
  Eigen::SparseMatrix<double> lhs;
  Eigen::SparseLU<Eigen::SparseMatrix<double>> lu;

  Impl(const SchemeConfig& s, const Grid2D& g) : scheme(s), grid(g) {}
};

ImexStepper::ImexStepper(const PhysicalParams& params, const Feedback& feedback,
                         const SchemeConfig& scheme, const DelayLine& history)
    : impl_(std::make_unique<Impl>(scheme, feedback.damping.grid())) {
  params.validate();
  scheme.validate();
  require_same_grid(feedback.damping, feedback.delayed);
  if (!history.initialized()) throw ConfigError("stepper needs an initialized history");
  if (!(history.grid() == impl_->grid)) throw GridMismatchError("history grid differs from feedback grid");
  if (std::abs(history.dt() - scheme.dt) > 1e-14 * scheme.dt)
    throw ConfigError("history time step differs from the scheme time step");
  if (std::abs(history.h() - params.h) > 1e-14 * params.h)
    throw ConfigError("history delay differs from h");

  auto& im = *impl_;
  const auto M = static_cast<Eigen::Index>(im.grid.interior_count());
  Eigen::SparseMatrix<double> damp(M, M);
  {
    const auto d = feedback.damping.interior();
    std::vector<Eigen::Triplet<double>> t;
    for (Eigen::Index p = 0; p < M; ++p) t.emplace_back(p, p, d[static_cast<std::size_t>(p)]);
    damp.setFromTriplets(t.begin(), t.end());
  }
  im.B = dispersive_matrix(im.grid, params) + damp;
  im.delayed = to_vector(feedback.delayed);

  Eigen::SparseMatrix<double> gain(M, M);
  {
    const double g = history.end_gain();
    std::vector<Eigen::Triplet<double>> t;
    for (Eigen::Index p = 0; p < M; ++p) t.emplace_back(p, p, 1.0 + 0.5 * scheme.dt * g * im.delayed[p]);
    gain.setFromTriplets(t.begin(), t.end());
  }
  im.lhs = gain + (0.5 * scheme.dt) * im.B;
  im.lhs.makeCompressed();
  im.lu.analyzePattern(im.lhs);
  im.lu.factorize(im.lhs);
  if (im.lu.info() != Eigen::Success) throw SolverError("factorization of the implicit matrix failed");
}

ImexStepper::~ImexStepper() = default;
ImexStepper::ImexStepper(ImexStepper&&) noexcept = default;
ImexStepper& ImexStepper::operator=(ImexStepper&&) noexcept = default;

StepStatus ImexStepper::step(SimState& state) const {
  const auto& im = *impl_;
  const double dt = im.scheme.dt;
  const Eigen::VectorXd u = to_vector(state.zeta);

  std::optional<ScalarField> flux;
  Eigen::VectorXd rhs = u - (0.5 * dt) * (im.B * u);
  if (im.scheme.nonlinear) {
    flux = nonlinear_flux(state.zeta, im.scheme.flux);
    Eigen::VectorXd n = to_vector(*flux);
    if (state.last_flux) n = 1.5 * n - 0.5 * to_vector(*state.last_flux);
    rhs -= dt * n;
  }
  const auto response = state.history.end_response();
  const Eigen::VectorXd ends = to_vector(state.history.delayed()) + to_vector(response.offset);
  rhs -= (0.5 * dt) * im.delayed.cwiseProduct(ends);

  Eigen::VectorXd next = im.lu.solve(rhs);
  if (im.lu.info() != Eigen::Success) throw SolverError("implicit solve failed");
  const double res = (im.lhs * next - rhs).lpNorm<Eigen::Infinity>();
  if (!(res <= im.scheme.solver_tol * std::max(1.0, rhs.lpNorm<Eigen::Infinity>())))
    throw SolverError("implicit solve residual above tolerance");

  const double peak = next.size() ? next.lpNorm<Eigen::Infinity>() : 0.0;
  if (!std::isfinite(peak) || peak > kBlowUp) return StepStatus::kBlowUp;

  ScalarField zeta_new(im.grid);
  zeta_new.set_interior(std::span<const double>(next.data(), static_cast<std::size_t>(next.size())));
  state.history.push(zeta_new);
  state.zeta = std::move(zeta_new);
  state.last_flux = std::move(flux);
  state.t += dt;
  return StepStatus::kOk;
}

const char* to_string(RunStatus status) {
  switch (status) {
    case RunStatus::kCompleted: return "completed";
    case RunStatus::kBlowUp: return "blow-up";
    case RunStatus::kSolverFailure: return "solver-failure";
  }
  return "?";
}

Trajectory simulate(const RunSpec& spec) {
  spec.params.validate();
  spec.scheme.validate();
  if (!spec.zeta0.satisfies_dirichlet())
    throw ConfigError("initial state must vanish on the boundary");
  if (!spec.zeta0.all_finite()) throw ConfigError("initial state has non-finite values");

  SimState state{
      spec.zeta0,
      spec.history.empty()
          ? DelayLine::frozen(spec.zeta0, spec.params.h, spec.n_rho, spec.scheme.dt,
                              spec.scheme.transport)
          : DelayLine::from_snapshots(spec.zeta0, spec.history, spec.params.h, spec.n_rho,
                                      spec.scheme.dt, spec.scheme.transport),
      0.0, std::nullopt};
  const ImexStepper stepper(spec.params, spec.feedback, spec.scheme, state.history);

  Trajectory traj;
  const auto steps = static_cast<long long>(std::llround(spec.scheme.t_end / spec.scheme.dt));
  double E0 = 0.0;
  auto record = [&](long long n) {
    const double t = n * spec.scheme.dt;
    auto r = make_record(t, state.zeta, state.history, spec.energy, spec.lyapunov,
                         spec.damping_region);
    if (n == 0) E0 = r.E_total;
    if (spec.envelope) {
      const auto& env = *spec.envelope;
      const double bound = env.tolerance * env.kappa * E0 * std::exp(-2.0 * env.theta * t);
      if (r.E_total > bound) ++traj.envelope_violations;
    }
    traj.records.push_back(r);
  };
  record(0);
  if (spec.scheme.snapshot_stride > 0) traj.snapshots.emplace_back(0.0, state.zeta);

  for (long long n = 1; n <= steps; ++n) {
    StepStatus status;
    try {
      status = stepper.step(state);
    } catch (const SolverError& e) {
      traj.status = RunStatus::kSolverFailure;
      traj.message = e.what();
      spdlog::warn("run stopped at t = {}: {}", state.t, e.what());
      return traj;
    }
    if (status == StepStatus::kBlowUp) {
      traj.status = RunStatus::kBlowUp;
      traj.message = "state exceeded the blow-up threshold";
      spdlog::warn("blow-up detected at t = {}", state.t);
      return traj;
    }
    if (n % spec.scheme.record_stride == 0 || n == steps) record(n);
    if (spec.scheme.snapshot_stride > 0 && n % spec.scheme.snapshot_stride == 0)
      traj.snapshots.emplace_back(n * spec.scheme.dt, state.zeta);
  }
  return traj;
}

Eigen::VectorXd pack_state(const ScalarField& zeta, const DelayLine& line) {
  const auto M = static_cast<Eigen::Index>(zeta.grid().interior_count());
  const int n = line.cell_count();
  Eigen::VectorXd U(M * (n + 1));
  U.head(M) = to_vector(zeta);
  for (int k = 1; k <= n; ++k) U.segment(k * M, M) = to_vector(line.node(k));
  return U;
}

Eigen::VectorXd propagate_linear(const OracleScenario& sc, double dt) {
  SchemeConfig scheme;
  scheme.dt = dt;
  scheme.t_end = sc.T;
  scheme.nonlinear = false;
  scheme.transport = DelayTransport::kCrankNicolson;
  SimState state{sc.zeta0,
                 DelayLine::frozen(sc.zeta0, sc.params.h, sc.n_rho, dt, scheme.transport), 0.0,
                 std::nullopt};
  const ImexStepper stepper(sc.params, sc.feedback, scheme, state.history);
  const auto steps = std::llround(sc.T / dt);
  for (long long n = 0; n < steps; ++n)
    if (stepper.step(state) != StepStatus::kOk) throw SolverError("linear propagation blew up");
  return pack_state(state.zeta, state.history);
}

OracleResult oracle_compare(const OracleScenario& sc) {
  const auto G = assemble_generator(sc.params, sc.a, sc.feedback, sc.xi, sc.n_rho);
  if (G.size() > 2000) throw ConfigError("oracle comparison limited to 2000 unknowns");
  const auto line = DelayLine::frozen(sc.zeta0, sc.params.h, sc.n_rho, sc.dt,
                                      DelayTransport::kCrankNicolson);
  const Eigen::VectorXd U0 = pack_state(sc.zeta0, line);
  const Eigen::VectorXd exact = expm(sc.T * G.dense()) * U0;
  const double norm = exact.norm();

  auto rel = [&](const Eigen::VectorXd& approx) {
    const double diff = (approx - exact).norm();
    if (norm == 0.0) return diff == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
    return diff / norm;
  };
  const double e1 = rel(propagate_linear(sc, sc.dt));
  const double e2 = rel(propagate_linear(sc, sc.dt / 2.0));
  const double ratio = e2 > 0.0 ? e1 / e2 : std::numeric_limits<double>::quiet_NaN();
  return {e1, e2, ratio, norm};
}

}  // namespace zkdamper
