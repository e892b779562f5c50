#include <doctest.h>

#include <cmath>
#include <random>

#include <Eigen/Dense>

#include "zkdamper/error.hpp"
#include "zkdamper/stepper.hpp"

using namespace zkdamper;

namespace {

ScalarField random_state(const Grid2D& g, std::mt19937_64& rng, double scale = 1.0) {
  std::normal_distribution<double> N(0.0, scale);
  ScalarField f(g);
  std::vector<double> v(g.interior_count());
  for (auto& x : v) x = N(rng);
  f.set_interior(v);
  return f;
}

ScalarField bump(const Grid2D& g, double amp) {
  auto f = ScalarField::from_function(g, [&](double x, double y) {
    return amp * std::exp(-20.0 * ((x - 0.5) * (x - 0.5) + (y - 0.5) * (y - 0.5)));
  });
  f.zero_boundary();
  return f;
}

Eigen::VectorXd vec(const ScalarField& f) {
  const auto v = f.interior();
  return Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
}

double sumsq(const ScalarField& f) { return integrate_weighted(ScalarField(f.grid(), 1.0), f, 2); }

SchemeConfig linear_scheme(double dt, double t_end = 1.0) {
  SchemeConfig s;
  s.dt = dt;
  s.t_end = t_end;
  s.nonlinear = false;
  return s;
}

}  // namespace

TEST_CASE("scheme validation") {
  SchemeConfig s;
  CHECK_NOTHROW(s.validate());
  s.dt = 0.2;
  CHECK_THROWS_AS(s.validate(), ConfigError);
  s = SchemeConfig{};
  s.solver_tol = 1e-3;
  CHECK_THROWS_AS(s.validate(), ConfigError);
  s = SchemeConfig{};
  s.t_end = 1e-4;
  CHECK_THROWS_AS(s.validate(), ConfigError);
}

TEST_CASE("zero state is an equilibrium") {
  const Grid2D g(1.0, 8, 8);
  const ScalarField one(g, 1.0), zero(g);
  SchemeConfig s;
  s.dt = 0.01;
  SimState st{zero, DelayLine::frozen(zero, 1.0, 4, s.dt, s.transport), 0.0, std::nullopt};
  const ImexStepper stepper(PhysicalParams{}, Feedback::mu(one, 1.0, 0.5), s, st.history);
  for (int k = 0; k < 50; ++k) REQUIRE(stepper.step(st) == StepStatus::kOk);
  CHECK(st.zeta == zero);
  CHECK(st.t == doctest::Approx(0.5));
}

TEST_CASE("single linear step equals the assembled trapezoidal update") {
  std::mt19937_64 rng(3);
  const Grid2D g(1.0, 8, 8);
  const PhysicalParams p{1.0, 0.7, 1.0, 0.8};
  const auto a = build_coefficient(g, CoefficientSpec{Rect{0.1, 0.8, 0.2, 0.9}, 0.3, 1.1, 0.1});
  const auto fb = Feedback::mu(a, 1.0, 0.6);
  const int n = 4;
  const double dt = 0.01;
  const auto z0 = random_state(g, rng);
  std::vector<ScalarField> past;
  for (int k = 0; k < n; ++k) past.push_back(random_state(g, rng));
  SimState st{z0, DelayLine::from_snapshots(z0, past, p.h, n, dt, DelayTransport::kCrankNicolson),
              0.0, std::nullopt};
  const Eigen::VectorXd U0 = pack_state(st.zeta, st.history);

  const auto A = assemble_generator(p, a, fb, 1.0, n).dense();
  const auto I = Eigen::MatrixXd::Identity(A.rows(), A.cols());
  const Eigen::VectorXd want = (I - 0.5 * dt * A).lu().solve((I + 0.5 * dt * A) * U0);

  const ImexStepper stepper(p, fb, linear_scheme(dt), st.history);
  REQUIRE(stepper.step(st) == StepStatus::kOk);
  const Eigen::VectorXd got = pack_state(st.zeta, st.history);
  CHECK((got - want).norm() <= 1e-12 * want.norm());
}

TEST_CASE("nonlinear flux enters explicitly with a two-step extrapolation") {
  std::mt19937_64 rng(4);
  const Grid2D g(1.0, 8, 8);
  const PhysicalParams p;
  const ScalarField a(g, 1.0);
  const auto fb = Feedback::mu(a, 1.0, 0.5);
  const int n = 4;
  const double dt = 0.01;
  SchemeConfig s = linear_scheme(dt);
  s.nonlinear = true;
  SimState st{random_state(g, rng), DelayLine{}, 0.0, std::nullopt};
  st.history = DelayLine::frozen(st.zeta, p.h, n, dt, s.transport);

  const auto A = assemble_generator(p, a, fb, 1.0, n).dense();
  const auto I = Eigen::MatrixXd::Identity(A.rows(), A.cols());
  const auto M = static_cast<Eigen::Index>(g.interior_count());
  auto expected = [&](const Eigen::VectorXd& U, const Eigen::VectorXd& Nstar) {
    Eigen::VectorXd rhs = (I + 0.5 * dt * A) * U;
    rhs.head(M) -= dt * Nstar;
    return Eigen::VectorXd((I - 0.5 * dt * A).lu().solve(rhs));
  };

  const ImexStepper stepper(p, fb, s, st.history);
  const Eigen::VectorXd U0 = pack_state(st.zeta, st.history);
  const Eigen::VectorXd N0 = vec(nonlinear_flux(st.zeta));
  REQUIRE(stepper.step(st) == StepStatus::kOk);
  const Eigen::VectorXd U1 = pack_state(st.zeta, st.history);
  CHECK((U1 - expected(U0, N0)).norm() <= 1e-12 * U1.norm());

  const Eigen::VectorXd N1 = vec(nonlinear_flux(st.zeta));
  REQUIRE(stepper.step(st) == StepStatus::kOk);
  const Eigen::VectorXd U2 = pack_state(st.zeta, st.history);
  CHECK((U2 - expected(U1, 1.5 * N1 - 0.5 * N0)).norm() <= 1e-12 * U2.norm());
}

TEST_CASE("undamped linear dispersion never increases the state energy") {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 4; ++trial) {
    const Grid2D g(1.0 + trial * 0.3, 10 + trial, 9);
    const ScalarField zero(g);
    const double dt = 0.001 * (1 + 5 * trial);
    SimState st{random_state(g, rng), DelayLine{}, 0.0, std::nullopt};
    st.history = DelayLine::frozen(st.zeta, 1.0, 4, dt, DelayTransport::kCrankNicolson);
    const ImexStepper stepper(PhysicalParams{1.0, 0.5, g.L(), 1.0}, Feedback::ab(zero, zero),
                              linear_scheme(dt), st.history);
    double prev = sumsq(st.zeta);
    for (int k = 0; k < 100; ++k) {
      REQUIRE(stepper.step(st) == StepStatus::kOk);
      const double e = sumsq(st.zeta);
      CHECK(e <= prev * (1.0 + 1e-10));
      prev = e;
    }
  }
}

TEST_CASE("linear mu-system energy is non-increasing") {
  std::mt19937_64 rng(6);
  std::uniform_real_distribution<double> U(0.0, 1.0);
  for (int trial = 0; trial < 5; ++trial) {
    const Grid2D g(1.0, 10, 10);
    const PhysicalParams p{1.0, 1.0, 1.0, 0.5 + U(rng)};
    const double mu1 = 1.0, mu2 = 0.2 + 0.7 * U(rng);
    const auto iv = xi_interval_mu(mu1, mu2, p.h);
    const double xi = iv.lo + (iv.hi - iv.lo) * (0.05 + 0.9 * U(rng));
    const auto a = build_coefficient(g, CoefficientSpec{Rect{0.0, 0.6, 0.0, 1.0}, 0.5, 1.0, 0.1});
    const double dt = 0.005;
    SimState st{random_state(g, rng), DelayLine{}, 0.0, std::nullopt};
    st.history = DelayLine::frozen(random_state(g, rng), p.h, 6, dt, DelayTransport::kCrankNicolson);
    const ImexStepper stepper(p, Feedback::mu(a, mu1, mu2), linear_scheme(dt), st.history);
    const EnergyWeights w{EnergyMode::kMu, a, xi, p.h};
    double prev = energy(st.zeta, st.history, w).total;
    for (int k = 0; k < 200; ++k) {
      REQUIRE(stepper.step(st) == StepStatus::kOk);
      const double e = energy(st.zeta, st.history, w).total;
      CHECK(e <= prev * (1.0 + 1e-8));
      prev = e;
    }
  }
}

TEST_CASE("Gronwall bound with anti-damping and the nonlinearity on") {
  const Grid2D g(1.0, 16, 16);
  const PhysicalParams p;
  const ScalarField zero(g);
  const auto b = build_coefficient(g, CoefficientSpec{Rect{0.0, 1.0, 0.0, 0.5}, 0.0, 0.8, 0.0});
  const double xi = 1.5;
  for (auto form : {FluxForm::kConservative, FluxForm::kSkewSymmetric}) {
    RunSpec spec{p,
                 Feedback::ab(zero, b),
                 zero,
                 SchemeConfig{},
                 8,
                 bump(g, 0.05),
                 {},
                 EnergyWeights{EnergyMode::kPerturbed, b, xi, p.h},
                 LyapunovSpec{},
                 std::nullopt};
    spec.scheme.dt = 0.005;
    spec.scheme.t_end = 3.0;
    spec.scheme.flux = form;
    const auto traj = simulate(spec);
    REQUIRE(traj.status == RunStatus::kCompleted);
    const double E0 = traj.records.front().E_total;
    for (const auto& r : traj.records)
      CHECK(r.E_total <= std::exp(2.0 * xi * 0.8 * r.t) * E0 * (1.0 + 1e-3));
  }
}

TEST_CASE("oracle comparison on a tiny instance") {
  const Grid2D g(1.0, 6, 6);
  const ScalarField a(g, 1.0);
  auto z0 = ScalarField::from_function(g, [](double x, double y) {
    return std::sin(M_PI * x) * std::sin(M_PI * y);
  });
  z0.zero_boundary();
  const OracleScenario sc{PhysicalParams{}, a, Feedback::mu(a, 1.0, 0.5), 1.0, 3, z0, 0.5, 2.5e-4};
  const auto r = oracle_compare(sc);
  CHECK(r.relative_error <= 1e-3);
  CHECK(r.ratio >= 2.8);
  CHECK(r.ratio <= 5.2);

  const OracleScenario zero{PhysicalParams{}, a, Feedback::mu(a, 1.0, 0.5), 1.0, 3, ScalarField(g), 0.5, 2e-3};
  const auto rz = oracle_compare(zero);
  CHECK(rz.relative_error == 0.0);
  CHECK(rz.exact_norm == 0.0);

  const Grid2D big(1.0, 21, 21);
  const ScalarField ab(big, 1.0);
  const OracleScenario huge{PhysicalParams{}, ab, Feedback::mu(ab, 1.0, 0.5), 1.0, 4, ScalarField(big), 0.5, 2e-3};
  CHECK_THROWS_AS(oracle_compare(huge), ConfigError);
}

TEST_CASE("simulate on zero data records zeros") {
  const Grid2D g(1.0, 8, 8);
  const ScalarField one(g, 1.0), zero(g);
  RunSpec spec{PhysicalParams{}, Feedback::mu(one, 1.0, 0.5), one, SchemeConfig{}, 4, zero, {},
               EnergyWeights{EnergyMode::kMu, one, 1.0, 1.0}, LyapunovSpec{0.025, 0.25, std::nullopt},
               Envelope{0.0667, 1.25}};
  spec.scheme.dt = 0.01;
  spec.scheme.t_end = 0.5;
  spec.scheme.record_stride = 5;
  const auto traj = simulate(spec);
  CHECK(traj.status == RunStatus::kCompleted);
  CHECK(traj.records.size() == 11u);
  CHECK(traj.envelope_violations == 0u);
  for (const auto& r : traj.records) {
    CHECK(r.E_total == 0.0);
    CHECK(r.V_lyap == 0.0);
    CHECK(r.linf_state == 0.0);
  }
  for (std::size_t k = 1; k < traj.records.size(); ++k)
    CHECK(traj.records[k].t > traj.records[k - 1].t);
}

TEST_CASE("blow-up is detected and the partial trajectory kept") {
  const Grid2D g(1.0, 8, 8);
  const ScalarField zero(g), boost(g, -500.0);
  RunSpec spec{PhysicalParams{}, Feedback{boost, zero}, zero, SchemeConfig{}, 4, bump(g, 1.0), {},
               EnergyWeights{EnergyMode::kZk, zero, 1.0, 1.0}, LyapunovSpec{}, std::nullopt};
  spec.scheme.dt = 0.005;
  spec.scheme.t_end = 2.0;
  const auto traj = simulate(spec);
  CHECK(traj.status == RunStatus::kBlowUp);
  CHECK_FALSE(traj.records.empty());
  CHECK(traj.records.back().t < 2.0);
  CHECK(std::string(to_string(traj.status)) == "blow-up");
}

TEST_CASE("simulate rejects states off the boundary trace") {
  const Grid2D g(1.0, 8, 8);
  const ScalarField one(g, 1.0);
  RunSpec spec{PhysicalParams{}, Feedback::mu(one, 1.0, 0.5), one, SchemeConfig{}, 4, one, {},
               EnergyWeights{EnergyMode::kMu, one, 1.0, 1.0}, LyapunovSpec{}, std::nullopt};
  CHECK_THROWS_AS(simulate(spec), ConfigError);
}

TEST_CASE("characteristic transport runs with exact shifts and snapshots") {
  std::mt19937_64 rng(7);
  const Grid2D g(1.0, 8, 8);
  const ScalarField one(g, 1.0);
  RunSpec spec{PhysicalParams{}, Feedback::mu(one, 1.0, 0.5), one, SchemeConfig{}, 4,
               random_state(g, rng, 0.01), {}, EnergyWeights{EnergyMode::kMu, one, 1.0, 1.0},
               LyapunovSpec{}, std::nullopt};
  spec.scheme.dt = 0.025;
  spec.scheme.t_end = 2.0;
  spec.scheme.snapshot_stride = 10;
  spec.scheme.transport = DelayTransport::kCharacteristic;
  const auto traj = simulate(spec);
  CHECK(traj.status == RunStatus::kCompleted);
  CHECK(traj.snapshots.size() == 9u);
  CHECK(traj.records.back().E_total < traj.records.front().E_total);
}

TEST_CASE("stepper rejects a history with another time step") {
  const Grid2D g(1.0, 8, 8);
  const ScalarField one(g, 1.0);
  const auto line = DelayLine::frozen(one, 1.0, 4, 0.02, DelayTransport::kCrankNicolson);
  CHECK_THROWS_AS(ImexStepper(PhysicalParams{}, Feedback::mu(one, 1, 0.5), linear_scheme(0.01), line),
                  ConfigError);
}
