#include <doctest.h>

#include <cmath>
#include <functional>
#include <random>

#include "zkdamper/diagnostics.hpp"
#include "zkdamper/error.hpp"
#include "zkdamper/stepper.hpp"

using namespace zkdamper;

namespace {

ScalarField random_state(const Grid2D& g, std::mt19937_64& rng) {
  std::normal_distribution<double> N;
  ScalarField f(g);
  std::vector<double> v(g.interior_count());
  for (auto& x : v) x = N(rng);
  f.set_interior(v);
  return f;
}

DelayLine random_line(const Grid2D& g, std::mt19937_64& rng, double h, int n) {
  std::vector<ScalarField> past;
  for (int k = 0; k < n; ++k) past.push_back(random_state(g, rng));
  return DelayLine::from_snapshots(random_state(g, rng), past, h, n, 0.01,
                                   DelayTransport::kCrankNicolson);
}

std::vector<EnergyRecord> synthetic(std::function<double(double)> E, int n, double T) {
  std::vector<EnergyRecord> out;
  for (int k = 0; k <= n; ++k) {
    EnergyRecord r;
    r.t = T * k / n;
    r.E_total = E(r.t);
    out.push_back(r);
  }
  return out;
}

}  // namespace

TEST_CASE("energy examples") {
  const Grid2D g(1.0, 11, 11);
  const ScalarField one(g, 1.0);
  const auto frozen1 = DelayLine::frozen(one, 1.0, 4, 0.01, DelayTransport::kCrankNicolson);
  CHECK(energy(one, frozen1, EnergyWeights{EnergyMode::kMu, one, 2.0, 1.0}).total ==
        doctest::Approx(1.5).epsilon(1e-14));
  const auto frozen2 = DelayLine::frozen(one, 2.0, 4, 0.01, DelayTransport::kCrankNicolson);
  CHECK(energy(one, frozen2, EnergyWeights{EnergyMode::kZk, one, 1.0, 2.0}).total ==
        doctest::Approx(1.5).epsilon(1e-14));
  CHECK(energy(one, frozen2, EnergyWeights{EnergyMode::kPerturbed, one, 2.0, 2.0}).total ==
        doctest::Approx(2.5).epsilon(1e-14));
  const ScalarField zero(g);
  const auto zline = DelayLine::frozen(zero, 1.0, 4, 0.01, DelayTransport::kCrankNicolson);
  CHECK(energy(zero, zline, EnergyWeights{EnergyMode::kMu, one, 1.0, 1.0}).total == 0.0);
  CHECK_THROWS_AS(energy(one, frozen1, EnergyWeights{EnergyMode::kMu, std::nullopt, 1.0, 1.0}),
                  ConfigError);
  CHECK_THROWS_AS(energy_mode_from_string("total"), ConfigError);
  CHECK(std::string(to_string(energy_mode_from_string("perturbed"))) == "perturbed");
}

TEST_CASE("energy parts add up") {
  std::mt19937_64 rng(1);
  const Grid2D g(1.0, 9, 8);
  const auto w = build_coefficient(g, CoefficientSpec{Rect{0.2, 0.6, 0.0, 1.0}, 0.0, 2.0, 0.1});
  for (int k = 0; k < 30; ++k) {
    const auto line = random_line(g, rng, 1.3, 5);
    const auto e = energy(random_state(g, rng), line, EnergyWeights{EnergyMode::kMu, w, 1.2, 1.3});
    CHECK(e.state >= 0.0);
    CHECK(e.delay >= 0.0);
    CHECK(std::abs(e.total - (e.state + e.delay)) <= 1e-12 * e.total);
  }
}

TEST_CASE("Lyapunov pieces") {
  const Grid2D g(1.0, 15, 15);
  const ScalarField one(g, 1.0);
  const auto line = DelayLine::frozen(one, 1.0, 4, 0.01, DelayTransport::kCrankNicolson);
  const auto v = lyapunov(one, line, 0.1, 0.2, one, 1.0);
  CHECK(v.V1 == doctest::Approx(0.5).epsilon(1e-13));
  CHECK(v.V2 == doctest::Approx(0.25).epsilon(1e-13));
  CHECK(v.V == doctest::Approx(1.0 + 0.05 + 0.05).epsilon(1e-13));

  std::mt19937_64 rng(2);
  const auto z = random_state(g, rng);
  const auto l = random_line(g, rng, 1.0, 4);
  const EnergyWeights w{EnergyMode::kPerturbed, one, 2.0, 1.0};
  const double E = energy(z, l, w).total;
  CHECK(lyapunov(z, l, 0.0, 0.0, one, E).V == E);
}

TEST_CASE("Lyapunov sandwich on random states") {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> U(0.0, 1.0);
  for (int k = 0; k < 50; ++k) {
    const double L = 0.5 + 2.0 * U(rng), h = 0.3 + 2.0 * U(rng), xi = 1.0 + 3.0 * U(rng);
    const Grid2D g(L, 8, 9);
    const auto b = build_coefficient(
        g, CoefficientSpec{Rect{0.0, L * U(rng) + 0.1, 0.0, L}, 0.0, 0.1 + U(rng), 0.0});
    const auto z = random_state(g, rng);
    const auto line = random_line(g, rng, h, 6);
    const double eta = U(rng), sigma = U(rng);
    const double E = energy(z, line, EnergyWeights{EnergyMode::kPerturbed, b, xi, h}).total;
    const double V = lyapunov(z, line, eta, sigma, b, E).V;
    CHECK(E <= V);
    CHECK(V <= (1.0 + std::max(2.0 * eta * L, sigma / xi)) * E);
  }
}

TEST_CASE("trace fluxes") {
  const Grid2D g(1.0, 20, 20);
  const auto fx = ScalarField::from_function(
      g, [](double x, double y) { return x * (1.0 - x) * std::sin(M_PI * y); });
  CHECK(boundary_fluxes(fx).x0 == doctest::Approx(0.5).epsilon(1e-12));
  const auto fy = ScalarField::from_function(
      g, [](double x, double y) { return std::sin(M_PI * x) * y * (1.0 - y); });
  CHECK(boundary_fluxes(fy).y0 == doctest::Approx(0.5).epsilon(1e-12));
  const auto z = boundary_fluxes(ScalarField(g));
  CHECK(z.x0 == 0.0);
  CHECK(z.y0 == 0.0);
}

TEST_CASE("decay rate fit") {
  const auto rec = synthetic([](double t) { return 2.0 * std::exp(-0.3 * t); }, 200, 10.0);
  const auto f = fit_decay_rate(rec, std::pair{0.0, 10.0});
  CHECK(std::abs(f.rate - 0.3) <= 1e-12);
  CHECK(std::abs(f.intercept - std::log(2.0)) <= 1e-12);
  CHECK(f.residual <= 1e-12);
  CHECK(std::abs(fit_decay_rate(rec).rate - 0.3) <= 1e-12);

  const auto flat = synthetic([](double) { return 0.7; }, 50, 1.0);
  CHECK(std::abs(fit_decay_rate(flat).rate) <= 1e-15);

  const auto zero = synthetic([](double) { return 0.0; }, 50, 1.0);
  CHECK_THROWS_AS(fit_decay_rate(zero), Error);
  const auto short_run = synthetic([](double t) { return std::exp(-t); }, 12, 1.0);
  CHECK_THROWS_AS(fit_decay_rate(short_run), Error);
  CHECK_THROWS_AS(fit_decay_rate(rec, std::pair{3.0, 3.0}), Error);
}

TEST_CASE("observability ratio") {
  std::vector<EnergyRecord> zero(20);
  for (std::size_t k = 0; k < zero.size(); ++k) zero[k].t = 0.1 * k;
  CHECK(observability_ratio(zero, 1.0).status == ObservabilityStatus::kUndefined);

  auto lonely = zero;
  for (auto& r : lonely) r.l2sq_state = 1.0;
  const auto v = observability_ratio(lonely, 1.0);
  CHECK(v.status == ObservabilityStatus::kViolation);
  CHECK_FALSE(v.K_emp.has_value());
  CHECK(v.lhs == doctest::Approx(1.0));

  const Grid2D g(1.0, 12, 12);
  const auto a = build_coefficient(g, CoefficientSpec{Rect{0.0, 0.5, 0.0, 1.0}, 0.5, 1.0, 0.1});
  auto z0 = ScalarField::from_function(g, [](double x, double y) {
    return 0.01 * std::sin(M_PI * x) * std::sin(2 * M_PI * y);
  });
  z0.zero_boundary();
  RunSpec spec{PhysicalParams{}, Feedback::mu(a, 1.0, 0.5), a, SchemeConfig{}, 4, z0, {},
               EnergyWeights{EnergyMode::kMu, a, 1.0, 1.0}, LyapunovSpec{}, std::nullopt};
  spec.scheme.dt = 0.01;
  spec.scheme.t_end = 2.0;
  spec.scheme.nonlinear = false;
  const auto traj = simulate(spec);
  const auto r = observability_ratio(traj.records, 2.0);
  REQUIRE(r.status == ObservabilityStatus::kOk);
  CHECK(*r.K_emp > 0.0);
  CHECK(std::isfinite(*r.K_emp));
}

TEST_CASE("Gagliardo-Nirenberg ratio") {
  const Grid2D g(1.0, 127, 127);
  auto s = ScalarField::from_function(
      g, [](double x, double y) { return std::sin(M_PI * x) * std::sin(M_PI * y); });
  s.zero_boundary();
  const double r = gn_ratio(s);
  CHECK(std::abs(r - 0.6815) <= 2e-3);
  CHECK(std::abs(gn_ratio(10.0 * ScalarField(s)) - r) <= 1e-12 * r);
  CHECK(gn_estimate(g, {}) == r);

  std::mt19937_64 rng(4);
  std::vector<ScalarField> ens;
  for (int k = 0; k < 5; ++k) ens.push_back(random_state(Grid2D(1.0, 127, 127), rng));
  const double c = gn_estimate(g, ens);
  CHECK(c >= r);
  std::vector<ScalarField> scaled;
  for (const auto& f : ens) scaled.push_back(3.0 * ScalarField(f));
  CHECK(std::abs(gn_estimate(g, scaled) - c) <= 1e-12 * c);
  CHECK_THROWS_AS(gn_ratio(ScalarField(g)), Error);
}
