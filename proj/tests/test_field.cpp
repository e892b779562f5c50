#include <doctest.h>

#include <cmath>
#include <random>
#include <sstream>

#include "zkdamper/error.hpp"
#include "zkdamper/field.hpp"

using namespace zkdamper;

namespace {

ScalarField sinsin(const Grid2D& g) {
  auto f = ScalarField::from_function(
      g, [&](double x, double y) { return std::sin(M_PI * x / g.L()) * std::sin(M_PI * y / g.L()); });
  f.zero_boundary();
  return f;
}

}  // namespace

TEST_CASE("grid geometry") {
  const Grid2D g(2.0, 9, 4);
  CHECK(g.dx() == doctest::Approx(0.2));
  CHECK(g.dy() == doctest::Approx(0.4));
  CHECK(g.node_count() == 11u * 6u);
  CHECK(g.interior_index(1, 1) == 0u);
  CHECK(g.interior_index(2, 1) == 1u);
  CHECK(g.interior_index(1, 2) == 9u);
  CHECK_THROWS_AS(Grid2D(1.0, 3, 8), ConfigError);
  CHECK_THROWS_AS(Grid2D(0.0, 8, 8), ConfigError);
}

TEST_CASE("interior round trip and arithmetic") {
  const Grid2D g(1.0, 5, 6);
  std::mt19937_64 rng(1);
  std::normal_distribution<double> N;
  ScalarField f(g);
  std::vector<double> v(g.interior_count());
  for (auto& x : v) x = N(rng);
  f.set_interior(v);
  CHECK(f.interior() == v);
  CHECK(f.satisfies_dirichlet());
  auto h = 2.0 * f - f;
  CHECK(h == f);
  auto p = hadamard(f, f);
  CHECK(p(3, 2) == doctest::Approx(f(3, 2) * f(3, 2)));
  CHECK_THROWS_AS(f += ScalarField(Grid2D(1.0, 5, 5)), GridMismatchError);
  f(0, 3) = 1.0;
  CHECK_FALSE(f.satisfies_dirichlet());
  f.values()[5] = std::nan("");
  CHECK_FALSE(f.all_finite());
}

TEST_CASE("coefficient builder examples") {
  const Grid2D g(1.0, 31, 31);
  auto one = build_coefficient(g, CoefficientSpec{Rect{}, 0.0, 1.0, 0.0});
  CHECK(one.max_abs() == 1.0);
  CHECK(integrate(one) == doctest::Approx(1.0).epsilon(1e-14));

  auto zero = build_coefficient(g, CoefficientSpec{Rect{}, 0.0, 0.0, 0.0});
  CHECK(zero.max_abs() == 0.0);

  auto half = build_coefficient(g, CoefficientSpec{Rect{0.0, 0.5, 0.0, 1.0}, 0.0, 2.0, 0.0});
  for (int j = 0; j <= 32; ++j)
    for (int i = 0; i <= 32; ++i) CHECK(half(i, j) == (g.x(i) <= 0.5 ? 2.0 : 0.0));
  CHECK(std::abs(integrate(half) - 1.0) <= 2.0 * g.dx());

  CHECK_THROWS_AS(build_coefficient(g, CoefficientSpec{Rect{0.4, 0.4, 0.0, 1.0}, 0.0, 1.0, 0.0}),
                  ConfigError);
  CHECK_THROWS_AS(build_coefficient(g, CoefficientSpec{Rect{}, 2.0, 1.0, 0.0}), ConfigError);
}

TEST_CASE("coefficient profile is nonnegative and respects the floor (random specs)") {
  const Grid2D g(1.5, 20, 17);
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> U(0.0, 1.0);
  for (int k = 0; k < 200; ++k) {
    double x0 = 1.2 * U(rng), y0 = 1.2 * U(rng);
    Rect r{x0, x0 + 0.2 + 0.3 * U(rng), y0, y0 + 0.2 + 0.3 * U(rng)};
    const double amp = 3 * U(rng);
    const double floor = amp * U(rng);
    const auto a = build_coefficient(g, CoefficientSpec{r, floor, amp, 0.3 * U(rng)});
    for (int j = 0; j <= g.ny() + 1; ++j)
      for (int i = 0; i <= g.nx() + 1; ++i) {
        CHECK(a(i, j) >= 0.0);
        if (g.x(i) >= r.x0 && g.x(i) <= r.x1 && g.y(j) >= r.y0 && g.y(j) <= r.y1)
          CHECK(a(i, j) >= floor);
        CHECK(a(i, j) <= amp);
      }
  }
}

TEST_CASE("ramp decays linearly away from the region") {
  const Grid2D g(1.0, 19, 19);
  const auto a = build_coefficient(g, CoefficientSpec{Rect{0.0, 0.5, 0.0, 1.0}, 0.0, 1.0, 0.2});
  CHECK(a(10, 10) == doctest::Approx(1.0));    // x = 0.5
  CHECK(a(11, 10) == doctest::Approx(0.75));   // x = 0.55
  CHECK(a(13, 10) == doctest::Approx(0.25));   // x = 0.65
  CHECK(a(14, 10) == doctest::Approx(0.0));    // x = 0.7
}

TEST_CASE("weighted integrals") {
  const Grid2D g(1.0, 40, 40);
  const ScalarField one(g, 1.0);
  CHECK(std::abs(integrate_weighted(one, one, 2) - 1.0) <= 1e-14);
  const auto s = sinsin(g);
  CHECK(integrate_weighted(one, s, 2) == doctest::Approx(0.25).epsilon(1e-3));
  CHECK(integrate_weighted(ScalarField(g), s, 3) == 0.0);
  CHECK_THROWS_AS(integrate_weighted(ScalarField(Grid2D(1.0, 4, 4)), s, 2), GridMismatchError);
  CHECK_THROWS_AS(integrate_weighted(one, s, 4), ConfigError);
}

TEST_CASE("constant quadrature is exact") {
  for (double L : {0.5, 1.0, 3.0}) {
    const Grid2D g(L, 13, 7);
    const double c = 1.7;
    const ScalarField f(g, c);
    CHECK(std::abs(integrate_weighted(ScalarField(g, 1.0), f, 2) - c * c * L * L) <=
          1e-14 * c * c * L * L);
  }
}

TEST_CASE("norms of the sin-sin mode") {
  const Grid2D g(1.0, 63, 63);
  const auto n = norms(sinsin(g));
  CHECK(std::abs(n.l2 - 0.5) <= 1e-3);
  CHECK(std::abs(n.l3 - std::pow(4.0 / (3.0 * M_PI), 2.0 / 3.0)) <= 2e-3);
  CHECK(std::abs(n.h1_semi - M_PI / std::sqrt(2.0)) <= 2e-3);
  const auto z = norms(ScalarField(g));
  CHECK(z.l2 == 0.0);
  CHECK(z.h1_semi == 0.0);
  CHECK(z.l3 == 0.0);
}

TEST_CASE("second order convergence of the discrete norms") {
  auto err_h1 = [](int n) {
    return std::abs(norms(sinsin(Grid2D(1.0, n, n))).h1_semi - M_PI / std::sqrt(2.0));
  };
  auto err_l2 = [](int n) {
    const Grid2D g(1.0, n, n);
    auto f = ScalarField::from_function(g, [](double x, double y) { return std::exp(x) * (1 + y); });
    return std::abs(norms(f).l2 - std::sqrt((std::exp(2.0) - 1.0) / 2.0 * 7.0 / 3.0));
  };
  for (int n : {15, 31}) {
    const double r1 = err_h1(n) / err_h1(2 * n + 1);
    const double r2 = err_l2(n) / err_l2(2 * n + 1);
    CHECK(r1 == doctest::Approx(4.0).epsilon(0.2));
    CHECK(r2 == doctest::Approx(4.0).epsilon(0.2));
  }
}

TEST_CASE("field text format round trip") {
  const Grid2D g(1.25, 6, 5);
  std::mt19937_64 rng(9);
  std::normal_distribution<double> N;
  ScalarField f(g);
  for (auto& v : f.values()) v = N(rng);
  std::stringstream ss;
  write_field(ss, f);
  std::string first;
  std::getline(ss, first);
  CHECK(first == "6 5 1.25");
  ss.seekg(0);
  CHECK(read_field(ss) == f);

  std::istringstream bad("6 5 1\n1 2 3\n");
  CHECK_THROWS_AS(read_field(bad), ConfigError);
}
