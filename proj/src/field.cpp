#include "zkdamper/field.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <ostream>

#include <fmt/format.h>

#include "zkdamper/error.hpp"

namespace zkdamper {

Grid2D::Grid2D(double L, int nx, int ny)
    : L_(L), nx_(nx), ny_(ny), dx_(L / (nx + 1)), dy_(L / (ny + 1)) {
  if (!(L > 0.0) || !std::isfinite(L)) throw ConfigError("grid length must be positive");
  if (nx < 4 || ny < 4) throw ConfigError("grid needs at least 4 interior nodes per axis");
}

ScalarField::ScalarField(const Grid2D& grid, double value)
    : grid_(grid), values_(grid.node_count(), value) {}

ScalarField::ScalarField(const Grid2D& grid, std::vector<double> values)
    : grid_(grid), values_(std::move(values)) {
  if (values_.size() != grid_.node_count())
    throw GridMismatchError("value count does not match grid");
}

double ScalarField::max_abs() const {
  double m = 0.0;
  for (double v : values_) m = std::max(m, std::abs(v));
  return m;
}

bool ScalarField::all_finite() const {
  return std::all_of(values_.begin(), values_.end(), [](double v) { return std::isfinite(v); });
}

bool ScalarField::satisfies_dirichlet() const {
  const int nx = grid_.nx(), ny = grid_.ny();
  for (int i = 0; i <= nx + 1; ++i)
    if ((*this)(i, 0) != 0.0 || (*this)(i, ny + 1) != 0.0) return false;
  for (int j = 0; j <= ny + 1; ++j)
    if ((*this)(0, j) != 0.0 || (*this)(nx + 1, j) != 0.0) return false;
  return true;
}

void ScalarField::zero_boundary() {
  const int nx = grid_.nx(), ny = grid_.ny();
  for (int i = 0; i <= nx + 1; ++i) (*this)(i, 0) = (*this)(i, ny + 1) = 0.0;
  for (int j = 0; j <= ny + 1; ++j) (*this)(0, j) = (*this)(nx + 1, j) = 0.0;
}

std::vector<double> ScalarField::interior() const {
  std::vector<double> out(grid_.interior_count());
  for (int j = 1; j <= grid_.ny(); ++j)
    for (int i = 1; i <= grid_.nx(); ++i) out[grid_.interior_index(i, j)] = (*this)(i, j);
  return out;
}

void ScalarField::set_interior(std::span<const double> v) {
  if (v.size() != grid_.interior_count()) throw GridMismatchError("interior size mismatch");
  for (int j = 1; j <= grid_.ny(); ++j)
    for (int i = 1; i <= grid_.nx(); ++i) (*this)(i, j) = v[grid_.interior_index(i, j)];
}

ScalarField& ScalarField::operator+=(const ScalarField& other) {
  require_same_grid(*this, other);
  for (std::size_t k = 0; k < values_.size(); ++k) values_[k] += other.values_[k];
  return *this;
}

ScalarField& ScalarField::operator-=(const ScalarField& other) {
  require_same_grid(*this, other);
  for (std::size_t k = 0; k < values_.size(); ++k) values_[k] -= other.values_[k];
  return *this;
}

ScalarField& ScalarField::operator*=(double s) {
  for (double& v : values_) v *= s;
  return *this;
}

void ScalarField::axpy(double s, const ScalarField& x) {
  require_same_grid(*this, x);
  for (std::size_t k = 0; k < values_.size(); ++k) values_[k] += s * x.values_[k];
}

ScalarField operator+(ScalarField a, const ScalarField& b) { return a += b; }
ScalarField operator-(ScalarField a, const ScalarField& b) { return a -= b; }
ScalarField operator*(double s, ScalarField a) { return a *= s; }

ScalarField hadamard(const ScalarField& a, const ScalarField& b) {
  require_same_grid(a, b);
  ScalarField out(a);
  auto ov = out.values();
  auto bv = b.values();
  for (std::size_t k = 0; k < ov.size(); ++k) ov[k] *= bv[k];
  return out;
}

void require_same_grid(const ScalarField& a, const ScalarField& b) {
  if (!(a.grid() == b.grid())) throw GridMismatchError("fields live on different grids");
}

ScalarField build_coefficient(const Grid2D& grid, const CoefficientSpec& spec) {
  const Rect& r = spec.region;
  const double L = grid.L();
  const double ix0 = std::max(r.x0, 0.0), ix1 = std::min(r.x1, L);
  const double iy0 = std::max(r.y0, 0.0), iy1 = std::min(r.y1, L);
  if (!(ix1 > ix0 && iy1 > iy0)) throw ConfigError("coefficient region does not intersect the domain");
  if (!(spec.floor >= 0.0)) throw ConfigError("coefficient floor must be nonnegative");
  if (!(spec.amplitude >= spec.floor)) throw ConfigError("coefficient amplitude below its floor");
  if (!(spec.ramp >= 0.0)) throw ConfigError("coefficient ramp must be nonnegative");

  return ScalarField::from_function(grid, [&](double x, double y) {
    const double dist = std::max({r.x0 - x, x - r.x1, r.y0 - y, y - r.y1, 0.0});
    if (dist == 0.0) return spec.amplitude;
    if (spec.ramp == 0.0) return 0.0;
    return spec.amplitude * std::max(0.0, 1.0 - dist / spec.ramp);
  });
}

namespace {

// Second-order nodal derivative along one axis: centered inside, one-sided
// at the two end nodes.
double nodal_derivative(double fm2, double fm1, double f0, double fp1, double fp2, int pos,
                        int last, double d) {
  if (pos == 0) return (-3.0 * f0 + 4.0 * fp1 - fp2) / (2.0 * d);
  if (pos == last) return (3.0 * f0 - 4.0 * fm1 + fm2) / (2.0 * d);
  return (fp1 - fm1) / (2.0 * d);
}

// Row sums first, grid spacing applied once at the end.
template <class F>
double trapezoid(const Grid2D& g, F&& value) {
  double s = 0.0;
  for (int j = 0; j <= g.ny() + 1; ++j) {
    double row = 0.0;
    for (int i = 0; i <= g.nx() + 1; ++i)
      row += (i == 0 || i == g.nx() + 1) ? 0.5 * value(i, j) : value(i, j);
    s += (j == 0 || j == g.ny() + 1) ? 0.5 * row : row;
  }
  return s * g.dx() * g.dy();
}

}  // namespace

double integrate(const ScalarField& f) {
  return trapezoid(f.grid(), [&](int i, int j) { return f(i, j); });
}

double integrate_weighted(const ScalarField& w, const ScalarField& f, int power) {
  require_same_grid(w, f);
  if (power < 1 || power > 3) throw ConfigError("power must be 1, 2 or 3");
  return trapezoid(f.grid(), [&](int i, int j) {
    const double v = f(i, j);
    return w(i, j) * (power == 1 ? v : (power == 2 ? v * v : v * v * v));
  });
}

Norms norms(const ScalarField& f) {
  const Grid2D& g = f.grid();
  const int lx = g.nx() + 1, ly = g.ny() + 1;
  auto at = [&](int i, int j) {
    i = std::clamp(i, 0, lx);
    j = std::clamp(j, 0, ly);
    return f(i, j);
  };
  const double l2 = trapezoid(g, [&](int i, int j) { return f(i, j) * f(i, j); });
  const double l3 = trapezoid(g, [&](int i, int j) { return std::abs(f(i, j)) * f(i, j) * f(i, j); });
  const double grad = trapezoid(g, [&](int i, int j) {
    const double v = f(i, j);
    const double fx = nodal_derivative(at(i - 2, j), at(i - 1, j), v, at(i + 1, j), at(i + 2, j),
                                       i, lx, g.dx());
    const double fy = nodal_derivative(at(i, j - 2), at(i, j - 1), v, at(i, j + 1), at(i, j + 2),
                                       j, ly, g.dy());
    return fx * fx + fy * fy;
  });
  return {std::sqrt(l2), std::sqrt(grad), std::cbrt(l3)};
}

void write_field(std::ostream& os, const ScalarField& f) {
  const Grid2D& g = f.grid();
  os << fmt::format("{} {} {:.17g}\n", g.nx(), g.ny(), g.L());
  for (int j = 0; j <= g.ny() + 1; ++j) {
    for (int i = 0; i <= g.nx() + 1; ++i) {
      if (i) os << ' ';
      os << fmt::format("{:.17g}", f(i, j));
    }
    os << '\n';
  }
}

ScalarField read_field(std::istream& is) {
  int nx = 0, ny = 0;
  double L = 0.0;
  if (!(is >> nx >> ny >> L)) throw ConfigError("field header must read 'nx ny L'");
  Grid2D grid(L, nx, ny);
  std::vector<double> values(grid.node_count());
  for (double& v : values)
    if (!(is >> v)) throw ConfigError("field file is truncated");
  ScalarField f(grid, std::move(values));
  if (!f.all_finite()) throw ConfigError("field file contains non-finite values");
  return f;
}

}  // namespace zkdamper
