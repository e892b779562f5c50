#pragma once

#include <cstddef>
#include <iosfwd>
#include <span>
#include <vector>

namespace zkdamper {

// Uniform grid on (0,L)^2 with nx*ny interior nodes; node (i,j) sits at
// (i dx, j dy) for 0 <= i <= nx+1, 0 <= j <= ny+1.
class Grid2D {
 public:
  Grid2D(double L, int nx, int ny);

  double L() const { return L_; }
  int nx() const { return nx_; }
  int ny() const { return ny_; }
  double dx() const { return dx_; }
  double dy() const { return dy_; }
  double x(int i) const { return i * dx_; }
  double y(int j) const { return j * dy_; }

  std::size_t node_count() const { return static_cast<std::size_t>(nx_ + 2) * (ny_ + 2); }
  std::size_t interior_count() const { return static_cast<std::size_t>(nx_) * ny_; }
  std::size_t index(int i, int j) const {
    return static_cast<std::size_t>(j) * (nx_ + 2) + static_cast<std::size_t>(i);
  }
  // Position of interior node (i,j), 1 <= i <= nx, 1 <= j <= ny, in the
  // contiguous interior ordering (x fastest).
  std::size_t interior_index(int i, int j) const {
    return static_cast<std::size_t>(j - 1) * nx_ + static_cast<std::size_t>(i - 1);
  }

  friend bool operator==(const Grid2D&, const Grid2D&) = default;

 private:
  double L_;
  int nx_;
  int ny_;
  double dx_;
  double dy_;
};

// Nodal values on every node of a Grid2D, boundary included.
class ScalarField {
 public:
  explicit ScalarField(const Grid2D& grid, double value = 0.0);
  ScalarField(const Grid2D& grid, std::vector<double> values);

  template <class F>
  static ScalarField from_function(const Grid2D& grid, F&& f) {
    ScalarField out(grid);
    for (int j = 0; j <= grid.ny() + 1; ++j)
      for (int i = 0; i <= grid.nx() + 1; ++i) out(i, j) = f(grid.x(i), grid.y(j));
    return out;
  }

  const Grid2D& grid() const { return grid_; }
  double operator()(int i, int j) const { return values_[grid_.index(i, j)]; }
  double& operator()(int i, int j) { return values_[grid_.index(i, j)]; }
  std::span<const double> values() const { return values_; }
  std::span<double> values() { return values_; }

  double max_abs() const;
  bool all_finite() const;
  // True when every boundary node is exactly zero.
  bool satisfies_dirichlet() const;
  void zero_boundary();

  // Interior values in Grid2D::interior_index order, and the inverse.
  std::vector<double> interior() const;
  void set_interior(std::span<const double> v);

  ScalarField& operator+=(const ScalarField& other);
  ScalarField& operator-=(const ScalarField& other);
  ScalarField& operator*=(double s);
  // y += s * x
  void axpy(double s, const ScalarField& x);

  friend bool operator==(const ScalarField&, const ScalarField&) = default;

 private:
  Grid2D grid_;
  std::vector<double> values_;
};

ScalarField operator+(ScalarField a, const ScalarField& b);
ScalarField operator-(ScalarField a, const ScalarField& b);
ScalarField operator*(double s, ScalarField a);
// Pointwise product.
ScalarField hadamard(const ScalarField& a, const ScalarField& b);

// Throws GridMismatchError when the grids differ.
void require_same_grid(const ScalarField& a, const ScalarField& b);

// Axis-aligned rectangle [x0,x1] x [y0,y1].
struct Rect {
  double x0 = 0.0;
  double x1 = 1.0;
  double y0 = 0.0;
  double y1 = 1.0;
};

// Plateau profile: `amplitude` on the region, decaying linearly to zero over
// `ramp` (distance measured per axis, max norm). `floor` is the lower bound
// the plateau must respect on the region.
struct CoefficientSpec {
  Rect region;
  double floor = 0.0;
  double amplitude = 1.0;
  double ramp = 0.0;
};

ScalarField build_coefficient(const Grid2D& grid, const CoefficientSpec& spec);

// Composite trapezoid approximation of the integral of w * f^power, power in {1,2,3}.
double integrate_weighted(const ScalarField& w, const ScalarField& f, int power);
// Composite trapezoid approximation of the integral of f.
double integrate(const ScalarField& f);

struct Norms {
  double l2;
  double h1_semi;
  double l3;
};

Norms norms(const ScalarField& f);

// Plain-text matrix format: first line "nx ny L", then ny+2 rows of nx+2
// whitespace-separated values (row j holds nodes (0..nx+1, j)).
void write_field(std::ostream& os, const ScalarField& f);
ScalarField read_field(std::istream& is);

}  // namespace zkdamper
