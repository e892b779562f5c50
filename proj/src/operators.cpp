#include "zkdamper/operators.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include <Eigen/Eigenvalues>

#include "zkdamper/error.hpp"

namespace zkdamper {

namespace {

// Value of f at column k of row j, k in [-1, nx+2], under the given closure.
double x_value(const ScalarField& f, int k, int j, Closure closure) {
  const int nx = f.grid().nx();
  if (closure == Closure::kDirichlet) {
    if (k <= 0 || k == nx + 1) {
      if (k == -1) return -f(1, j);
      return 0.0;
    }
    if (k == nx + 2) return f(nx, j);
    return f(k, j);
  }
  if (k == -1) return 4.0 * f(0, j) - 6.0 * f(1, j) + 4.0 * f(2, j) - f(3, j);
  if (k == nx + 2)
    return 4.0 * f(nx + 1, j) - 6.0 * f(nx, j) + 4.0 * f(nx - 1, j) - f(nx - 2, j);
  return f(k, j);
}

double node_value(const ScalarField& f, int i, int j, Closure closure) {
  const Grid2D& g = f.grid();
  if (closure == Closure::kDirichlet &&
      (i == 0 || j == 0 || i == g.nx() + 1 || j == g.ny() + 1))
    return 0.0;
  return f(i, j);
}

}  // namespace

ScalarField apply_dispersive(const ScalarField& f, const PhysicalParams& params, Closure closure) {
  const Grid2D& g = f.grid();
  const double dx = g.dx(), dy = g.dy();
  const double c3 = params.alpha / (2.0 * dx * dx * dx);
  const double cxy = params.gamma / (2.0 * dx * dy * dy);
  ScalarField out(g);
  for (int j = 1; j <= g.ny(); ++j) {
    for (int i = 1; i <= g.nx(); ++i) {
      const double d3 = x_value(f, i + 2, j, closure) - 2.0 * x_value(f, i + 1, j, closure) +
                        2.0 * x_value(f, i - 1, j, closure) - x_value(f, i - 2, j, closure);
      auto d2y = [&](int k) {
        return node_value(f, k, j + 1, closure) - 2.0 * node_value(f, k, j, closure) +
               node_value(f, k, j - 1, closure);
      };
      out(i, j) = c3 * d3 + cxy * (d2y(i + 1) - d2y(i - 1));
    }
  }
  return out;
}

ScalarField nonlinear_flux(const ScalarField& zeta, FluxForm form) {
  const Grid2D& g = zeta.grid();
  const double dx = g.dx();
  ScalarField out(g);
  for (int j = 1; j <= g.ny(); ++j) {
    for (int i = 1; i <= g.nx(); ++i) {
      const double up = zeta(i + 1, j), dn = zeta(i - 1, j);
      const double dsq = (up * up - dn * dn) / (2.0 * dx);
      if (form == FluxForm::kConservative) {
        out(i, j) = 0.5 * dsq;
      } else {
        out(i, j) = (dsq + zeta(i, j) * (up - dn) / (2.0 * dx)) / 3.0;
      }
    }
  }
  return out;
}

Feedback Feedback::ab(const ScalarField& a, const ScalarField& b) {
  require_same_grid(a, b);
  return {a, b};
}

Feedback Feedback::mu(const ScalarField& a, double mu1, double mu2) {
  return {mu1 * ScalarField(a), mu2 * ScalarField(a)};
}

Eigen::SparseMatrix<double> dispersive_matrix(const Grid2D& g, const PhysicalParams& params) {
  const int nx = g.nx(), ny = g.ny();
  const double dx = g.dx(), dy = g.dy();
  const double c3 = params.alpha / (2.0 * dx * dx * dx);
  const double cxy = params.gamma / (2.0 * dx * dy * dy);
  std::vector<Eigen::Triplet<double>> trips;
  trips.reserve(g.interior_count() * 11);

  for (int j = 1; j <= ny; ++j) {
    for (int i = 1; i <= nx; ++i) {
      const auto row = static_cast<int>(g.interior_index(i, j));
      auto add = [&](int ci, int cj, double v) {
        if (ci < 1 || ci > nx || cj < 1 || cj > ny) return;
        trips.emplace_back(row, static_cast<int>(g.interior_index(ci, cj)), v);
      };
      // D3x stencil (1, -2, 0, 2, -1) on columns i+2, i+1, i, i-1, i-2.
      const int offs[4] = {2, 1, -1, -2};
      const double coef[4] = {1.0, -2.0, 2.0, -1.0};
      for (int s = 0; s < 4; ++s) {
        const int k = i + offs[s];
        if (k == -1) {
          add(1, j, -c3 * coef[s]);
        } else if (k == nx + 2) {
          add(nx, j, c3 * coef[s]);
        } else {
          add(k, j, c3 * coef[s]);
        }
      }
      // D1x D2y
      for (int side : {1, -1}) {
        const int k = i + side;
        const double s = side * cxy;
        add(k, j + 1, s);
        add(k, j, -2.0 * s);
        add(k, j - 1, s);
      }
    }
  }
  Eigen::SparseMatrix<double> m(static_cast<int>(g.interior_count()),
                                static_cast<int>(g.interior_count()));
  m.setFromTriplets(trips.begin(), trips.end());
  return m;
}

Eigen::MatrixXd GeneratorMatrix::dense() const {
  if (size() > kMaxDense) throw ConfigError("generator too large for dense operations");
  return Eigen::MatrixXd(matrix);
}

GeneratorMatrix assemble_generator(const PhysicalParams& params, const ScalarField& a,
                                   const Feedback& feedback, double xi, int n_rho) {
  params.validate();
  require_same_grid(a, feedback.damping);
  require_same_grid(a, feedback.delayed);
  if (n_rho < 2) throw ConfigError("n_rho must be at least 2");
  const Grid2D& g = a.grid();
  const std::size_t M = g.interior_count();
  const std::size_t N = M * static_cast<std::size_t>(n_rho + 1);
  if (N > 2'000'000) throw ConfigError("generator dimension too large");

  const Eigen::SparseMatrix<double> D = dispersive_matrix(g, params);
  std::vector<Eigen::Triplet<double>> trips;
  trips.reserve(D.nonZeros() + 4 * N);
  for (int k = 0; k < D.outerSize(); ++k)
    for (Eigen::SparseMatrix<double>::InnerIterator it(D, k); it; ++it)
      trips.emplace_back(static_cast<int>(it.row()), static_cast<int>(it.col()), -it.value());

  const auto damping = feedback.damping.interior();
  const auto delayed = feedback.delayed.interior();
  const int last = static_cast<int>(M) * n_rho;
  const double rate = n_rho / params.h;
  for (std::size_t p = 0; p < M; ++p) {
    const int ip = static_cast<int>(p);
    if (damping[p] != 0.0) trips.emplace_back(ip, ip, -damping[p]);
    if (delayed[p] != 0.0) trips.emplace_back(ip, last + ip, -delayed[p]);
    for (int k = 1; k <= n_rho; ++k) {
      const int row = k * static_cast<int>(M) + ip;
      trips.emplace_back(row, row, -rate);
      trips.emplace_back(row, row - static_cast<int>(M), rate);
    }
  }

  GeneratorMatrix G;
  G.matrix.resize(static_cast<int>(N), static_cast<int>(N));
  G.matrix.setFromTriplets(trips.begin(), trips.end());
  G.n_rho = n_rho;
  G.state_size = M;
  G.history_weight = xi * a.max_abs();
  G.weights.resize(static_cast<Eigen::Index>(N));
  const double cell = g.dx() * g.dy();
  G.weights.head(static_cast<Eigen::Index>(M)).setConstant(cell);
  G.weights.tail(static_cast<Eigen::Index>(N - M)).setConstant(G.history_weight * cell / n_rho);
  return G;
}

double dissipativity_gap(const GeneratorMatrix& G, double lambda) {
  const Eigen::MatrixXd A = G.dense();
  const auto n = A.rows();
  std::vector<Eigen::Index> keep;
  for (Eigen::Index k = 0; k < n; ++k)
    if (G.weights[k] > 0.0) keep.push_back(k);
  // Rows with weight feed the form; if they read zero-weight entries the
  // form is unbounded on the weighted space.
  for (Eigen::Index r : keep)
    for (Eigen::Index c = 0; c < n; ++c)
      if (G.weights[c] == 0.0 && A(r, c) != 0.0) return std::numeric_limits<double>::infinity();

  const auto m = static_cast<Eigen::Index>(keep.size());
  Eigen::MatrixXd S(m, m);
  for (Eigen::Index r = 0; r < m; ++r) {
    const double wr = std::sqrt(G.weights[keep[r]]);
    for (Eigen::Index c = 0; c < m; ++c)
      S(r, c) = wr * A(keep[r], keep[c]) / std::sqrt(G.weights[keep[c]]);
  }
  Eigen::MatrixXd sym = 0.5 * (S + S.transpose());
  sym.diagonal().array() -= lambda;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(sym, Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success) throw SolverError("symmetric eigensolver did not converge");
  return es.eigenvalues().maxCoeff();
}

}  // namespace zkdamper
