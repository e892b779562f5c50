#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include "zkdamper/certificate.hpp"
#include "zkdamper/field.hpp"

namespace zkdamper {

// How stencils reaching past the boundary obtain their ghost values.
enum class Closure {
  // zeta = 0 on every edge, odd reflection through x = 0 and even reflection
  // through x = L (d_x zeta(L) = 0). Makes the D3x block skew-symmetric up to
  // a positive diagonal in the two edge rows.
  kDirichlet,
  // Stored boundary values are used as-is and ghosts come from cubic
  // extrapolation. Only meant for stencil tests on polynomial fields.
  kPolynomial,
};

// alpha D3x f + gamma D1x D2y f at interior nodes (boundary entries are 0).
ScalarField apply_dispersive(const ScalarField& f, const PhysicalParams& params,
                             Closure closure = Closure::kDirichlet);

enum class FluxForm {
  kConservative,   // (1/2) D1x(zeta^2)
  kSkewSymmetric,  // (1/3) [D1x(zeta^2) + zeta D1x zeta]
};

ScalarField nonlinear_flux(const ScalarField& zeta, FluxForm form = FluxForm::kConservative);

// Linear feedback  zeta_t = ... - damping * zeta(t) - delayed * zeta(t - h).
struct Feedback {
  ScalarField damping;
  ScalarField delayed;

  // a zeta + b zeta(t-h)
  static Feedback ab(const ScalarField& a, const ScalarField& b);
  // a (mu1 zeta + mu2 zeta(t-h))
  static Feedback mu(const ScalarField& a, double mu1, double mu2);
};

// Matrix of f -> alpha D3x f + gamma D1x D2y f on interior unknowns
// (Dirichlet closure), in Grid2D::interior_index order.
Eigen::SparseMatrix<double> dispersive_matrix(const Grid2D& grid, const PhysicalParams& params);

// Linearized delayed generator acting on U = (zeta, z_1, ..., z_n), where z_k
// is the history on the k-th rho-cell and z_0 = zeta is the inflow value:
//   zeta' = -(alpha D3x + gamma D1x D2y) zeta - damping zeta - delayed z_n
//   z_k'  = -(n/h) (z_k - z_{k-1})
struct GeneratorMatrix {
  Eigen::SparseMatrix<double> matrix;
  // Diagonal of the weighted inner product: dx dy on zeta entries,
  // history_weight dx dy / n on history entries.
  Eigen::VectorXd weights;
  int n_rho = 0;
  std::size_t state_size = 0;
  double history_weight = 0.0;

  std::size_t size() const { return static_cast<std::size_t>(matrix.rows()); }
  // Dense copy; throws ConfigError above kMaxDense unknowns.
  Eigen::MatrixXd dense() const;

  static constexpr std::size_t kMaxDense = 5000;
};

// history weight = xi * ||a||_inf, as in the inner product of the state space.
GeneratorMatrix assemble_generator(const PhysicalParams& params, const ScalarField& a,
                                   const Feedback& feedback, double xi, int n_rho);

// Largest eigenvalue of the weighted symmetric part of (G - lambda I).
// Non-positive values certify that G - lambda I is dissipative.
double dissipativity_gap(const GeneratorMatrix& G, double lambda);

}  // namespace zkdamper
