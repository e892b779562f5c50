#include "zkdamper/expm.hpp"

#include <cmath>
#include <limits>

#include "zkdamper/error.hpp"

namespace zkdamper {

Eigen::MatrixXd expm(const Eigen::MatrixXd& A) {
  if (A.rows() != A.cols()) throw Error("expm needs a square matrix");
  const auto n = A.rows();
  const double norm = A.cwiseAbs().colwise().sum().maxCoeff();
  if (!std::isfinite(norm)) throw Error("expm of a non-finite matrix");
  int squarings = 0;
  if (norm > 0.5) squarings = static_cast<int>(std::ceil(std::log2(norm / 0.5)));
  const Eigen::MatrixXd scaled = A / std::ldexp(1.0, squarings);

  Eigen::MatrixXd sum = Eigen::MatrixXd::Identity(n, n);
  Eigen::MatrixXd term = Eigen::MatrixXd::Identity(n, n);
  const double eps = std::numeric_limits<double>::epsilon();
  for (int k = 1; k <= 60; ++k) {
    term = term * scaled / static_cast<double>(k);
    sum += term;
    if (term.cwiseAbs().maxCoeff() <= eps * sum.cwiseAbs().maxCoeff() * 1e-2) break;
  }
  for (int s = 0; s < squarings; ++s) sum = sum * sum;
  return sum;
}

}  // namespace zkdamper
