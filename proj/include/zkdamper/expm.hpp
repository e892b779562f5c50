#pragma once

#include <Eigen/Dense>

namespace zkdamper {

// exp(A) by scaling and squaring of a truncated Taylor series: A is scaled by
// 2^-s until its 1-norm is below 1/2, the series is summed until terms fall
// below machine precision relative to the partial sum, then squared s times.
Eigen::MatrixXd expm(const Eigen::MatrixXd& A);

}  // namespace zkdamper
