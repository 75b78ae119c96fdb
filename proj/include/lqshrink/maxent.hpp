#pragma once

#include <cstddef>
#include <optional>

#include <Eigen/Core>

#include "lqshrink/frames.hpp"

namespace lqshrink {

struct MaxentConfig {
  double beta = 1e-2;
  std::size_t max_iters = 5000;
  double tol = 1e-12;    // relative objective change
  double floor = 1e-12;  // positivity floor
  std::optional<Eigen::VectorXd> initial;
};

struct MaxentResult {
  Eigen::VectorXd solution;  // componentwise >= floor
  double objective = 0.0;
  double residual_norm = 0.0;
  double entropy = 0.0;  // sum_n g_n ln g_n
  std::size_t iterations = 0;
  bool converged = false;
};

// ||f - T g||^2 + beta sum_n g_n ln g_n on the positive orthant.
double maxent_objective(const Eigen::MatrixXd& op, const Eigen::VectorXd& data, double beta,
                        const Eigen::VectorXd& g);

// Projected Newton descent on g >= floor. Coordinates at the floor with a positive gradient are
// held by diagonally scaled gradient steps; the rest take a Newton step with
// H = 2 T^T T + beta diag(1/g). Armijo backtracking along the projection arc. Stops when both the
// relative objective change and the predicted decrease fall below tol. Throws DivergenceError on
// non-finite values.
MaxentResult maxent_solve(const Eigen::MatrixXd& op, const Eigen::VectorXd& data,
                          const MaxentConfig& cfg);

}  // namespace lqshrink
