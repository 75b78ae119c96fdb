#include "lqshrink/maxent.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include <Eigen/Cholesky>

#include "lqshrink/error.hpp"

namespace lqshrink {

namespace {

double entropy(const Eigen::VectorXd& g) {
  double sum = 0.0;
  for (Eigen::Index n = 0; n < g.size(); ++n) sum += g[n] * std::log(g[n]);
  return sum;
}

}  // namespace

double maxent_objective(const Eigen::MatrixXd& op, const Eigen::VectorXd& data, double beta,
                        const Eigen::VectorXd& g) {
  return (data - op * g).squaredNorm() + beta * entropy(g);
}

MaxentResult maxent_solve(const Eigen::MatrixXd& op, const Eigen::VectorXd& data,
                          const MaxentConfig& cfg) {
  if (!(cfg.beta > 0.0)) throw DomainError("maxent: beta must be > 0");
  if (!(cfg.floor > 0.0)) throw DomainError("maxent: floor must be > 0");
  if (data.size() != op.rows()) throw DimensionError("maxent: data length does not match operator");
  const Eigen::Index n = op.cols();

  Eigen::VectorXd g;
  if (cfg.initial) {
    if (cfg.initial->size() != n) throw DimensionError("maxent: initial iterate has wrong length");
    g = cfg.initial->cwiseMax(cfg.floor);
  } else {
    // exp(-1) minimizes g ln g.
    g = Eigen::VectorXd::Constant(n, std::exp(-1.0));
  }

  const Eigen::MatrixXd gram = 2.0 * op.transpose() * op;
  const Eigen::VectorXd rhs = 2.0 * op.transpose() * data;
  auto objective = [&](const Eigen::VectorXd& x) { return maxent_objective(op, data, cfg.beta, x); };

  MaxentResult out;
  double current = objective(g);
  for (std::size_t it = 0; it < cfg.max_iters; ++it) {
    Eigen::VectorXd grad = gram * g - rhs;
    grad.array() += cfg.beta * (g.array().log() + 1.0);

    // Bound-active set: coordinates pinned near the floor whose gradient pushes further down.
    const double pg_norm = (g - (g - grad).cwiseMax(cfg.floor)).norm();
    const double eps = std::min(pg_norm, 1e-6 * g.maxCoeff());
    std::vector<Eigen::Index> free_set;
    std::vector<bool> active(static_cast<std::size_t>(n), false);
    for (Eigen::Index k = 0; k < n; ++k) {
      if (g[k] - cfg.floor <= eps && grad[k] > 0.0) {
        active[static_cast<std::size_t>(k)] = true;
      } else {
        free_set.push_back(k);
      }
    }

    // Newton on the free coordinates, diagonally scaled gradient steps on the active ones.
    Eigen::VectorXd step(n);
    if (!free_set.empty()) {
      const auto m = static_cast<Eigen::Index>(free_set.size());
      Eigen::MatrixXd h(m, m);
      Eigen::VectorXd rhs_free(m);
      for (Eigen::Index a = 0; a < m; ++a) {
        for (Eigen::Index b = 0; b < m; ++b) h(a, b) = gram(free_set[a], free_set[b]);
        h(a, a) += cfg.beta / g[free_set[a]];
        rhs_free[a] = -grad[free_set[a]];
      }
      const Eigen::VectorXd d = h.ldlt().solve(rhs_free);
      for (Eigen::Index a = 0; a < m; ++a) step[free_set[a]] = d[a];
    }
    for (Eigen::Index k = 0; k < n; ++k) {
      if (active[static_cast<std::size_t>(k)]) step[k] = -grad[k] * g[k] / cfg.beta;
    }
    if (!step.allFinite()) {
      throw DivergenceError("maxent diverged at iteration " + std::to_string(it + 1), it + 1);
    }

    // Armijo backtracking along the projection arc.
    Eigen::VectorXd trial;
    double trial_value = current;
    double predicted = 0.0;
    bool accepted = false;
    double t = 1.0;
    for (int back = 0; back < 60; ++back, t *= 0.5) {
      trial = (g + t * step).cwiseMax(cfg.floor);
      trial_value = objective(trial);
      predicted = grad.dot(g - trial);
      if (trial_value <= current - 1e-4 * predicted) {
        accepted = true;
        break;
      }
    }
    out.iterations = it + 1;
    if (!accepted) {
      out.converged = true;  // no descent left at working precision
      break;
    }
    if (!std::isfinite(trial_value)) {
      throw DivergenceError("maxent objective not finite at iteration " + std::to_string(it + 1), it + 1);
    }
    const double change = current - trial_value;
    g.swap(trial);
    const double scale = std::max(std::abs(current), std::numeric_limits<double>::min());
    current = trial_value;
    if (change <= cfg.tol * scale && predicted <= cfg.tol * scale) {
      out.converged = true;
      break;
    }
  }

  out.solution = std::move(g);
  out.objective = current;
  out.residual_norm = (data - op * out.solution).norm();
  out.entropy = entropy(out.solution);
  return out;
}

}  // namespace lqshrink
