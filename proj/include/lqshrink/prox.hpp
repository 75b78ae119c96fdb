#pragma once

#include <optional>
#include <span>
#include <vector>

#include <Eigen/Core>

#include "lqshrink/shrinkage.hpp"

namespace lqshrink {

// The separable problem  I_q(v, w) = ||v - w||^2 + sum_n alpha_n |w_n|^q  (0^0 = 0 at q = 0).
struct DecoupledProblem {
  Eigen::VectorXd v;
  Eigen::VectorXd weights;
  double q = 1.0;

  // Throws DimensionError / DomainError.
  void validate() const;
};

struct ProxResult {
  Eigen::VectorXd omega;
  double objective = 0.0;
  std::optional<double> ratio_to_oracle;
};

double scalar_objective(double v, double alpha, double omega, double q);
double decoupled_objective(const DecoupledProblem& p, const Eigen::VectorXd& omega);

// omega_n = rule(v_n, alpha_n |v_n|^(q-1)). Throws HypothesisError if q < 1/rho.
ProxResult shrink_minimize(const DecoupledProblem& p, const ShrinkageRule& rule);

// Global minimizer of w -> (v - w)^2 + alpha |w|^q by dense search plus refinement. Independent
// of every shrinkage formula. At a tie between 0 and a nonzero minimizer the nonzero one wins.
double oracle_scalar(double v, double alpha, double q);

// Componentwise oracle; I_q is a sum of independent scalar terms.
ProxResult oracle_minimize(const DecoupledProblem& p);

// (c_q alpha)^(1/(2-q)); below it the exact minimizer is 0. Accepts q in [0, 1].
double zero_threshold(double alpha, double q);

struct SamplePoint {
  double v;
  double alpha;
};

struct AuditRow {
  double v;
  double alpha;
  double shrink_objective;
  double oracle_objective;
  double ratio;
};

// Log-spaced sample: nv values of v in [v_lo, v_hi] times na values of alpha in [a_lo, a_hi].
std::vector<SamplePoint> log_grid_sample(double v_lo, double v_hi, int nv, double a_lo, double a_hi,
                                         int na);

// Per-point ratios I_q(shrink) / I_q(oracle), 0/0 = 1. Evaluated concurrently, returned in
// sample order.
std::vector<AuditRow> audit_rows(double q, const ShrinkageRule& rule,
                                 std::span<const SamplePoint> sample);

// Max of audit_rows(...).ratio.
double constant_factor_audit(double q, const ShrinkageRule& rule,
                             std::span<const SamplePoint> sample);

}  // namespace lqshrink
