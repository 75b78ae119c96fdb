#pragma once

#include <cstddef>
#include <optional>
#include <string_view>
#include <vector>

#include <Eigen/Core>

#include "lqshrink/frames.hpp"
#include "lqshrink/shrinkage.hpp"

namespace lqshrink {

struct LandweberConfig {
  double q = 1.0;                     // in [0, 1]
  double alpha = 1.0;                 // uniform weight, > 0
  std::optional<ShrinkageRule> rule;  // defaults to rules::hard_soft(q)
  std::size_t max_iters = 100000;
  double rel_tol = 1e-8;
  bool nonneg = false;
  bool normalize_operator = true;
  std::size_t snapshot_every = 100;   // 0 disables iterate snapshots
  std::optional<Eigen::VectorXd> initial;  // warm start; zero vector otherwise

  void validate() const;
  ShrinkageRule effective_rule() const;
};

enum class StopReason { kConverged, kMaxIterations };

std::string_view to_string(StopReason reason);

struct TraceRecord {
  std::size_t iteration;
  double residual_norm;
  double penalty;    // sum_n |g_n|^q
  double objective;  // residual_norm^2 + alpha * penalty
  Eigen::Index nonzeros;
  std::optional<Eigen::VectorXd> snapshot;
};

struct SolverTrace {
  std::vector<TraceRecord> records;  // records[j] describes iterate g^j
  Eigen::VectorXd solution;
  std::size_t iterations = 0;
  StopReason stop_reason = StopReason::kMaxIterations;
  double operator_scale = 1.0;  // T was divided by this before iterating

  const TraceRecord& final_record() const { return records.back(); }
};

// Power-iteration estimate of ||T||_2 (relative tolerance `tol`).
double spectral_norm_estimate(const LinearOperator& op, double tol = 1e-6,
                              std::size_t max_iters = 10000);

// g^0 = 0 (or cfg.initial); g^{j+1} = S(g^j + T^T f - T^T T g^j) with
// S(x)_n = rule(x_n, alpha |x_n|^(q-1)), and S(x)_n = 0 for x_n < 0 in nonneg mode.
//
// With normalize_operator the iteration runs on T/s, f/s and alpha/s^2, where s = ||T|| / 0.99.
// That problem has the same minimizers as the original; traces report original-scale values.
// Throws DivergenceError on non-finite iterates.
SolverTrace landweber_shrink(const LinearOperator& op, const Eigen::VectorXd& data,
                             const LandweberConfig& cfg);

// The fixed-point residual ||g - S(g + T^T f - T^T T g)|| on the solver's internal scale.
double fixed_point_residual(const LinearOperator& op, const Eigen::VectorXd& data,
                            const LandweberConfig& cfg, const Eigen::VectorXd& g);

// true iff objective[j+1] <= objective[j] + 1e-10 max(1, |objective[j]|) for all j >= 1.
bool objective_monotone_check(const SolverTrace& trace);

}  // namespace lqshrink
