#pragma once

#include <functional>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include <Eigen/Core>

#include "lqshrink/frames.hpp"
#include "lqshrink/maxent.hpp"
#include "lqshrink/shrinkage.hpp"
#include "lqshrink/solver.hpp"

namespace lqshrink {

struct CurvePoint {
  double alpha;
  double residual_sq;
  double penalty;  // sum_n |<g, f~_n>|^q, unweighted
  double objective;
  Eigen::Index nonzeros;
};

// alpha -> (||h - L g^alpha||^2, sum_n |<g^alpha, f~_n>|^q) sampled on a sorted grid.
struct RegCurve {
  double q = 1.0;
  std::vector<CurvePoint> points;
  // Indices i where residual_sq[i] < residual_sq[i-1]: solver noise for q < 1, not an error.
  std::vector<std::size_t> monotonicity_warnings;
  // Solutions g^alpha, parallel to points.
  std::vector<Eigen::VectorXd> solutions;
};

enum class SolverChoice { kClosedForm, kLandweber };

// Operator, data and (for the closed form) the bi-frame whose dual analysis defines the penalty.
// The Landweber path uses the canonical basis and the `landweber` template config.
struct SweepProblem {
  Eigen::MatrixXd op;
  Eigen::VectorXd data;
  std::optional<BiFrame> biframe;
  LandweberConfig landweber;
};

// One curve point per alpha. alpha_grid must be sorted ascending and positive. Each alpha is
// solved independently (concurrently); solver errors are rethrown annotated with the alpha.
RegCurve sweep_alpha(const SweepProblem& problem, double q, const ShrinkageRule& rule,
                     std::span<const double> alpha_grid, SolverChoice solver);

enum class CurvatureScale { kLogLog, kLinear };

struct CurvatureSelection {
  double alpha;
  std::size_t index;               // into curve.points
  std::vector<double> curvatures;  // parallel to curve.points; NaN for non-candidates
};

// Three-point circumscribed-circle curvature, signed so that the L-curve corner (a turn from
// descending to flat when walking in increasing alpha) is positive. Endpoints are never chosen;
// ties within 1e-9 relative go to the smallest alpha. In log-log scale, points with a nonpositive
// coordinate are skipped. Throws DomainError for fewer than 5 points and Error("no curvature
// maximum") when no candidate has positive curvature.
CurvatureSelection max_curvature_alpha(const RegCurve& curve,
                                       CurvatureScale scale = CurvatureScale::kLogLog);

struct QSweepRow {
  double q;
  double alpha;
  double residual_sq;
  Eigen::Index nonzeros;
};

using RuleFactory = std::function<ShrinkageRule(double q)>;

// For each q: sweep_alpha over alpha_grid, pick alpha by maximal curvature, record the row.
std::vector<QSweepRow> q_sweep(const SweepProblem& problem, std::span<const double> q_grid,
                               std::span<const double> alpha_grid, SolverChoice solver,
                               const RuleFactory& rule_for_q = rules::hard_soft,
                               CurvatureScale scale = CurvatureScale::kLogLog);

std::vector<double> log_alpha_grid(double lo, double hi, int n);

// Maxent curve over beta: residual_sq against the shifted entropy sum_n (g_n ln g_n + 1/e), which
// is nonnegative and vanishes at the large-beta limit g = 1/e. nonzeros counts entries above
// 1e-6 max g. beta_grid sorted ascending and positive.
RegCurve sweep_beta_maxent(const Eigen::MatrixXd& op, const Eigen::VectorXd& data,
                           std::span<const double> beta_grid, const MaxentConfig& base = {});

// Entries above rel * max_n g_n; the count used for solutions without exact zeros.
Eigen::Index count_above(const Eigen::VectorXd& g, double rel = 1e-6);

}  // namespace lqshrink
