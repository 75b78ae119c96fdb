#pragma once

#include <optional>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "lqshrink/fredholm.hpp"
#include "lqshrink/modelsel.hpp"
#include "lqshrink/solver.hpp"

namespace lqshrink {

// Indices of the k largest strict local maxima with positive value (a plateau counts once, at
// its left end), returned in increasing index order. Larger values win; equal values go to the
// smaller index.
std::vector<Eigen::Index> top_peaks(const Eigen::VectorXd& g, std::size_t k);

struct CompareConfig {
  double q = 0.3;
  double alpha = 1e-5;
  bool nonneg = true;
  std::size_t max_iters = 100000;
  double rel_tol = 1e-8;
  // maxent beta is picked by maximal curvature on this log grid
  double beta_lo = 1e-8;
  double beta_hi = 1e-1;
  int beta_count = 29;
  CurvatureScale scale = CurvatureScale::kLogLog;
  std::size_t peaks = 4;
  bool warm_start = true;  // also run Landweber from the maxent solution

  void validate() const;
};

struct MethodSummary {
  std::string method;
  double parameter = 0.0;  // alpha for Landweber, beta for maxent
  double residual_norm = 0.0;
  double objective = 0.0;
  Eigen::Index nonzeros = 0;  // exact zeros for shrinkage, 1e-6 max for maxent
  std::vector<Eigen::Index> peaks;
  std::size_t iterations = 0;
  bool converged = false;
  Eigen::VectorXd solution;
};

struct Comparison {
  MethodSummary landweber;                 // cold start from 0
  std::optional<MethodSummary> landweber_warm;
  MethodSummary maxent;
  RegCurve maxent_curve;
  CurvatureSelection maxent_selection;
};

Comparison run_comparison(const FredholmProblem& problem, const CompareConfig& cfg = {});

}  // namespace lqshrink
