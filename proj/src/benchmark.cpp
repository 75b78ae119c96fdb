#include "lqshrink/benchmark.hpp"

#include <algorithm>
#include <cmath>

#include "lqshrink/error.hpp"
#include "lqshrink/maxent.hpp"
#include "lqshrink/penalty.hpp"

namespace lqshrink {

std::vector<Eigen::Index> top_peaks(const Eigen::VectorXd& g, std::size_t k) {
  std::vector<std::pair<double, Eigen::Index>> candidates;
  const Eigen::Index n = g.size();
  Eigen::Index i = 0;
  while (i < n) {
    Eigen::Index j = i;
    while (j + 1 < n && g[j + 1] == g[i]) ++j;  // plateau [i, j]
    const bool left_lower = i == 0 || g[i - 1] < g[i];
    const bool right_lower = j == n - 1 || g[j + 1] < g[i];
    if (g[i] > 0.0 && left_lower && right_lower) candidates.emplace_back(g[i], i);
    i = j + 1;
  }
  std::stable_sort(candidates.begin(), candidates.end(),
                   [](const auto& a, const auto& b) { return a.first > b.first; });
  std::vector<Eigen::Index> out;
  for (std::size_t c = 0; c < candidates.size() && c < k; ++c) out.push_back(candidates[c].second);
  std::sort(out.begin(), out.end());
  return out;
}

void CompareConfig::validate() const {
  require_q(q, 0.0, 1.0);
  if (!(alpha > 0.0)) throw ConfigError("compare: alpha must be > 0");
  if (max_iters < 1) throw ConfigError("compare: max_iters must be >= 1");
  if (!(rel_tol > 0.0)) throw ConfigError("compare: tol must be > 0");
  if (!(beta_lo > 0.0) || !(beta_hi > beta_lo) || beta_count < 5) {
    throw ConfigError("compare: beta grid needs 0 < beta_lo < beta_hi and at least 5 points");
  }
}

namespace {

MethodSummary summarize_landweber(const SolverTrace& trace, double alpha, std::size_t peaks,
                                  std::string name) {
  const auto& last = trace.final_record();
  return {std::move(name),
          alpha,
          last.residual_norm,
          last.objective,
          last.nonzeros,
          top_peaks(trace.solution, peaks),
          trace.iterations,
          trace.stop_reason == StopReason::kConverged,
          trace.solution};
}

}  // namespace

Comparison run_comparison(const FredholmProblem& problem, const CompareConfig& cfg) {
  cfg.validate();
  problem.validate();
  const Eigen::VectorXd data = problem_data(problem);
  const Eigen::MatrixXd& k = problem.kernel_matrix;

  Comparison out;
  const auto betas = log_alpha_grid(cfg.beta_lo, cfg.beta_hi, cfg.beta_count);
  out.maxent_curve = sweep_beta_maxent(k, data, betas);
  out.maxent_selection = max_curvature_alpha(out.maxent_curve, cfg.scale);
  {
    MaxentConfig mc;
    mc.beta = out.maxent_selection.alpha;
    const auto r = maxent_solve(k, data, mc);
    out.maxent = {"maxent",         mc.beta,      r.residual_norm,
                  r.objective,      count_above(r.solution), top_peaks(r.solution, cfg.peaks),
                  r.iterations,     r.converged,  r.solution};
  }

  const auto op = LinearOperator::from_matrix(k);
  LandweberConfig lc;
  lc.q = cfg.q;
  lc.alpha = cfg.alpha;
  lc.nonneg = cfg.nonneg;
  lc.max_iters = cfg.max_iters;
  lc.rel_tol = cfg.rel_tol;
  lc.snapshot_every = 0;
  out.landweber = summarize_landweber(landweber_shrink(op, data, lc), cfg.alpha, cfg.peaks, "landweber");
  if (cfg.warm_start) {
    lc.initial = out.maxent.solution;
    out.landweber_warm =
        summarize_landweber(landweber_shrink(op, data, lc), cfg.alpha, cfg.peaks, "landweber_warm");
  }
  return out;
}

}  // namespace lqshrink
