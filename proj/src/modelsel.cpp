#include "lqshrink/modelsel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "lqshrink/error.hpp"
#include "lqshrink/parallel.hpp"
#include "lqshrink/penalty.hpp"
#include "lqshrink/variational.hpp"

namespace lqshrink {

namespace {

struct Solved {
  CurvePoint point;
  Eigen::VectorXd g;
};

}  // namespace

std::vector<double> log_alpha_grid(double lo, double hi, int n) {
  if (!(lo > 0.0) || !(hi >= lo) || n < 1) throw DomainError("log_alpha_grid: need 0 < lo <= hi, n >= 1");
  std::vector<double> out(n);
  for (int i = 0; i < n; ++i) {
    out[i] = n == 1 ? lo : std::pow(10.0, std::log10(lo) + (std::log10(hi) - std::log10(lo)) * i / (n - 1));
  }
  return out;
}

RegCurve sweep_alpha(const SweepProblem& problem, double q, const ShrinkageRule& rule,
                     std::span<const double> alpha_grid, SolverChoice solver) {
  for (std::size_t i = 0; i < alpha_grid.size(); ++i) {
    if (!(alpha_grid[i] > 0.0)) throw DomainError("alpha grid must be positive");
    if (i > 0 && !(alpha_grid[i] > alpha_grid[i - 1])) throw DomainError("alpha grid must be sorted ascending");
  }
  require_q(q);

  std::optional<ForwardProblem> forward;
  std::optional<BiFrame> biframe;
  std::optional<LinearOperator> op;
  if (solver == SolverChoice::kClosedForm) {
    forward.emplace(problem.op, problem.data);
    biframe = problem.biframe ? *problem.biframe : BiFrame::orthonormal(problem.op.cols());
  } else {
    op = LinearOperator::from_matrix(problem.op);
  }

  std::vector<Solved> solved(alpha_grid.size());
  parallel_for(alpha_grid.size(), [&](std::size_t i) {
    const double alpha = alpha_grid[i];
    try {
      Eigen::VectorXd g;
      Eigen::VectorXd coeffs;
      if (solver == SolverChoice::kClosedForm) {
        VariationalProblem vp{*forward, *biframe, Eigen::VectorXd::Constant(biframe->size(), alpha), q, std::nullopt};
        g = theorem1_minimizer(vp, rule);
        coeffs = biframe->dual().analyze(g);
      } else {
        LandweberConfig cfg = problem.landweber;
        cfg.q = q;
        cfg.alpha = alpha;
        cfg.rule = rule;
        cfg.snapshot_every = 0;
        g = landweber_shrink(*op, problem.data, cfg).solution;
        coeffs = g;
      }
      const double residual_sq = (problem.data - problem.op * g).squaredNorm();
      const double penalty = lq_sum(coeffs, q);
      solved[i] = {{alpha, residual_sq, penalty, residual_sq + alpha * penalty, count_nonzeros(coeffs)},
                   std::move(g)};
    } catch (const DivergenceError& e) {
      throw DivergenceError(std::string(e.what()) + " (alpha = " + std::to_string(alpha) + ")", e.iteration());
    } catch (const Error& e) {
      throw Error(std::string(e.what()) + " (alpha = " + std::to_string(alpha) + ")");
    }
  });

  RegCurve curve;
  curve.q = q;
  for (auto& s : solved) {
    curve.points.push_back(s.point);
    curve.solutions.push_back(std::move(s.g));
  }
  for (std::size_t i = 1; i < curve.points.size(); ++i) {
    if (curve.points[i].residual_sq < curve.points[i - 1].residual_sq) curve.monotonicity_warnings.push_back(i);
  }
  return curve;
}

CurvatureSelection max_curvature_alpha(const RegCurve& curve, CurvatureScale scale) {
  if (curve.points.size() < 5) {
    throw DomainError("max_curvature_alpha needs at least 5 points, got " + std::to_string(curve.points.size()));
  }
  std::vector<std::size_t> order(curve.points.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return curve.points[a].alpha < curve.points[b].alpha; });

  struct Xy {
    double x, y;
    std::size_t sorted_index;
  };
  std::vector<Xy> pts;
  for (std::size_t k = 0; k < order.size(); ++k) {
    const auto& p = curve.points[order[k]];
    if (scale == CurvatureScale::kLogLog) {
      if (p.residual_sq > 0.0 && p.penalty > 0.0) pts.push_back({std::log10(p.residual_sq), std::log10(p.penalty), k});
    } else {
      pts.push_back({p.residual_sq, p.penalty, k});
    }
  }

  const double nan = std::numeric_limits<double>::quiet_NaN();
  CurvatureSelection sel{nan, 0, std::vector<double>(order.size(), nan)};
  double best = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 1; i + 1 < pts.size(); ++i) {
    const double ax = pts[i].x - pts[i - 1].x, ay = pts[i].y - pts[i - 1].y;
    const double bx = pts[i + 1].x - pts[i].x, by = pts[i + 1].y - pts[i].y;
    const double cx = pts[i + 1].x - pts[i - 1].x, cy = pts[i + 1].y - pts[i - 1].y;
    const double denom = std::hypot(ax, ay) * std::hypot(bx, by) * std::hypot(cx, cy);
    const double kappa = denom > 0.0 ? 2.0 * (ax * by - ay * bx) / denom : 0.0;
    sel.curvatures[order[pts[i].sorted_index]] = kappa;
    best = std::max(best, kappa);
  }
  if (!(best > 0.0)) throw Error("no curvature maximum");

  for (std::size_t i = 1; i + 1 < pts.size(); ++i) {
    const double kappa = sel.curvatures[order[pts[i].sorted_index]];
    if (kappa >= best - 1e-9 * std::abs(best)) {
      sel.index = order[pts[i].sorted_index];
      sel.alpha = curve.points[sel.index].alpha;
      break;
    }
  }
  return sel;
}

Eigen::Index count_above(const Eigen::VectorXd& g, double rel) {
  if (g.size() == 0) return 0;
  const double cut = rel * g.maxCoeff();
  Eigen::Index k = 0;
  for (Eigen::Index n = 0; n < g.size(); ++n) k += (g[n] > cut);
  return k;
}

RegCurve sweep_beta_maxent(const Eigen::MatrixXd& op, const Eigen::VectorXd& data,
                           std::span<const double> beta_grid, const MaxentConfig& base) {
  for (std::size_t i = 0; i < beta_grid.size(); ++i) {
    if (!(beta_grid[i] > 0.0)) throw DomainError("beta grid must be positive");
    if (i > 0 && !(beta_grid[i] > beta_grid[i - 1])) throw DomainError("beta grid must be sorted ascending");
  }
  std::vector<Solved> solved(beta_grid.size());
  parallel_for(beta_grid.size(), [&](std::size_t i) {
    MaxentConfig cfg = base;
    cfg.beta = beta_grid[i];
    try {
      auto r = maxent_solve(op, data, cfg);
      const double residual_sq = r.residual_norm * r.residual_norm;
      const double penalty = r.entropy + static_cast<double>(r.solution.size()) * std::exp(-1.0);
      solved[i] = {{cfg.beta, residual_sq, penalty, r.objective, count_above(r.solution)}, std::move(r.solution)};
    } catch (const DivergenceError& e) {
      throw DivergenceError(std::string(e.what()) + " (beta = " + std::to_string(cfg.beta) + ")", e.iteration());
    }
  });
  RegCurve curve;
  curve.q = 1.0;
  for (auto& s : solved) {
    curve.points.push_back(s.point);
    curve.solutions.push_back(std::move(s.g));
  }
  for (std::size_t i = 1; i < curve.points.size(); ++i) {
    if (curve.points[i].residual_sq < curve.points[i - 1].residual_sq) curve.monotonicity_warnings.push_back(i);
  }
  return curve;
}

std::vector<QSweepRow> q_sweep(const SweepProblem& problem, std::span<const double> q_grid,
                               std::span<const double> alpha_grid, SolverChoice solver,
                               const RuleFactory& rule_for_q, CurvatureScale scale) {
  std::vector<QSweepRow> rows;
  for (double q : q_grid) {
    require_q(q, 0.0, 1.0);
    const RegCurve curve = sweep_alpha(problem, q, rule_for_q(q), alpha_grid, solver);
    const auto sel = max_curvature_alpha(curve, scale);
    const auto& p = curve.points[sel.index];
    rows.push_back({q, sel.alpha, p.residual_sq, p.nonzeros});
  }
  return rows;
}

}  // namespace lqshrink
