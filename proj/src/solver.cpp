#include "lqshrink/solver.hpp"

#include <cmath>

#include "lqshrink/error.hpp"
#include "lqshrink/penalty.hpp"
#include "lqshrink/random.hpp"

namespace lqshrink {

namespace {

constexpr double kTargetNorm = 0.99;

struct ScaledProblem {
  double scale;       // s
  double alpha;       // alpha / s^2
  Eigen::VectorXd Tf;  // T^T f / s^2
};

ScaledProblem scale_problem(const LinearOperator& op, const Eigen::VectorXd& data,
                            const LandweberConfig& cfg) {
  double s = 1.0;
  if (cfg.normalize_operator) {
    const double norm = spectral_norm_estimate(op);
    if (norm > 0.0) s = norm / kTargetNorm;
  }
  const double inv_s2 = 1.0 / (s * s);
  return {s, cfg.alpha * inv_s2, op.apply_adjoint(data) * inv_s2};
}

class Shrinker {
 public:
  Shrinker(const LandweberConfig& cfg, double alpha)
      : wrapped_(cfg.effective_rule(), cfg.q), alpha_(alpha), nonneg_(cfg.nonneg) {}

  Eigen::VectorXd operator()(const Eigen::VectorXd& x) const {
    Eigen::VectorXd out(x.size());
    for (Eigen::Index n = 0; n < x.size(); ++n) {
      out[n] = (nonneg_ && x[n] < 0.0) ? 0.0 : wrapped_(x[n], alpha_);
    }
    return out;
  }

 private:
  QDependentRule wrapped_;
  double alpha_;
  bool nonneg_;
};

void check_dims(const LinearOperator& op, const Eigen::VectorXd& data, const LandweberConfig& cfg) {
  if (data.size() != op.rows) {
    throw DimensionError("data has length " + std::to_string(data.size()) + ", operator has " +
                         std::to_string(op.rows) + " rows");
  }
  if (cfg.initial && cfg.initial->size() != op.cols) {
    throw DimensionError("initial iterate has wrong length");
  }
}

}  // namespace

void LandweberConfig::validate() const {
  require_q(q, 0.0, 1.0);
  if (!(alpha >= 0.0) || !std::isfinite(alpha)) throw DomainError("alpha must be finite and >= 0");
  if (max_iters < 1) throw DomainError("max_iters must be >= 1");
  if (!(rel_tol > 0.0)) throw DomainError("rel_tol must be > 0");
  const auto r = effective_rule();
  if (q < r.min_q()) {
    throw HypothesisError("q = " + std::to_string(q) + " is below 1/rho for rule '" + r.name() + "'");
  }
}

ShrinkageRule LandweberConfig::effective_rule() const {
  return rule ? *rule : rules::hard_soft(q);
}

std::string_view to_string(StopReason reason) {
  switch (reason) {
    case StopReason::kConverged: return "converged";
    case StopReason::kMaxIterations: return "max_iterations";
  }
  return "unknown";
}

double spectral_norm_estimate(const LinearOperator& op, double tol, std::size_t max_iters) {
  if (op.cols == 0 || op.rows == 0) return 0.0;
  PortableRng rng(7);
  Eigen::VectorXd x(op.cols);
  for (Eigen::Index i = 0; i < x.size(); ++i) x[i] = 0.5 + rng.uniform();
  x.normalize();
  double estimate = 0.0;
  for (std::size_t it = 0; it < max_iters; ++it) {
    Eigen::VectorXd y = op.apply_adjoint(op.apply(x));
    const double norm_y = y.norm();
    if (norm_y == 0.0) return 0.0;
    const double next = std::sqrt(norm_y);
    x = y / norm_y;
    if (std::abs(next - estimate) <= tol * next) return next;
    estimate = next;
  }
  return estimate;
}

SolverTrace landweber_shrink(const LinearOperator& op, const Eigen::VectorXd& data,
                             const LandweberConfig& cfg) {
  cfg.validate();
  check_dims(op, data, cfg);
  const ScaledProblem scaled = scale_problem(op, data, cfg);
  const double inv_s2 = 1.0 / (scaled.scale * scaled.scale);
  const Shrinker shrink(cfg, scaled.alpha);

  SolverTrace trace;
  trace.operator_scale = scaled.scale;
  Eigen::VectorXd g = cfg.initial ? *cfg.initial : Eigen::VectorXd::Zero(op.cols);

  auto record = [&](std::size_t j, const Eigen::VectorXd& iterate, const Eigen::VectorXd& residual,
                    bool snapshot) {
    const double penalty = lq_sum(iterate, cfg.q);
    const double rn = residual.norm();
    trace.records.push_back({j, rn, penalty, rn * rn + cfg.alpha * penalty, count_nonzeros(iterate),
                             snapshot ? std::optional<Eigen::VectorXd>(iterate) : std::nullopt});
  };
  auto snapshot_due = [&](std::size_t j) { return cfg.snapshot_every > 0 && j % cfg.snapshot_every == 0; };

  std::size_t j = 0;
  for (; j < cfg.max_iters; ++j) {
    const Eigen::VectorXd residual = data - op.apply(g);
    record(j, g, residual, snapshot_due(j));
    // g + T^T f - T^T T g on the scaled problem
    // checked before shrinking: some rules map NaN to 0 and would hide the blow-up
    const Eigen::VectorXd step = g + op.apply_adjoint(residual) * inv_s2;
    Eigen::VectorXd next = shrink(step);
    const double change = (next - g).norm();
    const double reference = std::max(g.norm(), 1.0);
    // norms overflow long before the entries do, and inf <= tol * inf would read as converged
    if (!step.allFinite() || !next.allFinite() || !std::isfinite(change) || !std::isfinite(reference)) {
      throw DivergenceError("landweber_shrink diverged at iteration " + std::to_string(j + 1), j + 1);
    }
    g.swap(next);
    if (change <= cfg.rel_tol * reference) {
      trace.stop_reason = StopReason::kConverged;
      ++j;
      break;
    }
  }
  trace.iterations = j;
  record(j, g, data - op.apply(g), true);
  trace.solution = std::move(g);
  return trace;
}

double fixed_point_residual(const LinearOperator& op, const Eigen::VectorXd& data,
                            const LandweberConfig& cfg, const Eigen::VectorXd& g) {
  cfg.validate();
  check_dims(op, data, cfg);
  const ScaledProblem scaled = scale_problem(op, data, cfg);
  const Shrinker shrink(cfg, scaled.alpha);
  const Eigen::VectorXd residual = data - op.apply(g);
  return (shrink(g + op.apply_adjoint(residual) / (scaled.scale * scaled.scale)) - g).norm();
}

bool objective_monotone_check(const SolverTrace& trace) {
  const auto& r = trace.records;
  for (std::size_t j = 1; j + 1 < r.size(); ++j) {
    const double slack = 1e-10 * std::max(1.0, std::abs(r[j].objective));
    if (r[j + 1].objective > r[j].objective + slack) return false;
  }
  return true;
}

}  // namespace lqshrink
