#include "lqshrink/variational.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "lqshrink/error.hpp"
#include "lqshrink/parallel.hpp"
#include "lqshrink/penalty.hpp"
#include "lqshrink/prox.hpp"
#include "lqshrink/random.hpp"

namespace lqshrink {

namespace {

Eigen::VectorXd shrink_coefficients(const Eigen::VectorXd& v, const Eigen::VectorXd& weights,
                                    double q, const ShrinkageRule& rule) {
  return shrink_minimize(DecoupledProblem{v, weights, q}, rule).omega;
}

double safe_ratio(double num, double den) {
  if (den == 0.0) return num == 0.0 ? 1.0 : std::numeric_limits<double>::infinity();
  return std::max(num / den, 0.0);
}

}  // namespace

void VariationalProblem::validate() const {
  require_q(q);
  if (biframe.dim() != forward.op().cols()) {
    throw DimensionError("bi-frame dimension " + std::to_string(biframe.dim()) +
                         " does not match the domain of L (" + std::to_string(forward.op().cols()) + ")");
  }
  if (weights.size() != biframe.size()) {
    throw DimensionError("expected " + std::to_string(biframe.size()) + " weights, got " +
                         std::to_string(weights.size()));
  }
  if ((weights.array() < 0.0).any()) throw DomainError("weights must be nonnegative");
  if (bounds) {
    if (!(bounds->lower > 0.0 && bounds->lower <= bounds->upper)) {
      throw DomainError("weight bounds need 0 < a <= b");
    }
    if ((weights.array() < bounds->lower).any() || (weights.array() > bounds->upper).any()) {
      throw DomainError("weights violate a <= alpha_n <= b");
    }
  }
}

ObjectiveBreakdown eval_Jq(const VariationalProblem& p, const Eigen::VectorXd& g) {
  p.validate();
  if (g.size() != p.forward.op().cols()) throw DimensionError("eval_Jq: g has wrong length");
  const double residual_sq = (p.forward.data() - p.forward.op() * g).squaredNorm();
  // g usually comes from a synthesis, so coefficients that should vanish come back as round-off.
  // For q < 1 those would be charged at |1e-17|^q (or a full count at q = 0), hence the chop.
  Eigen::VectorXd c = p.biframe.dual().analyze(g);
  const double chop = 64.0 * std::numeric_limits<double>::epsilon() * c.cwiseAbs().maxCoeff();
  for (auto& x : c) {
    if (std::abs(x) <= chop) x = 0.0;
  }
  const double penalty = weighted_lq(c, p.weights, p.q);
  return {residual_sq, penalty, residual_sq + penalty};
}

ObjectiveBreakdown eval_Kq(const BiFrame& biframe, const Eigen::VectorXd& h,
                           const Eigen::VectorXd& weights, double q, const Eigen::VectorXd& omega) {
  require_q(q);
  if (h.size() != biframe.dim() || omega.size() != biframe.size() || weights.size() != biframe.size()) {
    throw DimensionError("eval_Kq: dimension mismatch");
  }
  const double residual_sq = (h - biframe.primal().synthesize(omega)).squaredNorm();
  const double penalty = weighted_lq(omega, weights, q);
  return {residual_sq, penalty, residual_sq + penalty};
}

Eigen::VectorXd theorem1_minimizer(const VariationalProblem& p, const ShrinkageRule& rule,
                                   Theorem1Variant variant) {
  p.validate();
  const auto& h = p.forward.data();
  const double residual = p.forward.range_residual();
  if (!(residual <= 1e-8 * h.norm())) {
    throw RangeError("h is not in range(L): ||L L# h - h|| = " + std::to_string(residual), residual);
  }
  const Eigen::VectorXd v = p.biframe.dual().analyze(p.forward.pseudo_inverse() * h);
  const Eigen::VectorXd omega = shrink_coefficients(v, p.weights, p.q, rule);
  const Eigen::VectorXd g = p.biframe.primal().synthesize(omega);
  if (variant == Theorem1Variant::kDirect) return g;
  return p.forward.pseudo_inverse() * (p.forward.op() * g);
}

SequenceMinimizer theorem2_minimizer(const BiFrame& biframe, const Eigen::VectorXd& h,
                                     const Eigen::VectorXd& weights, double q,
                                     const ShrinkageRule& rule, Theorem2Variant variant) {
  if (h.size() != biframe.dim()) throw DimensionError("theorem2_minimizer: h has wrong length");
  const Eigen::VectorXd v = biframe.dual().analyze(h);
  Eigen::VectorXd omega = shrink_coefficients(v, weights, q, rule);
  if (variant == Theorem2Variant::kProjected) {
    omega = biframe.dual().analyze(biframe.primal().synthesize(omega));
  }
  auto objective = eval_Kq(biframe, h, weights, q, omega);
  return {std::move(omega), objective};
}

std::vector<Eigen::VectorXd> make_probe_set(const VariationalProblem& p, std::uint64_t seed,
                                            int gaussian, int sparse) {
  p.validate();
  const Eigen::Index d = p.forward.op().cols();
  std::vector<Eigen::VectorXd> probes;

  const Eigen::VectorXd v = p.biframe.dual().analyze(p.forward.pseudo_inverse() * p.forward.data());
  probes.push_back(p.biframe.primal().synthesize(oracle_minimize({v, p.weights, p.q}).omega));

  PortableRng rng(seed);
  const double scale = std::max(p.forward.data().norm() / std::sqrt(static_cast<double>(std::max<Eigen::Index>(d, 1))), 1e-3);
  for (int i = 0; i < gaussian; ++i) {
    Eigen::VectorXd g(d);
    for (Eigen::Index k = 0; k < d; ++k) g[k] = scale * rng.gaussian();
    probes.push_back(std::move(g));
  }
  for (int i = 0; i < sparse; ++i) {
    Eigen::VectorXd g = Eigen::VectorXd::Zero(d);
    const int support = 1 + i % 3;
    for (int s = 0; s < support; ++s) g[rng.index(d)] = scale * rng.gaussian();
    probes.push_back(std::move(g));
  }
  probes.push_back(Eigen::VectorXd::Zero(d));
  return probes;
}

double constant_factor_audit_Jq(const VariationalProblem& p, const ShrinkageRule& rule,
                                const std::vector<Eigen::VectorXd>& probes,
                                Theorem1Variant variant) {
  const double best = eval_Jq(p, theorem1_minimizer(p, rule, variant)).total;
  std::vector<double> ratios(probes.size());
  parallel_for(probes.size(), [&](std::size_t i) {
    ratios[i] = safe_ratio(best, eval_Jq(p, probes[i]).total);
  });
  return ratios.empty() ? 1.0 : *std::max_element(ratios.begin(), ratios.end());
}

double constant_factor_audit_Kq(const BiFrame& biframe, const Eigen::VectorXd& h,
                                const Eigen::VectorXd& weights, double q,
                                const ShrinkageRule& rule,
                                const std::vector<Eigen::VectorXd>& probes,
                                Theorem2Variant variant) {
  const double best = theorem2_minimizer(biframe, h, weights, q, rule, variant).objective.total;
  double worst = probes.empty() ? 1.0 : 0.0;
  for (const auto& omega : probes) {
    worst = std::max(worst, safe_ratio(best, eval_Kq(biframe, h, weights, q, omega).total));
  }
  return worst;
}

}  // namespace lqshrink
