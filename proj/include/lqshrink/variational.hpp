#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include <Eigen/Core>

#include "lqshrink/frames.hpp"
#include "lqshrink/shrinkage.hpp"

namespace lqshrink {

// Optional a <= alpha_n <= b constraint on the weights.
struct WeightBounds {
  double lower;
  double upper;
};

// min_g ||h - L g||^2 + sum_n alpha_n |<g, f~_n>|^q
struct VariationalProblem {
  ForwardProblem forward;
  BiFrame biframe;
  Eigen::VectorXd weights;
  double q = 1.0;
  std::optional<WeightBounds> bounds;

  // Dimensions chain (biframe lives on the domain of L, one weight per frame element), weights
  // nonnegative and within bounds, q in [0, 2].
  void validate() const;
};

struct ObjectiveBreakdown {
  double residual_sq;
  double penalty;
  double total;
};

// J_q(h, g) = ||h - L g||^2 + ||F~^T g||^q_{q, alpha}
ObjectiveBreakdown eval_Jq(const VariationalProblem& p, const Eigen::VectorXd& g);

// K_q(h, w) = ||h - F w||^2 + sum_n alpha_n |w_n|^q
ObjectiveBreakdown eval_Kq(const BiFrame& biframe, const Eigen::VectorXd& h,
                           const Eigen::VectorXd& weights, double q, const Eigen::VectorXd& omega);

enum class Theorem1Variant { kPulledBack, kDirect };
enum class Theorem2Variant { kProjected, kPlain };

// g^ = L# L F w^ (pulled back) or F w^ (direct), with w^_n = rule(v_n, alpha_n |v_n|^(q-1)) and
// v = F~^T L# h. Throws RangeError when ||L L# h - h|| > 1e-8 ||h||, HypothesisError when
// q < 1/rho.
Eigen::VectorXd theorem1_minimizer(const VariationalProblem& p, const ShrinkageRule& rule,
                                   Theorem1Variant variant = Theorem1Variant::kDirect);

struct SequenceMinimizer {
  Eigen::VectorXd omega;
  ObjectiveBreakdown objective;
};

// w^ = F~^T F r(v) (projected) or r(v) (plain) with v = F~^T h.
SequenceMinimizer theorem2_minimizer(const BiFrame& biframe, const Eigen::VectorXd& h,
                                     const Eigen::VectorXd& weights, double q,
                                     const ShrinkageRule& rule,
                                     Theorem2Variant variant = Theorem2Variant::kPlain);

// Probe vectors for constant-factor audits: the image F w* of the decoupled oracle for
// v = F~^T L# h, `gaussian` random Gaussian vectors, `sparse` random sparse vectors, and zero.
std::vector<Eigen::VectorXd> make_probe_set(const VariationalProblem& p, std::uint64_t seed,
                                            int gaussian = 20, int sparse = 20);

// max over probes g of J_q(h, g^) / J_q(h, g), with 0/0 = 1 and x/0 = inf for x > 0.
double constant_factor_audit_Jq(const VariationalProblem& p, const ShrinkageRule& rule,
                                const std::vector<Eigen::VectorXd>& probes,
                                Theorem1Variant variant = Theorem1Variant::kDirect);

// Same audit for K_q over sequence probes.
double constant_factor_audit_Kq(const BiFrame& biframe, const Eigen::VectorXd& h,
                                const Eigen::VectorXd& weights, double q,
                                const ShrinkageRule& rule,
                                const std::vector<Eigen::VectorXd>& probes,
                                Theorem2Variant variant = Theorem2Variant::kPlain);

}  // namespace lqshrink
