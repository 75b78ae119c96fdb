#pragma once

#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace lqshrink {

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

// Declared constants of the two shrinkage axioms
//   |x - r(x, a)| <= c1 min(|x|, a)                         for all a >= 0
//   |r(x, a)|     <= c2 |x| |x / a|^rho                     for a > 0, |x| <= d a
// and, for thresholding rules, |x| <= c3 a  =>  r(x, a) = 0.
struct AxiomConstants {
  double c1 = 1.0;
  double c2 = 1.0;
  double rho = 1.0;  // may be kInfinity
  double d = 1.0;
  std::optional<double> c3;
};

// A named scalar map (x, alpha) -> r(x, alpha). Immutable and cheap to copy.
class ShrinkageRule {
 public:
  using Map = std::function<double(double, double)>;

  ShrinkageRule(std::string name, Map map, AxiomConstants constants);

  double operator()(double x, double alpha) const { return map_(x, alpha); }

  const std::string& name() const noexcept { return name_; }
  const AxiomConstants& constants() const noexcept { return constants_; }
  double rho() const noexcept { return constants_.rho; }
  bool is_thresholding() const noexcept { return constants_.c3.has_value(); }

  // 1/rho, with 1/inf = 0: the smallest q the constant-factor results cover.
  double min_q() const noexcept;

 private:
  std::string name_;
  Map map_;
  AxiomConstants constants_;
};

// The q-dependent expression x -> base(x, alpha |x|^(q-1)), with value 0 at x = 0.
class QDependentRule {
 public:
  QDependentRule(ShrinkageRule base, double q);

  double operator()(double x, double alpha) const;

  const ShrinkageRule& base() const noexcept { return base_; }
  double q() const noexcept { return q_; }

 private:
  ShrinkageRule base_;
  double q_;
};

// Throws DomainError unless q is in [0, 2].
QDependentRule wrap_q(ShrinkageRule base, double q);

// c_q = 2^(q-2) (2-q)^(2-q) / (1-q)^(1-q) on [0, 1], continuous at q = 1 (c_1 = 1/2).
double cq(double q);

namespace rules {

ShrinkageRule soft();
ShrinkageRule hard();
ShrinkageRule garotte();
ShrinkageRule hyperbolic();
// x^(2n+1) / (x^(2n) + alpha^(2n))
ShrinkageRule n_degree_garotte(int n);
// Twice differentiable rule: x^(2k+1) / ((2k+1) alpha^(2k)) inside, shifted identity outside.
ShrinkageRule smooth_k(int k);
ShrinkageRule diffusion1();
ShrinkageRule diffusion2();
// Firm shrinkage with fixed lower threshold alpha1; the second argument is the upper threshold.
// A fixed alpha1 only yields uniform thresholding constants for alpha <= alpha_max, so the
// declared c3 = d = alpha1 / alpha_max.
ShrinkageRule firm(double alpha1, double alpha_max = 1e3);
// x / (1 + alpha / |x|); its q = 2 expression is the exact ridge minimizer x / (1 + alpha).
ShrinkageRule ridge();
// The hard/soft interpolating rule (x - sign(x) q c_q alpha) 1{|x| > c_q alpha}.
ShrinkageRule hard_soft(double q);

}  // namespace rules

// The fixed catalog: soft, hard, garotte, hyperbolic, ndeg:1, ndeg:2, k:1, k:2, diff1, diff2,
// firm:1, firm:2, ridge.
std::vector<ShrinkageRule> catalog();

// Parses "soft", "hard", "garotte", "hyperbolic", "ndeg:<n>", "k:<k>", "diff1", "diff2",
// "firm:<alpha1>", "ridge", "hs:<q>" (and "hs", meaning hs at the caller's default q).
ShrinkageRule rule_by_name(std::string_view name, std::optional<double> default_q = std::nullopt);

// ---------------------------------------------------------------------------------------------
// Empirical axiom checking.

struct AxiomGrid {
  std::vector<double> xs;
  std::vector<double> alphas;

  // x in +-logspace(1e-4, 1e4, 200) plus 0, alpha in logspace(1e-3, 1e3, 50).
  static AxiomGrid default_grid();
};

enum class Axiom { kApproximation, kDecay, kThreshold, kOddSymmetry };

struct AxiomViolation {
  Axiom axiom;
  double x;
  double alpha;
  double lhs;
  double bound;
};

struct AxiomReport {
  std::string rule;
  std::size_t points_checked = 0;
  std::vector<AxiomViolation> violations;

  bool ok() const noexcept { return violations.empty(); }
};

AxiomReport check_axioms(const ShrinkageRule& rule, const AxiomGrid& grid);

std::string_view to_string(Axiom axiom);

}  // namespace lqshrink
