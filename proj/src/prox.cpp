#include "lqshrink/prox.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "lqshrink/error.hpp"
#include "lqshrink/parallel.hpp"
#include "lqshrink/penalty.hpp"

namespace lqshrink {

namespace {

constexpr int kGridPoints = 10001;  // 10^4 cells on [0, |v|]
constexpr double kResolution = 1e-12;

void require_hypothesis(double q, const ShrinkageRule& rule) {
  require_q(q);
  if (q < rule.min_q()) {
    throw HypothesisError("q = " + std::to_string(q) + " is below 1/rho = " +
                          std::to_string(rule.min_q()) + " for rule '" + rule.name() + "'");
  }
}

// i^q for i = 0..kGridPoints-1, so that the grid penalty (i h)^q = h^q i^q costs one multiply.
// Cached per thread for the most recent q.
const std::vector<double>& power_table(double q) {
  thread_local double cached_q = std::numeric_limits<double>::quiet_NaN();
  thread_local std::vector<double> table;
  if (!(cached_q == q)) {
    table.resize(kGridPoints);
    for (int i = 0; i < kGridPoints; ++i) table[i] = abs_pow(static_cast<double>(i), q);
    cached_q = q;
  }
  return table;
}

// Minimizer of phi(w) = (a - w)^2 + alpha w^q over w in (0, a], a > 0, alpha > 0.
//
// Restricting to [0, |v|] loses nothing: for w outside it, moving w toward v shrinks the
// quadratic term and does not increase |w|^q, and a sign opposite to v is strictly worse than -w.
double best_positive(double a, double alpha, double q) {
  auto phi = [&](double w) { return (a - w) * (a - w) + alpha * abs_pow(w, q); };

  const double h = a / (kGridPoints - 1);
  const double hq = abs_pow(h, q);
  const auto& powers = power_table(q);
  int best = kGridPoints - 1;
  double best_val = phi(a);
  for (int i = 1; i < kGridPoints - 1; ++i) {
    const double w = i * h;
    const double val = (a - w) * (a - w) + alpha * hq * powers[i];
    if (val < best_val) {
      best_val = val;
      best = i;
    }
  }

  // Golden-section refinement inside the neighbouring cells.
  double lo = (best - 1) * h;
  double hi = best == kGridPoints - 1 ? a : (best + 1) * h;
  lo = std::max(lo, 0.0);
  constexpr double kInvPhi = 0.6180339887498949;
  double x1 = hi - kInvPhi * (hi - lo);
  double x2 = lo + kInvPhi * (hi - lo);
  double f1 = phi(x1);
  double f2 = phi(x2);
  for (int iter = 0; iter < 200 && hi - lo > kResolution; ++iter) {
    if (f1 <= f2) {
      hi = x2;
      x2 = x1;
      f2 = f1;
      x1 = hi - kInvPhi * (hi - lo);
      f1 = phi(x1);
    } else {
      lo = x1;
      x1 = x2;
      f1 = f2;
      x2 = lo + kInvPhi * (hi - lo);
      f2 = phi(x2);
    }
  }
  double w = f1 <= f2 ? x1 : x2;
  if (w <= 0.0) w = best * h;

  // Objective values are flat near the minimum, so golden section alone pins w only to about
  // sqrt(eps). Polish on the derivative, which is smooth for w > 0 and q > 0.
  if (q > 0.0) {
    auto dphi = [&](double x) { return -2.0 * (a - x) + alpha * q * std::pow(x, q - 1.0); };
    const double span = 1e-6 * std::max(a, 1.0);
    double l = std::max(w - span, 0.5 * w);
    double r = std::min(w + span, a);
    if (l < r && dphi(l) < 0.0 && dphi(r) > 0.0) {
      for (int iter = 0; iter < 200; ++iter) {
        const double mid = 0.5 * (l + r);
        if (mid <= l || mid >= r) break;
        (dphi(mid) < 0.0 ? l : r) = mid;
      }
      const double polished = 0.5 * (l + r);
      if (phi(polished) <= phi(w)) w = polished;
    }
  }

  // Keep the best of refined point, grid point and right endpoint.
  double result = w;
  double result_val = phi(w);
  for (double cand : {best * h, a}) {
    const double val = phi(cand);
    if (val < result_val) {
      result = cand;
      result_val = val;
    }
  }
  return result;
}

}  // namespace

void DecoupledProblem::validate() const {
  if (v.size() != weights.size()) {
    throw DimensionError("decoupled problem: v has " + std::to_string(v.size()) +
                         " entries but there are " + std::to_string(weights.size()) + " weights");
  }
  require_q(q);
  if ((weights.array() < 0.0).any()) throw DomainError("weights must be nonnegative");
}

double scalar_objective(double v, double alpha, double omega, double q) {
  return (v - omega) * (v - omega) + alpha * abs_pow(omega, q);
}

double decoupled_objective(const DecoupledProblem& p, const Eigen::VectorXd& omega) {
  if (omega.size() != p.v.size()) throw DimensionError("decoupled objective: length mismatch");
  return (p.v - omega).squaredNorm() + weighted_lq(omega, p.weights, p.q);
}

ProxResult shrink_minimize(const DecoupledProblem& p, const ShrinkageRule& rule) {
  p.validate();
  require_hypothesis(p.q, rule);
  const QDependentRule wrapped(rule, p.q);
  ProxResult out;
  out.omega.resize(p.v.size());
  for (Eigen::Index n = 0; n < p.v.size(); ++n) out.omega[n] = wrapped(p.v[n], p.weights[n]);
  out.objective = decoupled_objective(p, out.omega);
  if (!std::isfinite(out.objective)) {
    throw DomainError("shrink_minimize: non-finite objective for rule '" + rule.name() + "'");
  }
  return out;
}

double oracle_scalar(double v, double alpha, double q) {
  require_q(q);
  if (!(alpha >= 0.0)) throw DomainError("oracle_scalar: alpha must be nonnegative");
  const double a = std::abs(v);
  if (a == 0.0) return 0.0;
  if (alpha == 0.0) return v;

  const double w = best_positive(a, alpha, q);
  // w = 0 is compared explicitly: the penalty jumps there for q = 0 and has a cusp for q < 1.
  const double at_zero = a * a;
  const double at_w = (a - w) * (a - w) + alpha * abs_pow(w, q);
  if (at_zero < at_w) return 0.0;
  return std::copysign(w, v);
}

ProxResult oracle_minimize(const DecoupledProblem& p) {
  p.validate();
  ProxResult out;
  out.omega.resize(p.v.size());
  for (Eigen::Index n = 0; n < p.v.size(); ++n) out.omega[n] = oracle_scalar(p.v[n], p.weights[n], p.q);
  out.objective = decoupled_objective(p, out.omega);
  return out;
}

double zero_threshold(double alpha, double q) {
  require_q(q, 0.0, 1.0);
  if (!(alpha >= 0.0)) throw DomainError("zero_threshold: alpha must be nonnegative");
  return std::pow(cq(q) * alpha, 1.0 / (2.0 - q));
}

std::vector<SamplePoint> log_grid_sample(double v_lo, double v_hi, int nv, double a_lo, double a_hi,
                                         int na) {
  if (nv < 1 || na < 1 || !(v_lo > 0.0) || !(a_lo > 0.0) || v_hi < v_lo || a_hi < a_lo) {
    throw DomainError("log_grid_sample: need positive increasing ranges and counts >= 1");
  }
  auto space = [](double lo, double hi, int n, int i) {
    if (n == 1) return lo;
    return std::pow(10.0, std::log10(lo) + (std::log10(hi) - std::log10(lo)) * i / (n - 1));
  };
  std::vector<SamplePoint> out;
  out.reserve(static_cast<std::size_t>(nv) * na);
  for (int i = 0; i < nv; ++i) {
    for (int j = 0; j < na; ++j) out.push_back({space(v_lo, v_hi, nv, i), space(a_lo, a_hi, na, j)});
  }
  return out;
}

std::vector<AuditRow> audit_rows(double q, const ShrinkageRule& rule,
                                 std::span<const SamplePoint> sample) {
  require_hypothesis(q, rule);
  const QDependentRule wrapped(rule, q);
  std::vector<AuditRow> rows(sample.size());
  parallel_for(sample.size(), [&](std::size_t i) {
    const auto [v, alpha] = sample[i];
    const double shrink = scalar_objective(v, alpha, wrapped(v, alpha), q);
    const double oracle = scalar_objective(v, alpha, oracle_scalar(v, alpha, q), q);
    double ratio;
    if (oracle == 0.0) {
      ratio = shrink == 0.0 ? 1.0 : std::numeric_limits<double>::infinity();
    } else {
      ratio = shrink / oracle;
    }
    rows[i] = {v, alpha, shrink, oracle, ratio};
  });
  return rows;
}

double constant_factor_audit(double q, const ShrinkageRule& rule,
                             std::span<const SamplePoint> sample) {
  if (sample.empty()) throw DomainError("constant_factor_audit: empty sample");
  double worst = 0.0;
  for (const auto& row : audit_rows(q, rule, sample)) worst = std::max(worst, row.ratio);
  return worst;
}

}  // namespace lqshrink
