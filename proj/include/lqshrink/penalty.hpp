#pragma once

#include <cmath>

#include <Eigen/Core>

#include "lqshrink/error.hpp"

namespace lqshrink {

// |x|^q with the counting convention 0^0 = 0, so q = 0 yields the indicator of x != 0.
inline double abs_pow(double x, double q) {
  if (q == 0.0) return x != 0.0 ? 1.0 : 0.0;
  if (q == 1.0) return std::abs(x);
  if (q == 2.0) return x * x;
  return std::pow(std::abs(x), q);
}

inline void require_q(double q, double lo = 0.0, double hi = 2.0) {
  if (!(q >= lo && q <= hi)) {
    throw DomainError("q = " + std::to_string(q) + " outside [" + std::to_string(lo) + ", " +
                      std::to_string(hi) + "]");
  }
}

// sum_n weights_n |coeffs_n|^q
inline double weighted_lq(const Eigen::VectorXd& coeffs, const Eigen::VectorXd& weights, double q) {
  if (coeffs.size() != weights.size()) {
    throw DimensionError("weighted_lq: coefficient and weight lengths differ");
  }
  double sum = 0.0;
  for (Eigen::Index n = 0; n < coeffs.size(); ++n) sum += weights[n] * abs_pow(coeffs[n], q);
  return sum;
}

// sum_n |coeffs_n|^q (unit weights)
inline double lq_sum(const Eigen::VectorXd& coeffs, double q) {
  double sum = 0.0;
  for (Eigen::Index n = 0; n < coeffs.size(); ++n) sum += abs_pow(coeffs[n], q);
  return sum;
}

inline Eigen::Index count_nonzeros(const Eigen::VectorXd& x) {
  Eigen::Index k = 0;
  for (Eigen::Index n = 0; n < x.size(); ++n) k += (x[n] != 0.0);
  return k;
}

}  // namespace lqshrink
