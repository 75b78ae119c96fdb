#include "lqshrink/frames.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <numbers>

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include "lqshrink/error.hpp"
#include "lqshrink/penalty.hpp"
#include "lqshrink/random.hpp"

namespace lqshrink {

namespace {

constexpr double kRankTolerance = 1e-12;

std::string shape(const Eigen::MatrixXd& m) {
  return std::to_string(m.rows()) + "x" + std::to_string(m.cols());
}

void check_generalized_inverse(const Eigen::MatrixXd& op, const Eigen::MatrixXd& pinv) {
  if (pinv.rows() != op.cols() || pinv.cols() != op.rows()) {
    throw DimensionError("pseudo-inverse has shape " + shape(pinv) + " for operator " + shape(op));
  }
  const double scale = std::max(op.cwiseAbs().maxCoeff(), 1.0);
  const double err = (op * pinv * op - op).cwiseAbs().maxCoeff();
  if (!(err <= 1e-8 * scale)) {
    throw DomainError("L L# L != L (max deviation " + std::to_string(err) + ")");
  }
}

}  // namespace

Frame::Frame(Eigen::MatrixXd synthesis) : synthesis_(std::move(synthesis)) {
  if (synthesis_.rows() == 0 || synthesis_.cols() == 0) throw NotAFrameError("empty frame");
}

Eigen::VectorXd Frame::synthesize(const Eigen::VectorXd& coeffs) const {
  if (coeffs.size() != size()) throw DimensionError("synthesis: expected " + std::to_string(size()) + " coefficients");
  return synthesis_ * coeffs;
}

Eigen::VectorXd Frame::analyze(const Eigen::VectorXd& g) const {
  if (g.size() != dim()) throw DimensionError("analysis: expected vector of length " + std::to_string(dim()));
  return synthesis_.transpose() * g;
}

Eigen::MatrixXd Frame::frame_operator() const { return synthesis_ * synthesis_.transpose(); }

Frame Frame::orthonormal_basis(Eigen::Index d) { return Frame(Eigen::MatrixXd::Identity(d, d)); }

Frame Frame::mercedes_benz() {
  Eigen::MatrixXd f(2, 3);
  for (int n = 0; n < 3; ++n) {
    const double angle = std::numbers::pi / 2 + 2 * std::numbers::pi * n / 3;
    f(0, n) = std::cos(angle);
    f(1, n) = std::sin(angle);
  }
  return Frame(std::move(f));
}

FrameBounds frame_bounds(const Frame& frame) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(frame.frame_operator(), Eigen::EigenvaluesOnly);
  const auto& values = eig.eigenvalues();
  const double upper = values.maxCoeff();
  const double lower = values.minCoeff();
  if (!(upper > 0.0) || !(lower > kRankTolerance * upper)) {
    throw NotAFrameError("not a frame: synthesis " + shape(frame.synthesis()) +
                         " is rank deficient (lower bound " + std::to_string(lower) + ")");
  }
  return {lower, upper};
}

Frame canonical_dual(const Frame& frame) {
  frame_bounds(frame);
  Eigen::LLT<Eigen::MatrixXd> llt(frame.frame_operator());
  if (llt.info() != Eigen::Success) throw NotAFrameError("frame operator is singular");
  return Frame(llt.solve(frame.synthesis()));
}

BiFrame::BiFrame(Frame primal, Frame dual, double tolerance)
    : primal_(std::move(primal)), dual_(std::move(dual)) {
  if (primal_.dim() != dual_.dim() || primal_.size() != dual_.size()) {
    throw NotAFrameError("bi-frame: primal " + shape(primal_.synthesis()) + " and dual " +
                         shape(dual_.synthesis()) + " differ in shape");
  }
  const double err = reconstruction_error();
  if (!(err <= tolerance)) {
    throw NotAFrameError("bi-frame: F F~^T deviates from identity by " + std::to_string(err));
  }
}

BiFrame BiFrame::canonical(const Frame& frame) { return BiFrame(frame, canonical_dual(frame)); }

BiFrame BiFrame::orthonormal(Eigen::Index d) {
  return BiFrame(Frame::orthonormal_basis(d), Frame::orthonormal_basis(d));
}

double BiFrame::reconstruction_error() const {
  const Eigen::MatrixXd product = primal_.synthesis() * dual_.synthesis().transpose();
  return (product - Eigen::MatrixXd::Identity(dim(), dim())).cwiseAbs().maxCoeff();
}

Eigen::MatrixXd BiFrame::coefficient_operator() const {
  return dual_.synthesis().transpose() * primal_.synthesis();
}

Eigen::MatrixXd make_pseudo_inverse(const Eigen::MatrixXd& op, double rcond) {
  if (op.size() == 0) return Eigen::MatrixXd(op.cols(), op.rows());
  Eigen::BDCSVD<Eigen::MatrixXd> svd(op, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const auto& sigma = svd.singularValues();
  const double cutoff = rcond * (sigma.size() > 0 ? sigma[0] : 0.0);
  Eigen::VectorXd inv = Eigen::VectorXd::Zero(sigma.size());
  for (Eigen::Index i = 0; i < sigma.size(); ++i) {
    if (sigma[i] > cutoff && sigma[i] > 0.0) inv[i] = 1.0 / sigma[i];
  }
  return svd.matrixV() * inv.asDiagonal() * svd.matrixU().transpose();
}

ForwardProblem::ForwardProblem(Eigen::MatrixXd op, Eigen::VectorXd data)
    : ForwardProblem(op, make_pseudo_inverse(op), std::move(data)) {}

ForwardProblem::ForwardProblem(Eigen::MatrixXd op, Eigen::MatrixXd pseudo_inverse,
                               Eigen::VectorXd data)
    : op_(std::move(op)), pinv_(std::move(pseudo_inverse)), data_(std::move(data)) {
  if (data_.size() != op_.rows()) {
    throw DimensionError("data has length " + std::to_string(data_.size()) + " but operator is " +
                         shape(op_));
  }
  check_generalized_inverse(op_, pinv_);
}

double ForwardProblem::range_residual() const { return (op_ * (pinv_ * data_) - data_).norm(); }

LinearOperator LinearOperator::from_matrix(Eigen::MatrixXd m) {
  auto shared = std::make_shared<const Eigen::MatrixXd>(std::move(m));
  return {shared->rows(), shared->cols(),
          [shared](const Eigen::VectorXd& x) -> Eigen::VectorXd { return *shared * x; },
          [shared](const Eigen::VectorXd& y) -> Eigen::VectorXd {
            return shared->transpose() * y;
          }};
}

double boundedness_audit(const Eigen::MatrixXd& op, double q, const Eigen::VectorXd& weights,
                         int random_probes, std::uint64_t seed) {
  require_q(q);
  const Eigen::Index n = op.cols();
  if (op.rows() != n || weights.size() != n) {
    throw DimensionError("boundedness_audit: need a square operator matching the weights");
  }
  auto quasi = [&](const Eigen::VectorXd& x) { return weighted_lq(x, weights, q); };
  double worst = 0.0;
  auto probe = [&](const Eigen::VectorXd& x) {
    const double denom = quasi(x);
    if (denom > 0.0) worst = std::max(worst, quasi(op * x) / denom);
  };

  for (Eigen::Index k = 0; k < n; ++k) probe(Eigen::VectorXd::Unit(n, k));

  PortableRng rng(seed);
  for (int p = 0; p < random_probes; ++p) {
    Eigen::VectorXd x = Eigen::VectorXd::Zero(n);
    if (p % 2 == 0) {
      for (Eigen::Index k = 0; k < n; ++k) x[k] = rng.gaussian();
    } else {
      const Eigen::Index support = std::min<Eigen::Index>(n, 1 + p % 3);
      for (Eigen::Index s = 0; s < support; ++s) x[rng.index(n)] = rng.gaussian();
    }
    probe(x);
  }
  return worst;
}

}  // namespace lqshrink
