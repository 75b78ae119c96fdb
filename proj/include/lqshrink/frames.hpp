#pragma once

#include <cstdint>
#include <functional>

#include <Eigen/Core>

namespace lqshrink {

// A finite frame for R^d given by its synthesis matrix F (d x N, columns are frame vectors).
class Frame {
 public:
  explicit Frame(Eigen::MatrixXd synthesis);

  const Eigen::MatrixXd& synthesis() const noexcept { return synthesis_; }
  Eigen::Index dim() const noexcept { return synthesis_.rows(); }
  Eigen::Index size() const noexcept { return synthesis_.cols(); }

  // c -> sum_n c_n f_n
  Eigen::VectorXd synthesize(const Eigen::VectorXd& coeffs) const;
  // g -> (<g, f_n>)_n
  Eigen::VectorXd analyze(const Eigen::VectorXd& g) const;
  // S = F F^T
  Eigen::MatrixXd frame_operator() const;

  static Frame orthonormal_basis(Eigen::Index d);
  // Three unit vectors at 120 degrees in R^2.
  static Frame mercedes_benz();

 private:
  Eigen::MatrixXd synthesis_;
};

struct FrameBounds {
  double lower;
  double upper;
};

// Extreme eigenvalues of S. Throws NotAFrameError when the lower bound vanishes (rank-deficient
// synthesis, relative tolerance 1e-12).
FrameBounds frame_bounds(const Frame& frame);

// Dual frame with synthesis S^{-1} F.
Frame canonical_dual(const Frame& frame);

// A pair (F, F~) with F F~^T = Id.
class BiFrame {
 public:
  // Throws NotAFrameError if the pair does not reconstruct within `tolerance` (max-abs entry of
  // F F~^T - Id) or dimensions disagree.
  BiFrame(Frame primal, Frame dual, double tolerance = 1e-10);

  static BiFrame canonical(const Frame& frame);
  static BiFrame orthonormal(Eigen::Index d);

  const Frame& primal() const noexcept { return primal_; }
  const Frame& dual() const noexcept { return dual_; }
  Eigen::Index dim() const noexcept { return primal_.dim(); }
  Eigen::Index size() const noexcept { return primal_.size(); }

  // max |F F~^T - Id|
  double reconstruction_error() const;
  // F~^T F, the coefficient-space operator of the pair.
  Eigen::MatrixXd coefficient_operator() const;

 private:
  Frame primal_;
  Frame dual_;
};

// Moore-Penrose inverse via SVD; singular values below rcond * sigma_max are treated as zero.
Eigen::MatrixXd make_pseudo_inverse(const Eigen::MatrixXd& op, double rcond = 1e-12);

// L, a generalized inverse L# with L L# L = L, and data h.
class ForwardProblem {
 public:
  // Computes the Moore-Penrose inverse and verifies L L# L = L within 1e-8 (relative).
  ForwardProblem(Eigen::MatrixXd op, Eigen::VectorXd data);
  // Uses a caller-supplied generalized inverse; verified the same way.
  ForwardProblem(Eigen::MatrixXd op, Eigen::MatrixXd pseudo_inverse, Eigen::VectorXd data);

  const Eigen::MatrixXd& op() const noexcept { return op_; }
  const Eigen::MatrixXd& pseudo_inverse() const noexcept { return pinv_; }
  const Eigen::VectorXd& data() const noexcept { return data_; }

  // ||L L# h - h||, zero iff h is in range(L).
  double range_residual() const;

 private:
  Eigen::MatrixXd op_;
  Eigen::MatrixXd pinv_;
  Eigen::VectorXd data_;
};

// Matrix-free linear map with its adjoint.
struct LinearOperator {
  Eigen::Index rows = 0;
  Eigen::Index cols = 0;
  std::function<Eigen::VectorXd(const Eigen::VectorXd&)> apply;
  std::function<Eigen::VectorXd(const Eigen::VectorXd&)> apply_adjoint;

  static LinearOperator from_matrix(Eigen::MatrixXd m);
};

// Estimate of sup ||M x||^q / ||x||^q over x != 0 in the weighted quasi-norm
// ||x||^q = sum_n alpha_n |x_n|^q (q = 0 counts weighted nonzeros). Probes the canonical basis
// (exact for q <= 1) and `random_probes` Gaussian and sparse vectors. Always finite.
double boundedness_audit(const Eigen::MatrixXd& op, double q, const Eigen::VectorXd& weights,
                         int random_probes = 200, std::uint64_t seed = 1);

}  // namespace lqshrink
