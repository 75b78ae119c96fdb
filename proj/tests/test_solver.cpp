#include <doctest.h>

#include <cmath>
#include <random>

#include <Eigen/SVD>

#include "lqshrink/error.hpp"
#include "lqshrink/penalty.hpp"
#include "lqshrink/solver.hpp"
#include "oracles.hpp"

using namespace lqshrink;

namespace {

struct Instance {
  Eigen::MatrixXd t;
  Eigen::VectorXd f;
};

// 6 x 10 underdetermined system with a 2-sparse solution plus a little noise.
Instance small_instance() {
  std::mt19937_64 rng(6010);
  Instance in{oracle::gaussian_matrix(6, 10, rng), {}};
  Eigen::VectorXd g = Eigen::VectorXd::Zero(10);
  g[2] = 1.5;
  g[7] = -0.8;
  in.f = in.t * g + 0.01 * Eigen::VectorXd(oracle::gaussian_matrix(6, 1, rng));
  return in;
}

}  // namespace

TEST_CASE("spectral norm estimate matches the largest singular value") {
  std::mt19937_64 rng(1);
  const Eigen::MatrixXd m = oracle::gaussian_matrix(12, 9, rng);
  const double sigma = Eigen::JacobiSVD<Eigen::MatrixXd>(m).singularValues()[0];
  CHECK(spectral_norm_estimate(LinearOperator::from_matrix(m), 1e-10) == doctest::Approx(sigma).epsilon(1e-6));
  CHECK(spectral_norm_estimate(LinearOperator::from_matrix(Eigen::MatrixXd::Zero(3, 3))) == 0.0);
}

TEST_CASE("q = 1 iteration reaches the exact lasso minimizer") {
  const auto in = small_instance();
  LandweberConfig cfg;
  cfg.q = 1.0;
  cfg.alpha = 0.5;
  cfg.rel_tol = 1e-13;
  const auto trace = landweber_shrink(LinearOperator::from_matrix(in.t), in.f, cfg);
  CHECK(trace.stop_reason == StopReason::kConverged);
  const auto exact = oracle::lasso_homotopy(in.t, in.f, cfg.alpha);
  const double ref = oracle::lasso_objective(in.t, in.f, cfg.alpha, exact);
  CHECK(oracle::relative_gap(trace.final_record().objective, ref) <= 1e-10);
  CHECK((trace.solution - exact).cwiseAbs().maxCoeff() < 1e-6);
  CHECK(objective_monotone_check(trace));
  CHECK(trace.records.size() == trace.iterations + 1);
  CHECK(trace.records.front().iteration == 0);
  CHECK(trace.final_record().iteration == trace.iterations);
  CHECK(fixed_point_residual(LinearOperator::from_matrix(in.t), in.f, cfg, trace.solution) < 1e-10);
}

TEST_CASE("q = 0 iteration ends at a fixed point no better than the global optimum") {
  const auto in = small_instance();
  LandweberConfig cfg;
  cfg.q = 0.0;
  cfg.alpha = 0.05;
  const auto trace = landweber_shrink(LinearOperator::from_matrix(in.t), in.f, cfg);
  const auto best = oracle::exhaustive_l0(in.t, in.f, cfg.alpha);
  const double obj = trace.final_record().objective;
  CHECK(obj >= best.objective * (1.0 - 1e-12));
  CHECK(obj == doctest::Approx((in.f - in.t * trace.solution).squaredNorm() +
                               cfg.alpha * static_cast<double>(count_nonzeros(trace.solution))));
  CHECK(objective_monotone_check(trace));
  CHECK(trace.stop_reason == StopReason::kConverged);
}

TEST_CASE("nonnegative mode keeps iterates in the orthant") {
  const auto in = small_instance();
  LandweberConfig cfg;
  cfg.q = 0.5;
  cfg.alpha = 0.01;
  cfg.nonneg = true;
  const auto trace = landweber_shrink(LinearOperator::from_matrix(in.t), in.f, cfg);
  CHECK(trace.solution.minCoeff() >= 0.0);
  CHECK(trace.solution[7] == 0.0);
}

TEST_CASE("normalization does not change the minimizer") {
  auto in = small_instance();
  in.t /= 4.0 * Eigen::JacobiSVD<Eigen::MatrixXd>(in.t).singularValues()[0];
  LandweberConfig cfg;
  cfg.q = 1.0;
  cfg.alpha = 1e-3;
  cfg.rel_tol = 1e-14;
  cfg.max_iters = 2000000;
  const auto a = landweber_shrink(LinearOperator::from_matrix(in.t), in.f, cfg);
  cfg.normalize_operator = false;
  const auto b = landweber_shrink(LinearOperator::from_matrix(in.t), in.f, cfg);
  CHECK(a.operator_scale > 0.0);
  CHECK(b.operator_scale == 1.0);
  CHECK(oracle::relative_gap(a.final_record().objective, b.final_record().objective) < 1e-9);
  CHECK(a.iterations < b.iterations);
}

TEST_CASE("warm start at the minimizer stops immediately") {
  const auto in = small_instance();
  LandweberConfig cfg;
  cfg.q = 1.0;
  cfg.alpha = 0.5;
  cfg.initial = oracle::lasso_homotopy(in.t, in.f, cfg.alpha);
  const auto trace = landweber_shrink(LinearOperator::from_matrix(in.t), in.f, cfg);
  CHECK(trace.iterations == 1);
}

TEST_CASE("snapshots follow snapshot_every and the final iterate is always kept") {
  const auto in = small_instance();
  LandweberConfig cfg;
  cfg.q = 1.0;
  cfg.alpha = 0.5;
  cfg.max_iters = 250;
  cfg.rel_tol = 1e-300;
  cfg.snapshot_every = 100;
  const auto trace = landweber_shrink(LinearOperator::from_matrix(in.t), in.f, cfg);
  CHECK(trace.stop_reason == StopReason::kMaxIterations);
  CHECK(trace.iterations == 250);
  std::size_t snaps = 0;
  for (const auto& r : trace.records) snaps += r.snapshot.has_value();
  CHECK(snaps == 4);  // 0, 100, 200 and the final one
  CHECK(trace.final_record().snapshot.has_value());
}

TEST_CASE("an unnormalized expansive operator diverges") {
  LandweberConfig cfg;
  cfg.q = 1.0;
  cfg.alpha = 1e-3;
  cfg.normalize_operator = false;
  try {
    landweber_shrink(LinearOperator::from_matrix(10.0 * Eigen::MatrixXd::Identity(3, 3)),
                     Eigen::VectorXd::Ones(3), cfg);
    FAIL("expected DivergenceError");
  } catch (const DivergenceError& e) {
    CHECK(e.iteration() > 1);
  }
}

TEST_CASE("configuration errors") {
  const auto op = LinearOperator::from_matrix(Eigen::MatrixXd::Identity(3, 3));
  LandweberConfig cfg;
  cfg.q = 1.5;
  CHECK_THROWS_AS(landweber_shrink(op, Eigen::VectorXd::Ones(3), cfg), DomainError);
  cfg.q = 0.3;
  cfg.rule = rules::n_degree_garotte(1);
  CHECK_THROWS_AS(landweber_shrink(op, Eigen::VectorXd::Ones(3), cfg), HypothesisError);
  cfg.rule.reset();
  CHECK_THROWS_AS(landweber_shrink(op, Eigen::VectorXd::Ones(4), cfg), DimensionError);
  cfg.initial = Eigen::VectorXd::Zero(2);
  CHECK_THROWS_AS(landweber_shrink(op, Eigen::VectorXd::Ones(3), cfg), DimensionError);
  cfg.initial.reset();
  cfg.max_iters = 0;
  CHECK_THROWS_AS(landweber_shrink(op, Eigen::VectorXd::Ones(3), cfg), DomainError);
  CHECK(to_string(StopReason::kConverged) == "converged");
}

TEST_CASE("monotonicity check ignores the starting record") {
  SolverTrace t;
  for (double obj : {5.0, 1.0, 2.0}) t.records.push_back({t.records.size(), 0.0, 0.0, obj, 0, std::nullopt});
  CHECK_FALSE(objective_monotone_check(t));
  t.records[2].objective = 1.0 + 1e-12;
  CHECK(objective_monotone_check(t));
  t.records = {{0, 0.0, 0.0, 1.0, 0, std::nullopt}, {1, 0.0, 0.0, 3.0, 0, std::nullopt}};
  CHECK(objective_monotone_check(t));
}
