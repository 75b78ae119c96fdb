#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "lqshrink/error.hpp"
#include "lqshrink/modelsel.hpp"
#include "lqshrink/penalty.hpp"
#include "oracles.hpp"

using namespace lqshrink;

namespace {

RegCurve curve_from(const std::vector<std::pair<double, double>>& xy) {
  RegCurve c;
  for (std::size_t i = 0; i < xy.size(); ++i) {
    c.points.push_back({std::pow(10.0, static_cast<double>(i)), xy[i].first, xy[i].second, 0.0, 0});
  }
  return c;
}

}  // namespace

TEST_CASE("log grid endpoints and spacing") {
  const auto g = log_alpha_grid(1e-3, 1e1, 5);
  REQUIRE(g.size() == 5);
  CHECK(g[0] == doctest::Approx(1e-3));
  CHECK(g[1] == doctest::Approx(1e-2));
  CHECK(g[4] == doctest::Approx(1e1));
  CHECK(log_alpha_grid(2.0, 2.0, 1) == std::vector<double>{2.0});
  CHECK_THROWS_AS(log_alpha_grid(0.0, 1.0, 3), DomainError);
}

TEST_CASE("the corner of a sharp L is chosen") {
  const auto c = curve_from({{0.0, 10.0}, {0.01, 5.0}, {0.02, 1.0}, {3.0, 0.9}, {6.0, 0.8}, {9.0, 0.7}});
  const auto sel = max_curvature_alpha(c, CurvatureScale::kLinear);
  CHECK(sel.index == 2);
  CHECK(sel.alpha == 100.0);
  CHECK(std::isnan(sel.curvatures.front()));
  CHECK(std::isnan(sel.curvatures.back()));
  CHECK(sel.curvatures[2] > 0.0);
}

TEST_CASE("constant curvature ties go to the smallest alpha") {
  std::vector<std::pair<double, double>> xy;
  for (int i = 0; i < 9; ++i) {
    const double t = std::numbers::pi + 0.5 * std::numbers::pi * i / 8.0;
    xy.emplace_back(1.0 + std::cos(t), 1.0 + std::sin(t));
  }
  const auto sel = max_curvature_alpha(curve_from(xy), CurvatureScale::kLinear);
  CHECK(sel.index == 1);
  for (std::size_t i = 1; i + 1 < xy.size(); ++i) CHECK(sel.curvatures[i] == doctest::Approx(1.0));
}

TEST_CASE("unsorted input is handled by alpha order") {
  auto c = curve_from({{0.0, 10.0}, {0.01, 5.0}, {0.02, 1.0}, {3.0, 0.9}, {6.0, 0.8}, {9.0, 0.7}});
  std::swap(c.points[0], c.points[5]);
  std::swap(c.points[1], c.points[3]);
  const auto sel = max_curvature_alpha(c, CurvatureScale::kLinear);
  CHECK(sel.alpha == 100.0);
  CHECK(c.points[sel.index].alpha == 100.0);
}

TEST_CASE("curvature selection failures") {
  CHECK_THROWS_AS(max_curvature_alpha(curve_from({{0, 1}, {1, 0}, {2, 0}, {3, 0}})), DomainError);
  // a straight line has no positive curvature
  CHECK_THROWS_WITH(max_curvature_alpha(curve_from({{0, 5}, {1, 4}, {2, 3}, {3, 2}, {4, 1}}),
                                        CurvatureScale::kLinear),
                    "no curvature maximum");
}

TEST_CASE("closed-form sweep on an orthonormal problem") {
  std::mt19937_64 rng(8);
  SweepProblem p{Eigen::MatrixXd::Identity(20, 20), oracle::gaussian_matrix(20, 1, rng), std::nullopt, {}};
  const auto grid = log_alpha_grid(1e-3, 1e1, 15);
  const auto c = sweep_alpha(p, 1.0, rules::hard_soft(1.0), grid, SolverChoice::kClosedForm);
  REQUIRE(c.points.size() == 15);
  CHECK(c.monotonicity_warnings.empty());
  for (std::size_t i = 0; i < c.points.size(); ++i) {
    const auto& pt = c.points[i];
    CHECK(pt.alpha == grid[i]);
    CHECK(pt.objective == doctest::Approx(pt.residual_sq + pt.alpha * pt.penalty));
    CHECK(pt.nonzeros == count_nonzeros(c.solutions[i]));
    if (i > 0) CHECK(pt.penalty <= c.points[i - 1].penalty);
  }
  // soft threshold at alpha/2 of v = h
  Eigen::VectorXd v = p.data;
  for (Eigen::Index n = 0; n < v.size(); ++n) v[n] = std::copysign(std::max(std::abs(v[n]) - grid[7] / 2, 0.0), v[n]);
  CHECK((c.solutions[7] - v).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("landweber sweep agrees with the closed form for L = Id") {
  std::mt19937_64 rng(9);
  SweepProblem p{Eigen::MatrixXd::Identity(8, 8), oracle::gaussian_matrix(8, 1, rng), std::nullopt, {}};
  const auto grid = log_alpha_grid(1e-2, 1.0, 5);
  const auto a = sweep_alpha(p, 1.0, rules::hard_soft(1.0), grid, SolverChoice::kClosedForm);
  const auto b = sweep_alpha(p, 1.0, rules::hard_soft(1.0), grid, SolverChoice::kLandweber);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    CHECK(b.points[i].residual_sq == doctest::Approx(a.points[i].residual_sq).epsilon(1e-6));
    CHECK(b.points[i].nonzeros == a.points[i].nonzeros);
  }
}

TEST_CASE("sweep errors carry the alpha") {
  SweepProblem p{Eigen::MatrixXd::Identity(3, 3), Eigen::VectorXd::Ones(3), std::nullopt, {}};
  const std::vector<double> bad{1.0, 0.5};
  CHECK_THROWS_AS(sweep_alpha(p, 1.0, rules::soft(), bad, SolverChoice::kClosedForm), DomainError);
  const std::vector<double> grid{0.1, 1.0};
  CHECK_THROWS_WITH_AS(sweep_alpha(p, 0.1, rules::n_degree_garotte(1), grid, SolverChoice::kClosedForm),
                       doctest::Contains("alpha = 0.1"), Error);
}

TEST_CASE("q sweep returns one row per q") {
  std::mt19937_64 rng(10);
  // overdetermined, so the residual has a noise floor and the L-curve a corner
  const Eigen::MatrixXd t = oracle::gaussian_matrix(45, 30, rng) / 6.0 + Eigen::MatrixXd::Identity(45, 30);
  Eigen::VectorXd g = Eigen::VectorXd::Zero(30);
  g[3] = 2.0;
  g[17] = -1.0;
  g[25] = 1.5;
  SweepProblem p{t, t * g + 0.05 * Eigen::VectorXd(oracle::gaussian_matrix(45, 1, rng)), std::nullopt, {}};
  const std::vector<double> qs{0.0, 0.5, 1.0};
  const auto grid = log_alpha_grid(1e-4, 1e1, 21);
  const auto rows = q_sweep(p, qs, grid, SolverChoice::kLandweber);
  REQUIRE(rows.size() == 3);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    CHECK(rows[i].q == qs[i]);
    CHECK(rows[i].alpha > grid.front());
    CHECK(rows[i].alpha < grid.back());
  }
}

TEST_CASE("maxent beta sweep") {
  Eigen::VectorXd f(4);
  f << 0.9, 0.1, 0.4, 0.05;
  const auto grid = log_alpha_grid(1e-4, 10.0, 6);
  const auto c = sweep_beta_maxent(Eigen::MatrixXd::Identity(4, 4), f, grid);
  REQUIRE(c.points.size() == 6);
  CHECK(c.monotonicity_warnings.empty());
  for (std::size_t i = 0; i < c.points.size(); ++i) {
    CHECK(c.points[i].penalty >= 0.0);
    for (Eigen::Index n = 0; n < 4; ++n) {
      CHECK(c.solutions[i][n] == doctest::Approx(oracle::maxent_scalar(f[n], grid[i])).epsilon(1e-8));
    }
  }
  CHECK(c.points.back().penalty < c.points.front().penalty);
}

TEST_CASE("count_above uses a relative cut") {
  Eigen::VectorXd g(4);
  g << 1.0, 1e-7, 2e-6, 0.5;
  CHECK(count_above(g) == 3);
  CHECK(count_above(g, 1e-1) == 2);
  CHECK(count_above(Eigen::VectorXd()) == 0);
}
