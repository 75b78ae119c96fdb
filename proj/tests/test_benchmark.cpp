#include <doctest.h>

#include "lqshrink/benchmark.hpp"
#include "lqshrink/error.hpp"

using namespace lqshrink;

TEST_CASE("top peaks are strict local maxima ranked by height") {
  Eigen::VectorXd g(10);
  g << 0, 3, 0, 1, 1, 0, 2, 0, 0, 5;
  CHECK(top_peaks(g, 2) == std::vector<Eigen::Index>{1, 9});
  CHECK(top_peaks(g, 3) == std::vector<Eigen::Index>{1, 6, 9});
  // the plateau at 3..4 counts once at its left end
  CHECK(top_peaks(g, 10) == std::vector<Eigen::Index>{1, 3, 6, 9});
  Eigen::VectorXd ties(5);
  ties << 1, 0, 1, 0, 1;
  CHECK(top_peaks(ties, 2) == std::vector<Eigen::Index>{0, 2});
  CHECK(top_peaks(Eigen::VectorXd::Zero(4), 2).empty());
  Eigen::VectorXd rising(3);
  rising << 1, 2, 2;
  CHECK(top_peaks(rising, 1) == std::vector<Eigen::Index>{1});
}

TEST_CASE("comparison configuration validation") {
  CompareConfig c;
  CHECK_NOTHROW(c.validate());
  c.q = 1.5;
  CHECK_THROWS_AS(c.validate(), DomainError);
  c = {};
  c.alpha = 0.0;
  CHECK_THROWS_AS(c.validate(), ConfigError);
  c = {};
  c.beta_count = 3;
  CHECK_THROWS_AS(c.validate(), ConfigError);
  c = {};
  c.beta_hi = c.beta_lo;
  CHECK_THROWS_AS(c.validate(), ConfigError);
}

TEST_CASE("comparison on a small well-separated problem") {
  BenchmarkSpec spec;
  spec.size = 40;
  spec.kernel = {KernelKind::kGaussianBlur, 0.02, 1.0};
  spec.spikes = {{25, 1.0}, {75, 0.7}};
  const auto problem = make_benchmark(spec);
  CompareConfig cfg;
  cfg.alpha = 1e-6;  // the data are small here: ||K^T f||_inf is about 4e-4
  cfg.max_iters = 20000;
  cfg.beta_count = 8;
  cfg.peaks = 2;
  const auto c = run_comparison(problem, cfg);
  CHECK(c.maxent_curve.points.size() == 8);
  CHECK(c.maxent.parameter == c.maxent_selection.alpha);
  CHECK(c.landweber.method == "landweber");
  REQUIRE(c.landweber_warm);
  CHECK(c.landweber_warm->method == "landweber_warm");
  CHECK(c.landweber.peaks == std::vector<Eigen::Index>{10, 30});
  CHECK(c.landweber.solution.minCoeff() >= 0.0);
  CHECK(c.landweber.nonzeros < c.maxent.nonzeros);
  cfg.warm_start = false;
  CHECK_FALSE(run_comparison(problem, cfg).landweber_warm);
}
