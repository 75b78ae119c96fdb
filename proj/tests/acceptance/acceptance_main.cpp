// Acceptance run: one PASS/FAIL line per criterion.
//
//   acceptance [--expect-fail N[,N...]] [--workdir DIR]
//
// Exit status is 0 when every failing criterion is listed in --expect-fail, 1 otherwise.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "lqshrink/benchmark.hpp"
#include "lqshrink/error.hpp"
#include "lqshrink/frames.hpp"
#include "lqshrink/fredholm.hpp"
#include "lqshrink/matrix_io.hpp"
#include "lqshrink/prox.hpp"
#include "lqshrink/shrinkage.hpp"
#include "lqshrink/solver.hpp"
#include "lqshrink/variational.hpp"
#include "oracles.hpp"

using namespace lqshrink;
namespace fs = std::filesystem;

namespace {

// min ||f - K g||^2 + 1e-2 ||g||_1 on the default benchmark, from tests/reference/lasso_lars.py
// (scikit-learn LassoLars on the matrices written by --dump-benchmark)
constexpr double kLarsReference = 0.018515570514532197;

struct Outcome {
  bool pass;
  std::string detail;
};

class Stopwatch {
 public:
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

// 10^4 log-uniform (v, alpha) pairs, random sign on v.
std::vector<SamplePoint> random_sample() {
  std::mt19937_64 rng(20240601);
  std::uniform_real_distribution<double> lv(-3.0, 3.0), la(-2.0, 2.0), coin(0.0, 1.0);
  std::vector<SamplePoint> out;
  for (int i = 0; i < 10000; ++i) {
    const double v = std::pow(10.0, lv(rng)) * (coin(rng) < 0.5 ? -1.0 : 1.0);
    out.push_back({v, std::pow(10.0, la(rng))});
  }
  return out;
}

Outcome endpoint_exactness() {
  const Stopwatch sw;
  const auto sample = random_sample();
  double worst = 0.0;
  for (double q : {0.0, 1.0}) {
    const auto rule = wrap_q(rules::hard_soft(q), q);
    for (const auto& s : sample) {
      const double mine = scalar_objective(s.v, s.alpha, rule(s.v, s.alpha), q);
      const double ref = scalar_objective(s.v, s.alpha, oracle_scalar(s.v, s.alpha, q), q);
      worst = std::max(worst, std::abs(mine - ref) / ref);
    }
  }
  const double t = sw.seconds();
  return {worst <= 1e-9 && t < 10.0, fmt("max relative objective gap %.3g over 2x10000 points, %.2f s", worst, t)};
}

Outcome zero_region() {
  const auto sample = random_sample();
  std::size_t checked = 0, bad = 0;
  for (double q : {0.1, 0.3, 0.5, 0.7, 0.9}) {
    const auto rule = wrap_q(rules::hard_soft(q), q);
    for (const auto& s : sample) {
      if (!(std::abs(s.v) < 0.999 * zero_threshold(s.alpha, q))) continue;
      ++checked;
      if (oracle_scalar(s.v, s.alpha, q) != 0.0 || rule(s.v, s.alpha) != 0.0) ++bad;
    }
  }
  return {bad == 0 && checked > 0, fmt("%zu discrepancies in %zu zero-region points", bad, checked)};
}

Outcome constant_factor() {
  // Regression maxima of I_q(shrink) / I_q(oracle) on the 60 x 40 log grid
  // v in [1e-3, 1e3], alpha in [1e-2, 1e2], at q = 1/rho.
  const std::map<std::string, double> frozen{
      {"soft", 1.9230654751155309},     {"hard", 1.0},
      {"garotte", 1.7864978193200554},  {"hyperbolic", 1.4102248667248296},
      {"ndeg:1", 1.9999999999997502},   {"ndeg:2", 2.0000000000000004},
      {"k:1", 1.5773502691895591},      {"k:2", 1.6687403049764222},
      {"diff1", 1.1177767696674377},    {"diff2", 1.2104568921289811},
      {"firm:1", 79.91242717529498},    {"firm:2", 20.181596181070933},
      {"ridge", 1.9999700003999952},    {"hs:0.1", 1.0021140150340098},
      {"hs:0.2", 1.0070514234006838},   {"hs:0.3", 1.0127345704746387},
      {"hs:0.4", 1.0176652858725042},   {"hs:0.5", 1.0218850769605317},
      {"hs:0.6", 1.0247982231032933},   {"hs:0.7", 1.0253075360815735},
      {"hs:0.8", 1.0219460131673401},   {"hs:0.9", 1.0130325298532323}};
  const auto sample = log_grid_sample(1e-3, 1e3, 60, 1e-2, 1e2, 40);
  std::vector<std::pair<ShrinkageRule, double>> cases;
  for (const auto& r : catalog()) cases.emplace_back(r, r.min_q());
  for (int i = 1; i <= 9; ++i) cases.emplace_back(rules::hard_soft(i / 10.0), i / 10.0);

  std::string failures;
  double worst_drift = 0.0;
  for (const auto& [rule, q] : cases) {
    double lo = kInfinity, hi = 0.0;
    for (const auto& row : audit_rows(q, rule, sample)) {
      lo = std::min(lo, row.ratio);
      hi = std::max(hi, row.ratio);
    }
    const auto it = frozen.find(rule.name());
    const double drift = it == frozen.end() ? kInfinity : std::abs(hi / it->second - 1.0);
    worst_drift = std::max(worst_drift, drift);
    if (!std::isfinite(hi) || lo < 1.0 - 1e-12 || drift > 0.01) failures += " " + rule.name();
  }
  return {failures.empty(), fmt("%zu rules, max drift from frozen maxima %.3g%s%s", cases.size(), worst_drift,
                                failures.empty() ? "" : ", failing:", failures.c_str())};
}

Outcome axioms() {
  const auto grid = AxiomGrid::default_grid();
  std::size_t violations = 0, points = 0;
  for (const auto& r : catalog()) {
    const auto rep = check_axioms(r, grid);
    violations += rep.violations.size();
    points += rep.points_checked;
  }
  bool declared = true;
  for (int n : {1, 2, 3}) {
    const auto g = rules::n_degree_garotte(n);
    declared = declared && g.rho() == 2.0 * n && g.constants().c2 == 1.0;
    const auto k = rules::smooth_k(n);
    declared = declared && k.rho() == 2.0 * n && k.constants().c2 == 1.0;
  }
  declared = declared && rules::diffusion1().rho() == 1.0 && rules::diffusion2().rho() == 1.0;
  return {violations == 0 && declared,
          fmt("%zu violations over %zu rule evaluations; declared constants %s", violations, points,
              declared ? "as stated" : "WRONG")};
}

Outcome cq_curve() {
  bool mono = true;
  double prev = cq(0.0);
  for (int i = 1; i < 1000; ++i) {
    const double c = cq(i / 999.0);
    mono = mono && c < prev;
    prev = c;
  }
  const double gap = std::abs(cq(0.5) - oracle::cq_direct(0.5));
  const bool ends = cq(0.0) == 1.0 && cq(1.0) == 0.5;
  return {ends && mono && gap <= 1e-12,
          fmt("cq(0)=%.17g cq(1)=%.17g monotone=%s |cq(0.5)-direct|=%.3g", cq(0.0), cq(1.0), mono ? "yes" : "no", gap)};
}

Outcome frame_algebra() {
  std::mt19937_64 rng(6);
  std::uniform_int_distribution<int> dim(1, 20);
  double worst_dual = 0.0;
  for (int t = 0; t < 50; ++t) {
    const int d = dim(rng);
    std::uniform_int_distribution<int> size(d, 40);
    const Frame f(oracle::gaussian_matrix(d, size(rng), rng));
    const Frame dual = canonical_dual(f);
    const Eigen::MatrixXd prod = f.synthesis() * dual.synthesis().transpose();
    worst_dual = std::max(worst_dual, (prod - Eigen::MatrixXd::Identity(d, d)).cwiseAbs().maxCoeff());
  }
  double worst_mp = 0.0;
  int deficient = 0;
  for (int t = 0; t < 50; ++t) {
    const int r = dim(rng), c = dim(rng);
    Eigen::MatrixXd l;
    if (t % 2 == 0) {
      l = oracle::gaussian_matrix(r, c, rng);
    } else {
      const int k = std::max(1, std::min(r, c) - 1 - t % 3);
      l = oracle::gaussian_matrix(r, k, rng) * oracle::gaussian_matrix(k, c, rng);
      deficient += k < std::min(r, c);
    }
    const Eigen::MatrixXd p = make_pseudo_inverse(l);
    worst_mp = std::max(worst_mp, (l * p * l - l).cwiseAbs().maxCoeff() / std::max(1.0, l.cwiseAbs().maxCoeff()));
  }
  return {worst_dual <= 1e-10 && worst_mp <= 1e-8,
          fmt("max |F F~^T - Id| = %.3g; max |L L# L - L| = %.3g (%d rank-deficient)", worst_dual, worst_mp,
              deficient)};
}

Outcome decoupling() {
  std::mt19937_64 rng(7);
  double worst_eq = 0.0, worst_q0 = 0.0, worst_q1 = 0.0;
  for (int t = 0; t < 20; ++t) {
    const Eigen::Index d = 10;
    const Eigen::MatrixXd qm = oracle::random_orthogonal(d, rng);
    const Eigen::VectorXd h = oracle::gaussian_matrix(d, 1, rng);
    const double alpha = 0.1 + 0.1 * t;
    for (double q : {0.0, 0.5, 1.0}) {
      VariationalProblem p{ForwardProblem(Eigen::MatrixXd::Identity(d, d), h), BiFrame(Frame(qm), Frame(qm)),
                           Eigen::VectorXd::Constant(d, alpha), q, std::nullopt};
      Eigen::VectorXd w = oracle::gaussian_matrix(d, 1, rng);
      w[t % d] = 0.0;
      const double j = eval_Jq(p, qm * w).total;
      const double i = decoupled_objective({qm.transpose() * h, p.weights, q}, w);
      worst_eq = std::max(worst_eq, oracle::relative_gap(j, i));

      if (q == 0.0) {
        const double mine = eval_Jq(p, theorem1_minimizer(p, rules::hard_soft(0.0))).total;
        worst_q0 = std::max(worst_q0, oracle::relative_gap(mine, oracle::exhaustive_l0(qm, h, alpha).objective));
      } else if (q == 1.0) {
        Eigen::VectorXd v = qm.transpose() * h;
        for (Eigen::Index n = 0; n < d; ++n) v[n] = std::copysign(std::max(std::abs(v[n]) - alpha / 2, 0.0), v[n]);
        const Eigen::VectorXd g = theorem1_minimizer(p, rules::hard_soft(1.0));
        worst_q1 = std::max(worst_q1, (g - qm * v).cwiseAbs().maxCoeff());
      }
    }
  }
  return {worst_eq <= 1e-12 && worst_q0 <= 1e-12 && worst_q1 <= 1e-12,
          fmt("|J - I| rel %.3g; q=0 gap to exhaustive %.3g; q=1 distance to soft threshold %.3g", worst_eq,
              worst_q0, worst_q1)};
}

Outcome landweber_convex(const FredholmProblem& problem) {
  const Stopwatch sw;
  const Eigen::VectorXd f = problem_data(problem);
  const Eigen::MatrixXd& k = problem.kernel_matrix;
  LandweberConfig cfg;
  cfg.q = 1.0;
  cfg.alpha = 1e-2;
  cfg.max_iters = 2000000;
  cfg.snapshot_every = 0;
  const auto trace = landweber_shrink(LinearOperator::from_matrix(k), f, cfg);
  const double obj = trace.final_record().objective;
  // two references: a dual lower bound certifies obj - min <= obj - bound, and the
  // minimum computed separately with scikit-learn's LARS-lasso (lambda = alpha / 2, float64)
  const double bound = oracle::lasso_dual_bound(k, f, cfg.alpha, trace.solution);
  const double certified = (obj - bound) / bound;
  const double lars = kLarsReference;
  const double gap = (obj - lars) / lars;
  const bool mono = objective_monotone_check(trace);
  const double t = sw.seconds();
  return {certified <= 1e-6 && std::abs(gap) <= 1e-6 && mono && t < 60.0,
          fmt("alpha=1e-2: final %.17g; dual bound %.17g (certified gap %.3g); LARS %.17g (rel %.3g); "
              "%zu iterations, monotone=%s, %.1f s",
              obj, bound, certified, lars, gap, trace.iterations, mono ? "yes" : "no", t)};
}

std::string peaks_str(const std::vector<Eigen::Index>& p) {
  std::string s;
  for (auto i : p) s += (s.empty() ? "" : " ") + std::to_string(i);
  return s;
}

Outcome headline(const FredholmProblem& problem, const Comparison& c, double seconds) {
  const auto& lw = c.landweber;
  const auto& me = c.maxent;
  const bool a = lw.residual_norm <= me.residual_norm;
  const bool b = lw.nonzeros < me.nonzeros;
  bool cc = lw.peaks.size() >= 4;
  for (auto t : top_peaks(*problem.ground_truth, 4)) {
    bool hit = false;
    for (auto p : lw.peaks) hit = hit || std::abs(p - t) <= 1;
    cc = cc && hit;
  }
  return {a && b && cc && seconds < 300.0,
          fmt("(a) residual %.6g vs maxent %.6g at beta=%.3g: %s; (b) nonzeros %lld vs %lld: %s; "
              "(c) peaks [%s]: %s; %.1f s",
              lw.residual_norm, me.residual_norm, me.parameter, a ? "ok" : "no", static_cast<long long>(lw.nonzeros),
              static_cast<long long>(me.nonzeros), b ? "ok" : "no", peaks_str(lw.peaks).c_str(), cc ? "ok" : "no",
              seconds)};
}

Outcome warm_start(const Comparison& c) {
  if (!c.landweber_warm) return {false, "warm start not run"};
  const double gap = oracle::relative_gap(c.landweber_warm->objective, c.landweber.objective);
  return {gap <= 1e-4, fmt("cold %.17g, warm %.17g, relative gap %.3g", c.landweber.objective,
                           c.landweber_warm->objective, gap)};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Outcome reproducibility(const fs::path& workdir) {
  fs::create_directories(workdir);
  std::string out[2], table[2];
  for (int run = 0; run < 2; ++run) {
    const auto json = workdir / ("compare_" + std::to_string(run) + ".json");
    const auto csv = workdir / ("compare_" + std::to_string(run) + ".csv");
    const std::string cmd = std::string("\"") + LQSHRINK_TOOL + "\" compare --seed 42 --out \"" + json.string() +
                            "\" --table \"" + csv.string() + "\"";
    if (std::system(cmd.c_str()) != 0) return {false, "compare exited with an error"};
    out[run] = slurp(json);
    table[run] = slurp(csv);
  }
  const bool same = out[0] == out[1] && table[0] == table[1] && !out[0].empty();
  return {same, fmt("JSON %zu bytes, table %zu bytes, %s", out[0].size(), table[0].size(),
                    same ? "identical" : "DIFFERENT")};
}

}  // namespace

int main(int argc, char** argv) {
  std::set<int> expected;
  fs::path workdir = fs::temp_directory_path() / "lqshrink_acceptance";
  fs::path dump;
  for (int i = 1; i < argc; ++i) {
    const std::string arg = argv[i];
    if (arg == "--expect-fail" && i + 1 < argc) {
      std::stringstream ss(argv[++i]);
      std::string item;
      while (std::getline(ss, item, ',')) expected.insert(std::stoi(item));
    } else if (arg == "--workdir" && i + 1 < argc) {
      workdir = argv[++i];
    } else if (arg == "--dump-benchmark" && i + 1 < argc) {
      dump = argv[++i];
    } else {
      std::fprintf(stderr, "usage: acceptance [--expect-fail N[,N...]] [--workdir DIR] [--dump-benchmark DIR]\n");
      return 2;
    }
  }

  const FredholmProblem problem = make_benchmark();
  if (!dump.empty()) {
    fs::create_directories(dump);
    save_matrix(dump / "kernel.csv", problem.kernel_matrix);
    save_matrix(dump / "data.csv", Eigen::MatrixXd(problem_data(problem)));
    std::printf("wrote %s and %s\n", (dump / "kernel.csv").c_str(), (dump / "data.csv").c_str());
    return 0;
  }
  std::optional<Comparison> comparison;
  double compare_seconds = 0.0;
  auto compared = [&]() -> const Comparison& {
    if (!comparison) {
      const Stopwatch sw;
      comparison = run_comparison(problem);
      compare_seconds = sw.seconds();
    }
    return *comparison;
  };

  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria{
      {"endpoint exactness of the hard/soft rule", endpoint_exactness},
      {"zero-region coincidence", zero_region},
      {"constant-factor audit vs frozen maxima", constant_factor},
      {"shrinkage axioms", axioms},
      {"c_q curve", cq_curve},
      {"frame and bi-frame algebra", frame_algebra},
      {"decoupling equivalence and endpoint minimizers", decoupling},
      {"Landweber convergence, convex case", [&] { return landweber_convex(problem); }},
      {"sparse vs maxent on the sedimentation benchmark", [&] {
         const auto& c = compared();  // sets compare_seconds
         return headline(problem, c, compare_seconds);
       }},
      {"warm-start stability", [&] { return warm_start(compared()); }},
      {"compare reproducibility", [&] { return reproducibility(workdir); }},
  };

  std::set<int> failed;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const int id = static_cast<int>(i) + 1;
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    if (!o.pass) failed.insert(id);
    std::printf("%s %2d %s: %s%s\n", o.pass ? "PASS" : "FAIL", id, criteria[i].first, o.detail.c_str(),
                !o.pass && expected.count(id) ? " [known]" : "");
    std::fflush(stdout);
  }

  bool unexpected = false;
  for (int id : failed) unexpected = unexpected || !expected.count(id);
  std::printf("%zu/%zu criteria pass", criteria.size() - failed.size(), criteria.size());
  if (!failed.empty()) {
    std::printf("; failing:");
    for (int id : failed) std::printf(" %d%s", id, expected.count(id) ? "(known)" : "");
  }
  std::printf("\n");
  return unexpected ? 1 : 0;
}
