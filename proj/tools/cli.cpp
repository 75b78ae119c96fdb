#include "cli.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "lqshrink/benchmark.hpp"
#include "lqshrink/error.hpp"
#include "lqshrink/frames.hpp"
#include "lqshrink/fredholm.hpp"
#include "lqshrink/matrix_io.hpp"
#include "lqshrink/maxent.hpp"
#include "lqshrink/modelsel.hpp"
#include "lqshrink/penalty.hpp"
#include "lqshrink/prox.hpp"
#include "lqshrink/shrinkage.hpp"
#include "lqshrink/solver.hpp"
#include "lqshrink/variational.hpp"

namespace lqshrink::cli {

namespace {

using json = nlohmann::ordered_json;

const std::vector<std::string> kCommands = {"solve", "maxent", "varmin", "prox-audit",
                                            "lcurve", "qsweep", "gen-problem", "compare"};

// JSON --config files. Flat keys configure the active subcommand; an object under a subcommand
// name configures that subcommand. Values are stringified and parsed like command line input.
class JsonConfig : public CLI::Config {
 public:
  explicit JsonConfig(std::string section) : section_(std::move(section)) {}

  std::string to_config(const CLI::App*, bool, bool, std::string) const override {
    throw CLI::ConfigError("writing JSON config files is not supported");
  }

  std::vector<CLI::ConfigItem> from_config(std::istream& in) const override {
    json doc;
    try {
      in >> doc;
    } catch (const json::exception& e) {
      throw CLI::ConfigError(std::string("config is not valid JSON: ") + e.what());
    }
    if (!doc.is_object()) throw CLI::ConfigError("config must be a JSON object");
    std::vector<CLI::ConfigItem> items;
    for (const auto& [key, value] : doc.items()) {
      if (value.is_object()) {
        for (const auto& [inner, v] : value.items()) items.push_back(item({key}, inner, v));
      } else {
        items.push_back(item(section_.empty() ? std::vector<std::string>{} : std::vector{section_}, key, value));
      }
    }
    return items;
  }

 private:
  static std::string scalar(const json& v) {
    if (v.is_string()) return v.get<std::string>();
    if (v.is_boolean()) return v.get<bool>() ? "true" : "false";
    if (v.is_number()) return v.dump();
    throw CLI::ConfigError("unsupported config value " + v.dump());
  }

  static CLI::ConfigItem item(std::vector<std::string> parents, const std::string& name, const json& v) {
    CLI::ConfigItem out;
    out.parents = std::move(parents);
    out.name = name;
    if (v.is_array()) {
      for (const auto& e : v) out.inputs.push_back(scalar(e));
    } else {
      out.inputs.push_back(scalar(v));
    }
    return out;
  }

  std::string section_;
};

std::string num(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::vector<double> to_std(const Eigen::VectorXd& v) { return {v.data(), v.data() + v.size()}; }

json nullable(double x) { return std::isfinite(x) ? json(x) : json(nullptr); }

// Collects every artifact of a run and writes them at the end, so a failing run leaves nothing
// half written. An empty path or "-" means stdout.
class OutputWriter {
 public:
  void add(std::string path, std::string content) { files_.emplace_back(std::move(path), std::move(content)); }

  void commit() const {
    for (const auto& [path, content] : files_) {
      if (path.empty() || path == "-") {
        std::cout << content;
        continue;
      }
      std::ofstream out(path, std::ios::binary | std::ios::trunc);
      if (!out) throw IoError("cannot write " + path);
      out << content;
      if (!out) throw IoError("write failed for " + path);
    }
    std::cout.flush();
  }

 private:
  std::vector<std::pair<std::string, std::string>> files_;
};

template <class Json>
std::string dump(const Json& doc) {
  return doc.dump(2) + "\n";
}

std::vector<double> parse_log_grid(const std::string& spec, const std::string& what) {
  double lo = 0.0, hi = 0.0;
  int n = 0;
  char c1 = 0, c2 = 0;
  std::istringstream in(spec);
  if (!(in >> lo >> c1 >> hi >> c2 >> n) || c1 != ':' || c2 != ':' || !(in >> std::ws).eof()) {
    throw ConfigError(what + " must look like lo:hi:n, got '" + spec + "'");
  }
  try {
    return log_alpha_grid(lo, hi, n);
  } catch (const DomainError& e) {
    throw ConfigError(what + ": " + e.what());
  }
}

std::vector<double> parse_list(const std::string& spec, const std::string& what) {
  std::vector<double> out;
  std::istringstream in(spec);
  std::string tok;
  while (std::getline(in, tok, ',')) {
    try {
      std::size_t used = 0;
      out.push_back(std::stod(tok, &used));
      if (used != tok.size()) throw std::invalid_argument(tok);
    } catch (const std::exception&) {
      throw ConfigError(what + ": cannot parse '" + tok + "'");
    }
  }
  return out;
}

std::vector<Spike> parse_spikes(const std::string& spec) {
  std::vector<Spike> out;
  std::istringstream in(spec);
  std::string tok;
  while (std::getline(in, tok, ',')) {
    const auto colon = tok.find(':');
    try {
      if (colon == std::string::npos) throw std::invalid_argument(tok);
      out.push_back({std::stol(tok.substr(0, colon)), std::stod(tok.substr(colon + 1))});
    } catch (const std::exception&) {
      throw ConfigError("--spikes entries must look like index:amplitude, got '" + tok + "'");
    }
  }
  return out;
}

CurvatureScale parse_scale(const std::string& s) {
  if (s == "loglog") return CurvatureScale::kLogLog;
  if (s == "linear") return CurvatureScale::kLinear;
  throw ConfigError("--scale must be loglog or linear");
}

SolverChoice parse_solver(const std::string& s) {
  if (s == "closed_form") return SolverChoice::kClosedForm;
  if (s == "landweber") return SolverChoice::kLandweber;
  throw ConfigError("--solver must be closed_form or landweber");
}

Eigen::VectorXd as_vector(const Eigen::MatrixXd& m, const std::string& path) {
  if (m.cols() == 1) return m.col(0);
  if (m.rows() == 1) return m.row(0).transpose();
  throw ConfigError(path + " must hold a single row or column");
}

Eigen::VectorXd load_vector(const std::string& path) { return as_vector(load_matrix(path), path); }

struct InputOptions {
  std::string input;
  std::string matrix;
  std::string data;
};

void add_input(CLI::App* sub, InputOptions& o) {
  sub->add_option("--input", o.input, "Problem JSON file (see gen-problem)");
  sub->add_option("--matrix", o.matrix, "Operator matrix file (.csv or .bin)");
  sub->add_option("--data", o.data, "Data vector file (.csv or .bin)");
}

struct Loaded {
  Eigen::MatrixXd op;
  Eigen::VectorXd data;
  std::optional<Eigen::VectorXd> truth;
};

Loaded load_input(const InputOptions& o) {
  if (!o.input.empty()) {
    if (!o.matrix.empty() || !o.data.empty()) throw ConfigError("use either --input or --matrix/--data");
    auto p = load_problem(o.input);
    return {p.kernel_matrix, problem_data(p), p.ground_truth};
  }
  if (o.matrix.empty() || o.data.empty()) throw ConfigError("need --input, or both --matrix and --data");
  Loaded out{load_matrix(o.matrix), load_vector(o.data), std::nullopt};
  if (out.data.size() != out.op.rows()) throw ConfigError("data length does not match the operator rows");
  return out;
}

ShrinkageRule rule_for(const std::string& name, double q) {
  try {
    return name.empty() ? rules::hard_soft(q) : rule_by_name(name, q);
  } catch (const DomainError& e) {
    throw ConfigError(e.what());
  }
}

std::string curve_csv(const RegCurve& curve, const CurvatureSelection& sel, const char* param) {
  std::string out = std::string(param) + ",residual_sq,penalty,objective,nonzeros,curvature,chosen\n";
  for (std::size_t i = 0; i < curve.points.size(); ++i) {
    const auto& p = curve.points[i];
    out += num(p.alpha) + "," + num(p.residual_sq) + "," + num(p.penalty) + "," + num(p.objective) + "," +
           std::to_string(p.nonzeros) + "," + num(sel.curvatures[i]) + "," + (i == sel.index ? "1" : "0") + "\n";
  }
  return out;
}

class Timer {
 public:
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

// ---------------------------------------------------------------------------------------------
// solve

struct SolveOptions {
  InputOptions in;
  double q = 0.3;
  double alpha = 1e-5;
  std::string rule;
  bool nonneg = false;
  bool no_normalize = false;
  std::size_t max_iters = 100000;
  double tol = 1e-8;
  std::string initial;
  std::string trace;
  std::string out;
  bool wall_time = false;
  std::uint64_t seed = 42;
};

void run_solve(const SolveOptions& o, OutputWriter& writer) {
  const Timer timer;
  const auto problem = load_input(o.in);
  LandweberConfig cfg;
  cfg.q = o.q;
  cfg.alpha = o.alpha;
  cfg.rule = rule_for(o.rule, o.q);
  cfg.nonneg = o.nonneg;
  cfg.normalize_operator = !o.no_normalize;
  cfg.max_iters = o.max_iters;
  cfg.rel_tol = o.tol;
  cfg.snapshot_every = 0;
  if (!o.initial.empty()) cfg.initial = load_vector(o.initial);
  try {
    cfg.validate();
  } catch (const DomainError& e) {
    throw ConfigError(e.what());
  }

  const auto trace = landweber_shrink(LinearOperator::from_matrix(problem.op), problem.data, cfg);
  const auto& last = trace.final_record();

  json doc;
  doc["command"] = "solve";
  doc["seed"] = o.seed;
  doc["config"] = {{"q", o.q},           {"alpha", o.alpha},        {"rule", cfg.rule->name()},
                   {"nonneg", o.nonneg}, {"max_iters", o.max_iters}, {"tol", o.tol},
                   {"normalize_operator", cfg.normalize_operator}, {"warm_start", !o.initial.empty()}};
  doc["residual_norm"] = last.residual_norm;
  doc["penalty"] = last.penalty;
  doc["objective"] = last.objective;
  doc["nonzeros"] = last.nonzeros;
  doc["iterations"] = trace.iterations;
  doc["stop_reason"] = to_string(trace.stop_reason);
  doc["operator_scale"] = trace.operator_scale;
  doc["objective_monotone"] = objective_monotone_check(trace);
  if (problem.truth) doc["truth_error"] = (trace.solution - *problem.truth).norm();
  doc["solution"] = to_std(trace.solution);
  if (o.wall_time) doc["wall_time_s"] = timer.seconds();

  if (!o.trace.empty()) {
    std::string csv = "iteration,residual_norm,penalty,objective,nonzeros\n";
    for (const auto& r : trace.records) {
      csv += std::to_string(r.iteration) + "," + num(r.residual_norm) + "," + num(r.penalty) + "," +
             num(r.objective) + "," + std::to_string(r.nonzeros) + "\n";
    }
    writer.add(o.trace, std::move(csv));
  }
  writer.add(o.out, dump(doc));
}

// ---------------------------------------------------------------------------------------------
// maxent

struct MaxentOptions {
  InputOptions in;
  std::optional<double> beta;
  std::string beta_grid = "1e-8:1e-1:29";
  std::string scale = "loglog";
  std::size_t max_iters = 5000;
  double tol = 1e-12;
  double floor = 1e-12;
  std::string curve;
  std::string out;
  bool wall_time = false;
  std::uint64_t seed = 42;
};

void run_maxent(const MaxentOptions& o, OutputWriter& writer) {
  const Timer timer;
  const auto problem = load_input(o.in);
  MaxentConfig cfg;
  cfg.max_iters = o.max_iters;
  cfg.tol = o.tol;
  cfg.floor = o.floor;

  json doc;
  doc["command"] = "maxent";
  doc["seed"] = o.seed;
  if (o.beta) {
    cfg.beta = *o.beta;
    doc["selected_by"] = "fixed";
  } else {
    const auto grid = parse_log_grid(o.beta_grid, "--beta-grid");
    const auto curve = sweep_beta_maxent(problem.op, problem.data, grid, cfg);
    const auto sel = max_curvature_alpha(curve, parse_scale(o.scale));
    cfg.beta = sel.alpha;
    doc["selected_by"] = "lcurve";
    if (!o.curve.empty()) writer.add(o.curve, curve_csv(curve, sel, "beta"));
  }
  if (!(cfg.beta > 0.0)) throw ConfigError("--beta must be > 0");
  const auto r = maxent_solve(problem.op, problem.data, cfg);
  doc["beta"] = cfg.beta;
  doc["residual_norm"] = r.residual_norm;
  doc["entropy"] = r.entropy;
  doc["objective"] = r.objective;
  doc["nonzeros"] = count_above(r.solution);
  doc["iterations"] = r.iterations;
  doc["converged"] = r.converged;
  if (problem.truth) doc["truth_error"] = (r.solution - *problem.truth).norm();
  doc["solution"] = to_std(r.solution);
  if (o.wall_time) doc["wall_time_s"] = timer.seconds();
  writer.add(o.out, dump(doc));
}

// ---------------------------------------------------------------------------------------------
// varmin

struct VarminOptions {
  std::string matrix;
  std::string data;
  std::string frame;
  std::string dual;
  std::string weights;
  double q = 1.0;
  double alpha = 1.0;
  std::string bounds;
  std::string rule;
  int theorem = 1;
  std::string variant;
  int gaussian = 20;
  int sparse = 20;
  std::string out;
  std::uint64_t seed = 42;
};

void run_varmin(const VarminOptions& o, OutputWriter& writer) {
  if (o.data.empty()) throw ConfigError("varmin needs --data");
  const Eigen::VectorXd h = load_vector(o.data);
  const Eigen::MatrixXd op = o.matrix.empty() ? Eigen::MatrixXd(Eigen::MatrixXd::Identity(h.size(), h.size()))
                                              : load_matrix(o.matrix);
  if (op.rows() != h.size()) throw ConfigError("data length does not match the operator rows");
  const Eigen::Index dim = o.theorem == 2 ? h.size() : op.cols();
  const Frame primal = o.frame.empty() ? Frame::orthonormal_basis(dim) : Frame(load_matrix(o.frame));
  const BiFrame biframe = o.dual.empty() ? BiFrame::canonical(primal) : BiFrame(primal, Frame(load_matrix(o.dual)));
  const Eigen::VectorXd weights =
      o.weights.empty() ? Eigen::VectorXd(Eigen::VectorXd::Constant(biframe.size(), o.alpha)) : load_vector(o.weights);
  const auto rule = rule_for(o.rule, o.q);
  std::optional<WeightBounds> bounds;
  if (!o.bounds.empty()) {
    const auto ab = parse_list(o.bounds, "--weight-bounds");
    if (ab.size() != 2) throw ConfigError("--weight-bounds must be a,b");
    bounds = WeightBounds{ab[0], ab[1]};
  }

  json doc;
  doc["command"] = "varmin";
  doc["seed"] = o.seed;
  doc["theorem"] = o.theorem;
  doc["q"] = o.q;
  doc["rule"] = rule.name();
  VariationalProblem p{ForwardProblem(op, h), biframe, weights, o.q, bounds};
  try {
    p.validate();
  } catch (const DomainError& e) {
    throw ConfigError(e.what());
  }
  const auto probes = make_probe_set(p, o.seed, o.gaussian, o.sparse);

  if (o.theorem == 1) {
    Theorem1Variant variant;
    if (o.variant.empty() || o.variant == "direct") {
      variant = Theorem1Variant::kDirect;
    } else if (o.variant == "pulled_back") {
      variant = Theorem1Variant::kPulledBack;
    } else {
      throw ConfigError("--variant for theorem 1 must be direct or pulled_back");
    }
    const auto g = theorem1_minimizer(p, rule, variant);
    const auto b = eval_Jq(p, g);
    doc["variant"] = variant == Theorem1Variant::kDirect ? "direct" : "pulled_back";
    doc["objective"] = {{"residual_sq", b.residual_sq}, {"penalty", b.penalty}, {"total", b.total}};
    doc["audit_max_ratio"] = nullable(constant_factor_audit_Jq(p, rule, probes, variant));
    doc["minimizer"] = to_std(g);
  } else if (o.theorem == 2) {
    Theorem2Variant variant;
    if (o.variant.empty() || o.variant == "plain") {
      variant = Theorem2Variant::kPlain;
    } else if (o.variant == "projected") {
      variant = Theorem2Variant::kProjected;
    } else {
      throw ConfigError("--variant for theorem 2 must be plain or projected");
    }
    const auto m = theorem2_minimizer(biframe, h, weights, o.q, rule, variant);
    // Sequence probes: the decoupled oracle for v = F~^T h and the analysis of every g probe.
    std::vector<Eigen::VectorXd> seq;
    seq.push_back(oracle_minimize({biframe.dual().analyze(h), weights, o.q}).omega);
    for (const auto& g : probes) seq.push_back(biframe.dual().analyze(g));
    doc["variant"] = variant == Theorem2Variant::kPlain ? "plain" : "projected";
    doc["objective"] = {{"residual_sq", m.objective.residual_sq}, {"penalty", m.objective.penalty},
                        {"total", m.objective.total}};
    doc["audit_max_ratio"] = nullable(constant_factor_audit_Kq(biframe, h, weights, o.q, rule, seq, variant));
    doc["minimizer"] = to_std(m.omega);
  } else {
    throw ConfigError("--theorem must be 1 or 2");
  }
  doc["probes"] = probes.size();
  writer.add(o.out, dump(doc));
}

// ---------------------------------------------------------------------------------------------
// prox-audit

struct ProxAuditOptions {
  double q = 1.0;
  std::string rule = "hs";
  std::string grid = "1e-3:1e3:60,1e-2:1e2:40";
  std::string out;
  std::uint64_t seed = 42;
};

void run_prox_audit(const ProxAuditOptions& o, OutputWriter& writer) {
  const auto comma = o.grid.find(',');
  if (comma == std::string::npos) throw ConfigError("--grid must look like vlo:vhi:nv,alo:ahi:na");
  const auto vs = parse_log_grid(o.grid.substr(0, comma), "--grid (v part)");
  const auto as = parse_log_grid(o.grid.substr(comma + 1), "--grid (alpha part)");
  require_q(o.q);
  const auto rule = rule_for(o.rule, o.q);
  std::vector<SamplePoint> sample;
  for (double v : vs) {
    for (double a : as) sample.push_back({v, a});
  }
  const auto rows = audit_rows(o.q, rule, sample);
  std::string csv = "v,alpha,shrink_obj,oracle_obj,ratio\n";
  double worst = 0.0;
  for (const auto& r : rows) {
    csv += num(r.v) + "," + num(r.alpha) + "," + num(r.shrink_objective) + "," + num(r.oracle_objective) + "," +
           num(r.ratio) + "\n";
    worst = std::max(worst, r.ratio);
  }
  std::cerr << "prox-audit rule=" << rule.name() << " q=" << num(o.q) << " points=" << rows.size()
            << " max_ratio=" << num(worst) << "\n";
  writer.add(o.out, std::move(csv));
}

// ---------------------------------------------------------------------------------------------
// lcurve and qsweep

struct SweepOptions {
  InputOptions in;
  double q = 1.0;
  std::string q_grid = "0,0.25,0.5,0.75,1";
  std::string rule;
  std::string solver = "closed_form";
  std::string alpha_grid = "1e-6:1e1:30";
  std::string scale = "loglog";
  bool nonneg = false;
  std::size_t max_iters = 100000;
  double tol = 1e-8;
  std::string out;
  std::uint64_t seed = 42;
};

SweepProblem sweep_problem(const SweepOptions& o, const Loaded& problem) {
  SweepProblem sp{problem.op, problem.data, std::nullopt, {}};
  sp.landweber.nonneg = o.nonneg;
  sp.landweber.max_iters = o.max_iters;
  sp.landweber.rel_tol = o.tol;
  return sp;
}

void run_lcurve(const SweepOptions& o, OutputWriter& writer) {
  const auto problem = load_input(o.in);
  const auto grid = parse_log_grid(o.alpha_grid, "--alpha-grid");
  const auto curve =
      sweep_alpha(sweep_problem(o, problem), o.q, rule_for(o.rule, o.q), grid, parse_solver(o.solver));
  const auto sel = max_curvature_alpha(curve, parse_scale(o.scale));
  std::cerr << "lcurve chosen alpha=" << num(sel.alpha) << " monotonicity_warnings="
            << curve.monotonicity_warnings.size() << "\n";
  writer.add(o.out, curve_csv(curve, sel, "alpha"));
}

void run_qsweep(const SweepOptions& o, OutputWriter& writer) {
  const auto problem = load_input(o.in);
  const auto grid = parse_log_grid(o.alpha_grid, "--alpha-grid");
  const auto qs = o.q_grid.empty() ? std::vector<double>{} : parse_list(o.q_grid, "--q-grid");
  const auto rows = q_sweep(sweep_problem(o, problem), qs, grid, parse_solver(o.solver),
                            [&](double q) { return rule_for(o.rule, q); }, parse_scale(o.scale));
  std::string csv = "q,alpha,residual_sq,nonzeros\n";
  for (const auto& r : rows) {
    csv += num(r.q) + "," + num(r.alpha) + "," + num(r.residual_sq) + "," + std::to_string(r.nonzeros) + "\n";
  }
  writer.add(o.out, std::move(csv));
}

// ---------------------------------------------------------------------------------------------
// gen-problem

struct GenOptions {
  Eigen::Index size = 100;
  std::string kernel = "sigmoid_front";
  double width = 0.01;
  double time = 1.0;
  std::string spikes = "45:1.0,55:0.6,66:0.8,89:0.5";
  double noise = 1e-2;
  std::string out;
  std::uint64_t seed = 42;
};

BenchmarkSpec benchmark_spec(const GenOptions& o) {
  BenchmarkSpec spec;
  spec.size = o.size;
  try {
    spec.kernel = {kernel_kind_from_string(o.kernel), o.width, o.time};
  } catch (const DomainError& e) {
    throw ConfigError(e.what());
  }
  spec.spikes = parse_spikes(o.spikes);
  spec.relative_noise = o.noise;
  spec.seed = o.seed;
  if (!(o.noise >= 0.0)) throw ConfigError("--noise must be >= 0");
  return spec;
}

void run_gen(const GenOptions& o, OutputWriter& writer) {
  writer.add(o.out, dump(to_json(make_benchmark(benchmark_spec(o)))));
}

// ---------------------------------------------------------------------------------------------
// compare

struct CompareOptions {
  InputOptions in;
  GenOptions gen;
  CompareConfig cfg;
  std::string beta_grid = "1e-8:1e-1:29";
  std::string scale = "loglog";
  bool no_warm = false;
  std::string table;
  std::string out;
  bool wall_time = false;
};

json method_json(const MethodSummary& m) {
  return {{"method", m.method},       {"parameter", m.parameter}, {"residual_norm", m.residual_norm},
          {"objective", m.objective}, {"nonzeros", m.nonzeros},   {"peaks", m.peaks},
          {"iterations", m.iterations}, {"converged", m.converged}};
}

std::string table_row(const MethodSummary& m) {
  std::string peaks;
  for (std::size_t i = 0; i < m.peaks.size(); ++i) peaks += (i ? " " : "") + std::to_string(m.peaks[i]);
  return m.method + "," + num(m.parameter) + "," + num(m.residual_norm) + "," + num(m.objective) + "," +
         std::to_string(m.nonzeros) + "," + peaks + "," + std::to_string(m.iterations) + "," +
         (m.converged ? "1" : "0") + "\n";
}

void run_compare(CompareOptions o, OutputWriter& writer) {
  const Timer timer;
  FredholmProblem problem;
  if (!o.in.input.empty()) {
    problem = load_problem(o.in.input);
  } else {
    if (!o.in.matrix.empty() || !o.in.data.empty()) throw ConfigError("compare takes --input or benchmark flags");
    problem = make_benchmark(benchmark_spec(o.gen));
  }
  const auto grid = parse_log_grid(o.beta_grid, "--beta-grid");
  o.cfg.beta_lo = grid.front();
  o.cfg.beta_hi = grid.back();
  o.cfg.beta_count = static_cast<int>(grid.size());
  o.cfg.scale = parse_scale(o.scale);
  o.cfg.warm_start = !o.no_warm;
  try {
    o.cfg.validate();
  } catch (const DomainError& e) {
    throw ConfigError(e.what());
  }

  const auto c = run_comparison(problem, o.cfg);

  json doc;
  doc["command"] = "compare";
  doc["seed"] = problem.seed;
  doc["problem"] = {{"size", problem.x_grid.size()},
                    {"kernel", problem.kernel_spec ? std::string(to_string(problem.kernel_spec->kind)) : "matrix"},
                    {"width", problem.kernel_spec ? json(problem.kernel_spec->width) : json(nullptr)},
                    {"noise_sigma", problem.noise_sigma}};
  doc["config"] = {{"q", o.cfg.q},
                   {"alpha", o.cfg.alpha},
                   {"nonneg", o.cfg.nonneg},
                   {"max_iters", o.cfg.max_iters},
                   {"tol", o.cfg.rel_tol},
                   {"beta_grid", o.beta_grid},
                   {"scale", o.scale},
                   {"warm_start", o.cfg.warm_start}};
  json methods = json::array({method_json(c.landweber), method_json(c.maxent)});
  std::string table = "method,parameter,residual_norm,objective,nonzeros,peaks,iterations,converged\n";
  table += table_row(c.landweber) + table_row(c.maxent);
  if (c.landweber_warm) {
    methods.push_back(method_json(*c.landweber_warm));
    table += table_row(*c.landweber_warm);
  }
  doc["methods"] = methods;

  json curve = json::array();
  for (std::size_t i = 0; i < c.maxent_curve.points.size(); ++i) {
    const auto& p = c.maxent_curve.points[i];
    curve.push_back({{"beta", p.alpha},
                     {"residual_sq", p.residual_sq},
                     {"penalty", p.penalty},
                     {"curvature", nullable(c.maxent_selection.curvatures[i])}});
  }
  doc["maxent_curve"] = curve;

  json checks;
  checks["residual_not_larger"] = c.landweber.residual_norm <= c.maxent.residual_norm;
  checks["fewer_nonzeros"] = c.landweber.nonzeros < c.maxent.nonzeros;
  if (problem.ground_truth) {
    const auto truth = top_peaks(*problem.ground_truth, problem.ground_truth->size());
    bool all_found = c.landweber.peaks.size() >= truth.size();
    for (auto t : truth) {
      bool hit = false;
      for (auto p : c.landweber.peaks) hit = hit || std::abs(p - t) <= 1;
      all_found = all_found && hit;
    }
    doc["truth_peaks"] = truth;
    checks["peaks_within_one_cell"] = all_found;
  }
  if (c.landweber_warm) {
    checks["warm_cold_relative_objective_gap"] =
        std::abs(c.landweber_warm->objective - c.landweber.objective) /
        std::max(std::abs(c.landweber.objective), std::numeric_limits<double>::min());
  }
  doc["checks"] = checks;
  doc["solutions"] = {{"landweber", to_std(c.landweber.solution)}, {"maxent", to_std(c.maxent.solution)}};
  if (o.wall_time) doc["wall_time_s"] = timer.seconds();

  writer.add(o.table, std::move(table));
  if (!o.out.empty()) writer.add(o.out, dump(doc));
}

// ---------------------------------------------------------------------------------------------

void add_seed(CLI::App* sub, std::uint64_t& seed) {
  sub->add_option("--seed", seed, "Random seed")->capture_default_str();
}

std::string active_section(int argc, const char* const* argv) {
  for (int i = 1; i < argc; ++i) {
    for (const auto& c : kCommands) {
      if (c == argv[i]) return c;
    }
  }
  return {};
}

int report(const std::exception& e, int code) {
  std::cerr << "lqshrink: " << e.what() << "\n";
  return code;
}

}  // namespace

int run(int argc, const char* const* argv) {
  CLI::App app{"lq-constrained shrinkage minimizers, shrinked Landweber and maxent experiments", "lqshrink"};
  app.require_subcommand(1);
  app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
  app.allow_config_extras(CLI::config_extras_mode::error);
  app.config_formatter(std::make_shared<JsonConfig>(active_section(argc, argv)));
  app.set_config("--config", "", "JSON config file; command line flags take precedence");

  OutputWriter writer;
  std::function<void()> action;

  SolveOptions solve;
  auto* s = app.add_subcommand("solve", "Shrinked Landweber iteration")->fallthrough();
  add_input(s, solve.in);
  s->add_option("--q", solve.q, "Exponent in [0, 1]")->capture_default_str();
  s->add_option("--alpha", solve.alpha, "Uniform weight")->capture_default_str();
  s->add_option("--rule", solve.rule, "Shrinkage rule name (default hs at --q)");
  s->add_flag("--nonneg", solve.nonneg, "Set negative arguments to zero");
  s->add_flag("--no-normalize", solve.no_normalize, "Do not rescale the operator to norm 0.99");
  s->add_option("--max-iters", solve.max_iters)->capture_default_str();
  s->add_option("--tol", solve.tol, "Relative iterate-change stop")->capture_default_str();
  s->add_option("--initial", solve.initial, "Warm start vector file");
  s->add_option("--trace", solve.trace, "Per-iteration CSV");
  s->add_option("--out", solve.out, "Result JSON (default stdout)");
  s->add_flag("--wall-time", solve.wall_time, "Record wall time (breaks byte reproducibility)");
  add_seed(s, solve.seed);
  s->callback([&] { action = [&] { run_solve(solve, writer); }; });

  MaxentOptions maxent;
  auto* m = app.add_subcommand("maxent", "Maximum entropy baseline")->fallthrough();
  add_input(m, maxent.in);
  m->add_option("--beta", maxent.beta, "Fixed beta; default picks beta by L-curve");
  m->add_option("--beta-grid", maxent.beta_grid, "lo:hi:n log grid for the L-curve")->capture_default_str();
  m->add_option("--scale", maxent.scale, "loglog or linear")->capture_default_str();
  m->add_option("--max-iters", maxent.max_iters)->capture_default_str();
  m->add_option("--tol", maxent.tol)->capture_default_str();
  m->add_option("--floor", maxent.floor, "Positivity floor")->capture_default_str();
  m->add_option("--curve", maxent.curve, "L-curve CSV");
  m->add_option("--out", maxent.out, "Result JSON (default stdout)");
  m->add_flag("--wall-time", maxent.wall_time);
  add_seed(m, maxent.seed);
  m->callback([&] { action = [&] { run_maxent(maxent, writer); }; });

  VarminOptions varmin;
  auto* v = app.add_subcommand("varmin", "Closed-form constant-factor minimizers")->fallthrough();
  v->add_option("--matrix", varmin.matrix, "Operator L (default identity)");
  v->add_option("--data", varmin.data, "Data vector h");
  v->add_option("--frame", varmin.frame, "Frame synthesis matrix (default orthonormal basis)");
  v->add_option("--dual", varmin.dual, "Dual synthesis matrix (default canonical dual)");
  v->add_option("--weights", varmin.weights, "Per-element weights (default uniform --alpha)");
  v->add_option("--weight-bounds", varmin.bounds, "a,b with a <= alpha_n <= b");
  v->add_option("--q", varmin.q)->capture_default_str();
  v->add_option("--alpha", varmin.alpha)->capture_default_str();
  v->add_option("--rule", varmin.rule, "Shrinkage rule name (default hs at --q)");
  v->add_option("--theorem", varmin.theorem, "1 (J_q) or 2 (K_q)")->capture_default_str();
  v->add_option("--variant", varmin.variant, "direct|pulled_back (1), plain|projected (2)");
  v->add_option("--probes-gaussian", varmin.gaussian)->capture_default_str();
  v->add_option("--probes-sparse", varmin.sparse)->capture_default_str();
  v->add_option("--out", varmin.out, "Result JSON (default stdout)");
  add_seed(v, varmin.seed);
  v->callback([&] { action = [&] { run_varmin(varmin, writer); }; });

  ProxAuditOptions prox;
  auto* p = app.add_subcommand("prox-audit", "Shrinkage vs brute-force scalar oracle")->fallthrough();
  p->add_option("--q", prox.q)->capture_default_str();
  p->add_option("--rule", prox.rule)->capture_default_str();
  p->add_option("--grid", prox.grid, "vlo:vhi:nv,alo:ahi:na")->capture_default_str();
  p->add_option("--out", prox.out, "CSV (default stdout)");
  add_seed(p, prox.seed);
  p->callback([&] { action = [&] { run_prox_audit(prox, writer); }; });

  SweepOptions lcurve;
  auto* l = app.add_subcommand("lcurve", "Regularization curve and maximal-curvature alpha")->fallthrough();
  SweepOptions qsweep;
  auto* qs = app.add_subcommand("qsweep", "L-curve alpha for each q")->fallthrough();
  for (auto [sub, o] : {std::pair{l, &lcurve}, std::pair{qs, &qsweep}}) {
    add_input(sub, o->in);
    sub->add_option("--rule", o->rule, "Shrinkage rule name (default hs at q)");
    sub->add_option("--solver", o->solver, "closed_form or landweber")->capture_default_str();
    sub->add_option("--alpha-grid", o->alpha_grid, "lo:hi:n log grid")->capture_default_str();
    sub->add_option("--scale", o->scale, "loglog or linear")->capture_default_str();
    sub->add_flag("--nonneg", o->nonneg, "Landweber nonnegativity");
    sub->add_option("--max-iters", o->max_iters)->capture_default_str();
    sub->add_option("--tol", o->tol)->capture_default_str();
    sub->add_option("--out", o->out, "CSV (default stdout)");
    add_seed(sub, o->seed);
  }
  l->add_option("--q", lcurve.q)->capture_default_str();
  qs->add_option("--q-grid", qsweep.q_grid, "Comma separated q values")->capture_default_str();
  l->callback([&] { action = [&] { run_lcurve(lcurve, writer); }; });
  qs->callback([&] { action = [&] { run_qsweep(qsweep, writer); }; });

  GenOptions gen;
  auto* g = app.add_subcommand("gen-problem", "Write a synthetic Fredholm problem")->fallthrough();
  CompareOptions compare;
  auto* c = app.add_subcommand("compare", "Landweber vs maxent on a benchmark problem")->fallthrough();
  for (auto [sub, o] : {std::pair{g, &gen}, std::pair{c, &compare.gen}}) {
    sub->add_option("--size", o->size, "M = P")->capture_default_str();
    sub->add_option("--kernel", o->kernel, "sigmoid_front or gaussian_blur")->capture_default_str();
    sub->add_option("--width", o->width)->capture_default_str();
    sub->add_option("--time", o->time)->capture_default_str();
    sub->add_option("--spikes", o->spikes, "index:amplitude list for size 100")->capture_default_str();
    sub->add_option("--noise", o->noise, "sigma relative to max |K g*|")->capture_default_str();
    add_seed(sub, o->seed);
  }
  g->add_option("--out", gen.out, "Problem JSON (default stdout)");
  g->callback([&] { action = [&] { run_gen(gen, writer); }; });

  c->add_option("--input", compare.in.input, "Problem JSON (default: generate from the flags)");
  c->add_option("--q", compare.cfg.q)->capture_default_str();
  c->add_option("--alpha", compare.cfg.alpha)->capture_default_str();
  c->add_flag("--nonneg,!--no-nonneg", compare.cfg.nonneg, "Landweber nonnegativity")->capture_default_str();
  c->add_option("--max-iters", compare.cfg.max_iters)->capture_default_str();
  c->add_option("--tol", compare.cfg.rel_tol)->capture_default_str();
  c->add_option("--beta-grid", compare.beta_grid)->capture_default_str();
  c->add_option("--scale", compare.scale)->capture_default_str();
  c->add_option("--peaks", compare.cfg.peaks)->capture_default_str();
  c->add_flag("--no-warm", compare.no_warm, "Skip the maxent-warm-started Landweber run");
  c->add_option("--table", compare.table, "Summary CSV (default stdout)");
  c->add_option("--out", compare.out, "Full result JSON");
  c->add_flag("--wall-time", compare.wall_time);
  c->callback([&] { action = [&] { run_compare(compare, writer); }; });

  try {
    app.parse(argc, argv);
  } catch (const CLI::FileError& e) {
    std::cerr << "lqshrink: " << e.what() << "\n";
    return kExitIo;
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfig;
  }

  try {
    action();
    writer.commit();
    return kExitOk;
  } catch (const DivergenceError& e) {
    return report(e, kExitDivergence);
  } catch (const IoError& e) {
    return report(e, kExitIo);
  } catch (const ConfigError& e) {
    return report(e, kExitConfig);
  } catch (const DomainError& e) {
    return report(e, kExitConfig);
  } catch (const DimensionError& e) {
    return report(e, kExitConfig);
  } catch (const NotAFrameError& e) {
    return report(e, kExitConfig);
  } catch (const RangeError& e) {
    return report(e, kExitConfig);
  } catch (const std::exception& e) {
    return report(e, kExitFailure);
  }
}

}  // namespace lqshrink::cli
