#include "lqshrink/fredholm.hpp"

#include <cmath>
#include <fstream>
#include <random>
#include <set>

#include "lqshrink/error.hpp"
#include "lqshrink/random.hpp"

namespace lqshrink {

namespace {

using nlohmann::json;

void require_increasing(const Eigen::VectorXd& grid, std::string_view name) {
  if (grid.size() < 2) throw DomainError(std::string(name) + " needs at least 2 points");
  for (Eigen::Index i = 1; i < grid.size(); ++i) {
    if (!(grid[i] > grid[i - 1])) throw DomainError(std::string(name) + " must be strictly increasing");
  }
}

json vector_to_json(const Eigen::VectorXd& v) { return std::vector<double>(v.data(), v.data() + v.size()); }

Eigen::VectorXd vector_from_json(const json& j) {
  const auto values = j.get<std::vector<double>>();
  return Eigen::Map<const Eigen::VectorXd>(values.data(), static_cast<Eigen::Index>(values.size()));
}

}  // namespace

std::string_view to_string(KernelKind kind) {
  switch (kind) {
    case KernelKind::kGaussianBlur: return "gaussian_blur";
    case KernelKind::kSigmoidFront: return "sigmoid_front";
  }
  return "unknown";
}

KernelKind kernel_kind_from_string(std::string_view name) {
  if (name == "gaussian_blur") return KernelKind::kGaussianBlur;
  if (name == "sigmoid_front") return KernelKind::kSigmoidFront;
  throw DomainError("unknown kernel kind '" + std::string(name) + "'");
}

Eigen::VectorXd linspace(double lo, double hi, Eigen::Index n) {
  if (n < 2) throw DomainError("linspace needs n >= 2");
  return Eigen::VectorXd::LinSpaced(n, lo, hi);
}

Eigen::VectorXd trapezoid_weights(const Eigen::VectorXd& grid) {
  require_increasing(grid, "quadrature grid");
  const Eigen::Index n = grid.size();
  Eigen::VectorXd w = Eigen::VectorXd::Zero(n);
  for (Eigen::Index i = 0; i + 1 < n; ++i) {
    const double half = 0.5 * (grid[i + 1] - grid[i]);
    w[i] += half;
    w[i + 1] += half;
  }
  return w;
}

Eigen::MatrixXd make_synthetic_kernel(const KernelSpec& spec, const Eigen::VectorXd& x_grid,
                                      const Eigen::VectorXd& y_grid) {
  require_increasing(x_grid, "x_grid");
  require_increasing(y_grid, "y_grid");
  if (!(spec.width > 0.0)) throw DomainError("kernel width must be > 0");
  if (spec.kind == KernelKind::kSigmoidFront && !(spec.time >= 0.0)) {
    throw DomainError("sigmoid_front time must be >= 0");
  }
  const Eigen::VectorXd w = trapezoid_weights(x_grid);
  Eigen::MatrixXd k(y_grid.size(), x_grid.size());
  for (Eigen::Index j = 0; j < x_grid.size(); ++j) {
    for (Eigen::Index i = 0; i < y_grid.size(); ++i) {
      double value;
      if (spec.kind == KernelKind::kGaussianBlur) {
        const double d = x_grid[j] - y_grid[i];
        value = std::exp(-d * d / (2.0 * spec.width * spec.width));
      } else {
        value = 1.0 / (1.0 + std::exp(-(y_grid[i] - x_grid[j] * spec.time) / spec.width));
      }
      k(i, j) = w[j] * value;
    }
  }
  return k;
}

Eigen::VectorXd make_sparse_truth(Eigen::Index m, const std::vector<Spike>& spikes) {
  if (m < 1) throw DomainError("truth length must be >= 1");
  Eigen::VectorXd g = Eigen::VectorXd::Zero(m);
  std::set<Eigen::Index> seen;
  for (const auto& s : spikes) {
    if (s.position < 0 || s.position >= m) {
      throw DomainError("spike position " + std::to_string(s.position) + " outside [0, " + std::to_string(m) + ")");
    }
    if (!(s.amplitude > 0.0)) throw DomainError("spike amplitudes must be > 0");
    if (!seen.insert(s.position).second) {
      throw DomainError("duplicate spike position " + std::to_string(s.position));
    }
    g[s.position] = s.amplitude;
  }
  return g;
}

void FredholmProblem::validate() const {
  require_increasing(x_grid, "x_grid");
  require_increasing(y_grid, "y_grid");
  if (kernel_matrix.rows() != y_grid.size() || kernel_matrix.cols() != x_grid.size()) {
    throw DimensionError("kernel matrix must be P x M");
  }
  if (!kernel_matrix.allFinite()) throw DomainError("kernel matrix has non-finite entries");
  for (Eigen::Index j = 0; j < kernel_matrix.cols(); ++j) {
    if (!(kernel_matrix.col(j).norm() > 0.0)) throw DomainError("kernel column " + std::to_string(j) + " is zero");
  }
  if (ground_truth && ground_truth->size() != x_grid.size()) throw DimensionError("truth must have length M");
  if (observed && observed->size() != y_grid.size()) throw DimensionError("observed data must have length P");
  if (!(noise_sigma >= 0.0)) throw DomainError("noise sigma must be >= 0");
}

Eigen::VectorXd observe(const FredholmProblem& problem) {
  if (!problem.ground_truth) throw DomainError("observe: problem has no ground truth");
  Eigen::VectorXd f = problem.kernel_matrix * *problem.ground_truth;
  if (problem.noise_sigma > 0.0) {
    PortableRng rng(problem.seed);
    for (Eigen::Index i = 0; i < f.size(); ++i) f[i] += problem.noise_sigma * rng.gaussian();
  }
  return f;
}

double signal_to_noise(const FredholmProblem& problem) {
  if (!problem.ground_truth) throw DomainError("signal_to_noise: problem has no ground truth");
  const double signal = (problem.kernel_matrix * *problem.ground_truth).norm();
  if (problem.noise_sigma == 0.0) return std::numeric_limits<double>::infinity();
  return signal / (problem.noise_sigma * std::sqrt(static_cast<double>(problem.y_grid.size())));
}

FredholmProblem make_benchmark(const BenchmarkSpec& spec) {
  if (spec.size < 2) throw DomainError("benchmark size must be >= 2");
  FredholmProblem p;
  p.x_grid = linspace(0.0, 1.0, spec.size);
  p.y_grid = linspace(0.0, 1.0, spec.size);
  p.kernel_spec = spec.kernel;
  p.kernel_matrix = make_synthetic_kernel(spec.kernel, p.x_grid, p.y_grid);
  const double factor = static_cast<double>(spec.size) / 100.0;
  std::vector<Spike> spikes;
  for (const auto& s : spec.spikes) {
    spikes.push_back({static_cast<Eigen::Index>(std::llround(s.position * factor)), s.amplitude * factor});
  }
  p.ground_truth = make_sparse_truth(spec.size, spikes);
  p.noise_sigma = spec.relative_noise * (p.kernel_matrix * *p.ground_truth).cwiseAbs().maxCoeff();
  p.seed = spec.seed;
  return p;
}

nlohmann::json to_json(const FredholmProblem& problem) {
  problem.validate();
  json doc;
  doc["format"] = "lqshrink-fredholm-problem";
  doc["version"] = 1;
  doc["x_grid"] = vector_to_json(problem.x_grid);
  doc["y_grid"] = vector_to_json(problem.y_grid);
  doc["quadrature"] = "trapezoidal";
  if (problem.kernel_spec) {
    doc["kernel"] = {{"kind", to_string(problem.kernel_spec->kind)},
                     {"width", problem.kernel_spec->width},
                     {"time", problem.kernel_spec->time}};
  } else {
    json rows = json::array();
    for (Eigen::Index i = 0; i < problem.kernel_matrix.rows(); ++i) {
      rows.push_back(vector_to_json(problem.kernel_matrix.row(i).transpose()));
    }
    doc["kernel"] = {{"kind", "matrix"}, {"matrix", std::move(rows)}};
  }
  doc["noise_sigma"] = problem.noise_sigma;
  doc["seed"] = problem.seed;
  if (problem.ground_truth) {
    doc["truth"] = vector_to_json(*problem.ground_truth);
    doc["snr"] = signal_to_noise(problem);
  }
  doc["data"] = vector_to_json(problem_data(problem));
  return doc;
}

FredholmProblem problem_from_json(const nlohmann::json& doc) {
  try {
    if (doc.value("format", "") != "lqshrink-fredholm-problem") {
      throw ConfigError("not a problem document (missing format tag)");
    }
    FredholmProblem p;
    p.x_grid = vector_from_json(doc.at("x_grid"));
    p.y_grid = vector_from_json(doc.at("y_grid"));
    if (doc.value("quadrature", "trapezoidal") != "trapezoidal") {
      throw ConfigError("unsupported quadrature '" + doc.at("quadrature").get<std::string>() + "'");
    }
    const auto& kernel = doc.at("kernel");
    const auto kind = kernel.at("kind").get<std::string>();
    if (kind == "matrix") {
      const auto& rows = kernel.at("matrix");
      p.kernel_matrix.resize(static_cast<Eigen::Index>(rows.size()), p.x_grid.size());
      for (std::size_t i = 0; i < rows.size(); ++i) {
        const auto row = vector_from_json(rows[i]);
        if (row.size() != p.x_grid.size()) throw ConfigError("kernel matrix row has wrong length");
        p.kernel_matrix.row(static_cast<Eigen::Index>(i)) = row.transpose();
      }
    } else {
      KernelSpec spec{kernel_kind_from_string(kind), kernel.at("width").get<double>(), kernel.value("time", 1.0)};
      p.kernel_spec = spec;
      p.kernel_matrix = make_synthetic_kernel(spec, p.x_grid, p.y_grid);
    }
    p.noise_sigma = doc.value("noise_sigma", 0.0);
    p.seed = doc.value("seed", std::uint64_t{42});
    if (doc.contains("truth")) p.ground_truth = vector_from_json(doc.at("truth"));
    if (doc.contains("data")) p.observed = vector_from_json(doc.at("data"));
    p.validate();
    return p;
  } catch (const json::exception& e) {
    throw ConfigError(std::string("malformed problem document: ") + e.what());
  }
}

void save_problem(const std::filesystem::path& path, const FredholmProblem& problem) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw IoError("cannot write problem file " + path.string());
  out << to_json(problem).dump(1) << '\n';
  if (!out) throw IoError("write failed for " + path.string());
}

FredholmProblem load_problem(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open problem file " + path.string());
  json doc;
  try {
    in >> doc;
  } catch (const json::exception& e) {
    throw ConfigError("cannot parse problem file " + path.string() + ": " + e.what());
  }
  return problem_from_json(doc);
}

Eigen::VectorXd problem_data(const FredholmProblem& problem) {
  if (problem.observed) return *problem.observed;
  return observe(problem);
}

}  // namespace lqshrink
