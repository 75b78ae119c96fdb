#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Core>
#include <json.hpp>

namespace lqshrink {

enum class KernelKind { kGaussianBlur, kSigmoidFront };

std::string_view to_string(KernelKind kind);
KernelKind kernel_kind_from_string(std::string_view name);

// gaussian_blur:  K(x, y) = exp(-(x - y)^2 / (2 width^2))
// sigmoid_front:  K(x, y) = 1 / (1 + exp(-(y - x * time) / width)), a sedimentation-like front
//                 whose position moves with speed x.
struct KernelSpec {
  KernelKind kind = KernelKind::kSigmoidFront;
  double width = 0.01;
  double time = 1.0;  // sigmoid_front only
};

// Trapezoidal weights for a strictly increasing grid.
Eigen::VectorXd trapezoid_weights(const Eigen::VectorXd& grid);

Eigen::VectorXd linspace(double lo, double hi, Eigen::Index n);

// P x M matrix with entries w_j K(x_j, y_i), w the trapezoidal weights on x_grid. Throws
// DomainError for non-increasing grids or nonpositive width/time.
Eigen::MatrixXd make_synthetic_kernel(const KernelSpec& spec, const Eigen::VectorXd& x_grid,
                                      const Eigen::VectorXd& y_grid);

struct Spike {
  Eigen::Index position;
  double amplitude;
};

// Vector of length m with exactly spikes.size() nonzeros. Throws DomainError on duplicate or
// out-of-range positions and nonpositive amplitudes.
Eigen::VectorXd make_sparse_truth(Eigen::Index m, const std::vector<Spike>& spikes);

struct FredholmProblem {
  Eigen::VectorXd x_grid;  // M solution-axis samples
  Eigen::VectorXd y_grid;  // P data-axis samples
  std::optional<KernelSpec> kernel_spec;  // absent when the matrix was supplied inline
  Eigen::MatrixXd kernel_matrix;          // P x M, quadrature weighted
  std::optional<Eigen::VectorXd> ground_truth;
  std::optional<Eigen::VectorXd> observed;  // measured data, when not synthesized from the truth
  double noise_sigma = 0.0;
  std::uint64_t seed = 42;

  void validate() const;
};

// f = K g* + sigma xi, xi standard Gaussian drawn from `seed`; deterministic per seed on every
// platform. Throws DomainError without ground truth.
Eigen::VectorXd observe(const FredholmProblem& problem);

// ||K g*|| / (sigma sqrt(P)); infinite for sigma = 0.
double signal_to_noise(const FredholmProblem& problem);

struct BenchmarkSpec {
  Eigen::Index size = 100;  // M = P
  KernelSpec kernel{};
  std::vector<Spike> spikes = {{45, 1.0}, {55, 0.6}, {66, 0.8}, {89, 0.5}};
  double relative_noise = 1e-2;  // sigma = relative_noise * max |K g*|
  std::uint64_t seed = 42;
};

// Sedimentation surrogate on x, y in [0, 1]. Spike positions and amplitudes are given for
// size 100; other sizes scale positions by size/100 and amplitudes by the same factor, so that
// K g* (a quadrature of a density) is resolution independent.
FredholmProblem make_benchmark(const BenchmarkSpec& spec = {});

// Self-describing JSON: grids, kernel spec (or inline matrix), quadrature, truth, sigma, seed,
// observed data and SNR.
nlohmann::json to_json(const FredholmProblem& problem);
FredholmProblem problem_from_json(const nlohmann::json& doc);

// Throws IoError on missing or unreadable files.
void save_problem(const std::filesystem::path& path, const FredholmProblem& problem);
FredholmProblem load_problem(const std::filesystem::path& path);

// The stored observation if present, else observe(problem).
Eigen::VectorXd problem_data(const FredholmProblem& problem);

}  // namespace lqshrink
