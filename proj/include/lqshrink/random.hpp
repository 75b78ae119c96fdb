#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <optional>
#include <random>

namespace lqshrink {

// Raw mt19937_64 bits are fixed by the standard, the distributions are not. Everything
// that ends up in an output file draws through this so reruns match across toolchains.
class PortableRng {
 public:
  explicit PortableRng(std::uint64_t seed) : rng_(seed) {}

  // Box-Muller, second value kept for the next call.
  double gaussian() {
    if (spare_) {
      const double out = *spare_;
      spare_.reset();
      return out;
    }
    const double u1 = uniform_open();
    const double u2 = uniform_open();
    const double radius = std::sqrt(-2.0 * std::log(u1));
    const double angle = 2.0 * std::numbers::pi * u2;
    spare_ = radius * std::sin(angle);
    return radius * std::cos(angle);
  }

  // [0, 1)
  double uniform() { return static_cast<double>(rng_() >> 11) * 0x1.0p-53; }

  // 0 .. n-1 by scaling the top 53 bits; the bias is below 2^-53 * n
  std::int64_t index(std::int64_t n) {
    const auto k = static_cast<std::int64_t>(uniform() * static_cast<double>(n));
    return k < n ? k : n - 1;
  }

 private:
  // (0, 1] from the top 53 bits.
  double uniform_open() { return (static_cast<double>(rng_() >> 11) + 1.0) * 0x1.0p-53; }

  std::mt19937_64 rng_;
  std::optional<double> spare_;
};

}  // namespace lqshrink
