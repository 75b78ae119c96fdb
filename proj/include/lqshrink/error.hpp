#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace lqshrink {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A parameter is outside the domain an operation accepts (e.g. q outside [0, 2]).
class DomainError : public Error {
 public:
  using Error::Error;
};

// q < 1/rho: the shrinkage rule does not satisfy the constant-factor hypothesis.
class HypothesisError : public DomainError {
 public:
  using DomainError::DomainError;
};

class DimensionError : public Error {
 public:
  using Error::Error;
};

class NotAFrameError : public Error {
 public:
  using Error::Error;
};

// Data vector is not in the range of the forward operator.
class RangeError : public Error {
 public:
  RangeError(const std::string& what, double residual) : Error(what), residual_(residual) {}
  double residual() const noexcept { return residual_; }

 private:
  double residual_;
};

class DivergenceError : public Error {
 public:
  DivergenceError(const std::string& what, std::size_t iteration)
      : Error(what), iteration_(iteration) {}
  std::size_t iteration() const noexcept { return iteration_; }

 private:
  std::size_t iteration_;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace lqshrink
