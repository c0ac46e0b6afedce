#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace gaia {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Shape or dimension disagreement between operands.
class DimensionError : public Error {
 public:
  using Error::Error;
};

// NaN or Inf reached a place where only finite values are allowed.
class NumericError : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

class CorruptionError : public IoError {
 public:
  using IoError::IoError;
};

// Training produced a non-finite loss. Carries the step it happened at.
class DivergenceError : public Error {
 public:
  DivergenceError(std::size_t step, const std::string& what)
      : Error("diverged at step " + std::to_string(step) + ": " + what), step_(step) {}
  std::size_t step() const noexcept { return step_; }

 private:
  std::size_t step_;
};

}  // namespace gaia
