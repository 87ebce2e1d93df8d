#pragma once

#include <stdexcept>
#include <string>

namespace spca {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed or non-finite input data (CSV contents, matrices with NaN, ...).
class InputDataError : public Error {
 public:
  using Error::Error;
};

class DimensionError : public Error {
 public:
  using Error::Error;
};

/// A documented precondition of a formula or routine does not hold.
class PreconditionError : public Error {
 public:
  using Error::Error;
};

/// An iterative method ran out of iterations.
class ConvergenceError : public Error {
 public:
  ConvergenceError(const std::string& what, double last_residual)
      : Error(what), last_residual_(last_residual) {}

  double last_residual() const noexcept { return last_residual_; }

 private:
  double last_residual_;
};

/// NaN or infinity appeared inside an iteration.
class NumericalError : public Error {
 public:
  using Error::Error;
};

}  // namespace spca
