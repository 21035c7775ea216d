#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace bethe {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Shape or index mismatch between operands.
class DimensionError : public Error {
 public:
  using Error::Error;
};

/// Invalid parameters (negative step, out-of-range chain length, ...).
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// An iterative method stopped before meeting its tolerance.
/// Derived types carry the last iterate.
class ConvergenceError : public Error {
 public:
  ConvergenceError(const std::string& what, std::size_t iterations, double residual)
      : Error(what), iterations_(iterations), residual_(residual) {}

  std::size_t iterations() const noexcept { return iterations_; }
  double residual() const noexcept { return residual_; }

 private:
  std::size_t iterations_;
  double residual_;
};

}  // namespace bethe
