#pragma once

#include <stdexcept>
#include <string>

namespace qsn {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// A parameter outside the domain a model or operation accepts.
struct InvalidArgument : Error {
  using Error::Error;
};

/// Requested problem exceeds what the exact solver is allowed to allocate.
struct CapacityError : Error {
  using Error::Error;
};

struct ConvergenceError : Error {
  ConvergenceError(const std::string& what, double best_residual)
      : Error(what), best_residual(best_residual) {}
  double best_residual;
};

struct InvalidDensityMatrix : Error {
  using Error::Error;
};

/// Configuration that fails to parse or validate. `line` is 0 when unknown.
struct ConfigError : Error {
  explicit ConfigError(const std::string& what, int line = 0)
      : Error(what), line(line) {}
  int line;
};

struct IoError : Error {
  using Error::Error;
};

}  // namespace qsn
