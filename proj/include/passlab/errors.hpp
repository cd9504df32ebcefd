#pragma once

#include <stdexcept>
#include <string>

namespace passlab {

/// Base class for all library errors.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid argument or violated precondition.
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// Grid does not satisfy size/extent requirements (too narrow, not a power of two, ...).
class GridError : public Error {
 public:
  using Error::Error;
};

/// Two objects that must share a grid do not.
class GridMismatch : public Error {
 public:
  using Error::Error;
};

/// Moments requested for a state with vanishing norm.
class ZeroNormError : public Error {
 public:
  using Error::Error;
};

/// Time stepping produced a non-finite amplitude.
class InstabilityError : public Error {
 public:
  using Error::Error;
};

/// Reset state with no overlap between wave function and detector.
class ZeroOverlapError : public Error {
 public:
  using Error::Error;
};

/// A quadrature or discretization failed its self-convergence check.
class ConvergenceError : public Error {
 public:
  using Error::Error;
};

/// Physical setup outside the regime the model is meant for (e.g. no detection).
class RegimeError : public Error {
 public:
  using Error::Error;
};

/// Configuration file problems; `where` names the field path or line.
class ConfigError : public Error {
 public:
  ConfigError(std::string where, const std::string& what)
      : Error(where.empty() ? what : where + ": " + what), where_(std::move(where)) {}
  const std::string& where() const noexcept { return where_; }

 private:
  std::string where_;
};

}  // namespace passlab
