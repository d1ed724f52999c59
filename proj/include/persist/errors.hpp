#pragma once

#include <stdexcept>
#include <string>

namespace persist {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Argument outside the mathematical domain of an operation.
struct DomainError : Error {
  using Error::Error;
};

/// Invalid or incompatible combination of specs.
struct ConfigError : Error {
  using Error::Error;
};

/// A declared bound or invariant was violated by the data.
struct ContractViolation : Error {
  using Error::Error;
};

struct DegeneratePathError : Error {
  using Error::Error;
};

/// Estimator cannot proceed on the data (e.g. zero survivors).
struct InsufficientDataError : Error {
  using Error::Error;
};

/// Requested reference value is not known in closed form.
struct UnknownValueError : Error {
  using Error::Error;
};

struct FactorizationError : Error {
  FactorizationError(const std::string& what, double eigenvalue)
      : Error(what), offending_eigenvalue(eigenvalue) {}
  double offending_eigenvalue;
};

}  // namespace persist
