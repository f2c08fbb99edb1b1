#pragma once

#include <stdexcept>
#include <string>

namespace causaldr {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Invalid argument values (rho out of range, bad hyperparameters, ...).
struct ParameterError : Error {
  using Error::Error;
};

// Dimension mismatches between matrices/vectors.
struct ShapeError : Error {
  using Error::Error;
};

// A model fit could not be completed (singular matrix after fallback, ...).
struct FitError : Error {
  using Error::Error;
};

// Repeated draws produced single-arm datasets.
struct DegenerateDesignError : Error {
  using Error::Error;
};

// A documented precondition was violated by the caller.
struct ContractError : Error {
  using Error::Error;
};

struct IoError : Error {
  using Error::Error;
};

// Bad CLI flags or config contents; maps to exit code 1.
struct UsageError : Error {
  using Error::Error;
};

}  // namespace causaldr
