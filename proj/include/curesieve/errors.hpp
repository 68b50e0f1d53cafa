#pragma once

#include <stdexcept>
#include <string>

namespace curesieve {

/// Base class of every error thrown by this library.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Invalid knot sequence, constraint set, or algorithm configuration.
struct ConfigurationError : Error {
  using Error::Error;
};

/// Argument outside its admissible range (e.g. a time outside [0, tau]).
struct DomainError : Error {
  using Error::Error;
};

/// Likelihood undefined at the requested point (nonpositive hazard at an
/// exact event, zero-probability censoring interval).
struct EvaluationError : Error {
  using Error::Error;
};

/// Dataset violates a model requirement (no exact events, bad subject).
struct DataError : Error {
  using Error::Error;
};

/// Singular information matrix or non-finite scores.
struct InferenceError : Error {
  using Error::Error;
};

/// Simulation study failure (excessive non-convergence).
struct McError : Error {
  using Error::Error;
};

/// CSV input failure, carries the 1-based line number.
struct ParseError : Error {
  ParseError(int line_number, const std::string& message)
      : Error("line " + std::to_string(line_number) + ": " + message),
        line(line_number) {}
  int line;
};

}  // namespace curesieve
