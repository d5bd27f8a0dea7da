#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace cbo {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Operation called outside its domain (empty subset, degenerate ensemble).
struct DomainError : Error {
  using Error::Error;
};

/// Malformed arguments (non-finite values, dimension mismatch).
struct InputError : Error {
  using Error::Error;
};

/// Invalid parameters or experiment configuration.
struct ConfigError : Error {
  using Error::Error;
};

/// Objective lacks a capability the caller needs (per-sample losses, gradients, known minimum).
struct UnsupportedError : Error {
  using Error::Error;
};

/// Malformed binary or text file.
struct FormatError : Error {
  using Error::Error;
};

/// File shorter than its header promises.
struct LengthError : FormatError {
  using FormatError::FormatError;
};

/// Two files that must agree (images and labels) do not.
struct ConsistencyError : FormatError {
  using FormatError::FormatError;
};

/// The objective returned a non-finite value during a run.
struct NonFiniteLossError : Error {
  NonFiniteLossError(std::size_t particle, std::size_t iteration, double value)
      : Error("objective returned " + std::to_string(value) + " for particle " +
              std::to_string(particle) + " at iteration " + std::to_string(iteration)),
        particle(particle),
        iteration(iteration),
        value(value) {}

  std::size_t particle;
  std::size_t iteration;
  double value;
};

}  // namespace cbo
