#pragma once

#include <stdexcept>
#include <string>

namespace skewbessel {

/// Base of every exception thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// An argument lies outside the domain of the requested function.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// The lower parameter of a hypergeometric series is a non-positive integer.
class PoleError : public Error {
 public:
  using Error::Error;
};

/// A series or iteration exhausted its term cap before converging.
class NonConvergence : public Error {
 public:
  using Error::Error;
};

/// Adaptive quadrature could not reach the requested tolerance.
class QuadratureFailure : public Error {
 public:
  using Error::Error;
};

/// A rejection sampler's acceptance rate collapsed.
class RejectionStall : public Error {
 public:
  using Error::Error;
};

/// Inconsistent simulation or experiment configuration.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Not enough data points for an estimator.
class InsufficientData : public Error {
 public:
  using Error::Error;
};

/// A construction-time self-check (normalization, cross-route agreement) failed.
class InvariantViolation : public Error {
 public:
  using Error::Error;
};

}  // namespace skewbessel
