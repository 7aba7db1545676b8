#pragma once

#include <stdexcept>
#include <string>

namespace rieszlab {

/// Root of the library's exception hierarchy.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A computation was attempted and failed numerically. CLI exit status 1.
class NumericalError : public Error {
 public:
  using Error::Error;
};

/// The caller asked for something outside an operation's contract. CLI exit
/// status 2.
class ConfigError : public Error {
 public:
  using Error::Error;
};

class NotPositiveDefinite : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class NoConvergence : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class QuadratureFailure : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class InsufficientCoefficients : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class NegativeQuadraticForm : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class SearchDiverged : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class VerificationFailed : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class DomainError : public ConfigError {
 public:
  using ConfigError::ConfigError;
};

class Unsupported : public ConfigError {
 public:
  using ConfigError::ConfigError;
};

class NotFast : public ConfigError {
 public:
  using ConfigError::ConfigError;
};

class NotEquivalent : public ConfigError {
 public:
  using ConfigError::ConfigError;
};

}  // namespace rieszlab
