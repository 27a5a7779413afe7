#pragma once

#include <stdexcept>
#include <string>

namespace kinscat {

/// Root of the library's exception hierarchy.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid configuration or mismatched inputs.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// A hypothesis on the model or equilibrium does not hold (e.g. Penrose unstable).
class HypothesisError : public Error {
 public:
  using Error::Error;
};

/// Numerical failure: divergence, blow-up, non-convergent quadrature.
class NumericalError : public Error {
 public:
  using Error::Error;
};

/// Argument outside the region where a transform is analytic / defined.
class DomainError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class IntegrationError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

/// |1 + coupling * L[...]| fell below the configured floor.
class NearSingularError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

/// Fixed-point iteration left its ball or did not contract.
class NoContractionError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class BlowUpError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class OverflowError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

}  // namespace kinscat
