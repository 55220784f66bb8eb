#pragma once

#include <stdexcept>
#include <string>

namespace spinres {

/// Base class for all library errors.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A caller-supplied value violates a precondition (bad spin quantum number,
/// negative rate, non-Hermitian matrix, ...).
class InvalidInputError : public Error {
 public:
  using Error::Error;
};

/// A level derivative was requested at a (near-)degenerate eigenvalue.
class DegenerateLevelError : public Error {
 public:
  using Error::Error;
};

/// Field evaluation requested on top of a wire or other singular geometry.
class SingularGeometryError : public Error {
 public:
  using Error::Error;
};

/// A regime condition cannot be met for any resonator quality factor.
class UnreachableRegimeError : public Error {
 public:
  using Error::Error;
};

/// No cavity-to-spin transfer optimum exists in the search window.
class NoTransferError : public Error {
 public:
  using Error::Error;
};

/// More modes requested than the ensemble can hold.
class CapacityError : public Error {
 public:
  using Error::Error;
};

/// The integrator produced non-finite amplitudes.
class NumericalInstabilityError : public Error {
 public:
  using Error::Error;
};

/// The detection model predicts zero signal (zero polarization or coupling).
class UndetectableError : public Error {
 public:
  using Error::Error;
};

/// Scenario file could not be parsed or validated.
class ScenarioError : public Error {
 public:
  using Error::Error;
};

}  // namespace spinres
