#pragma once

#include <stdexcept>
#include <string>

namespace nsit {

/// Argument outside the mathematical domain of an operation (negative time,
/// non-positive frequency, too few Monte Carlo shots, ...).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Bloch vector longer than the unit ball allows.
class BlochNormError : public DomainError {
 public:
  using DomainError::DomainError;
};

/// Matrix handed to a routine that requires a density matrix failed the
/// trace, Hermiticity or positivity check.
class InvalidStateError : public DomainError {
 public:
  using DomainError::DomainError;
};

class NonHermitianError : public DomainError {
 public:
  using DomainError::DomainError;
};

/// Undamped dynamics (gamma0 = 0) has a continuum of fixed points.
class NoUniqueSteadyState : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// Selective update requested for an outcome that cannot occur.
class ZeroProbabilityOutcome : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace nsit
