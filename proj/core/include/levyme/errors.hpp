#pragma once

#include <stdexcept>
#include <string>

namespace levyme {

/// Base of every exception thrown by this library.
class Error : public std::runtime_error {
  public:
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

/// Input or precondition violation (CLI exit code 2).
class DomainError : public Error {
  public:
    using Error::Error;
};

/// Numerical failure of an otherwise valid computation (CLI exit code 3).
class NumericError : public Error {
  public:
    using Error::Error;
};

class SingularMatrixError : public NumericError {
  public:
    using NumericError::NumericError;
};

class NoConvergenceError : public NumericError {
  public:
    using NumericError::NumericError;
};

/// Eigenvalue separation below tolerance; the spectral path supports simple spectra only.
class MultipleRootsError : public DomainError {
  public:
    using DomainError::DomainError;
};

class DomainViolationError : public DomainError {
  public:
    using DomainError::DomainError;
};

class ContourLeavesDomainError : public DomainError {
  public:
    using DomainError::DomainError;
};

class ConjugationViolationError : public DomainError {
  public:
    using DomainError::DomainError;
};

class InvalidRepresentationError : public DomainError {
  public:
    using DomainError::DomainError;
};

class DefectiveSampleError : public DomainError {
  public:
    using DomainError::DomainError;
};

class BranchCutError : public DomainError {
  public:
    using DomainError::DomainError;
};

class LeftHalfPlaneError : public NumericError {
  public:
    using NumericError::NumericError;
};

class ResidualTooLargeError : public NumericError {
  public:
    using NumericError::NumericError;
};

class ConfluentRootsError : public DomainError {
  public:
    using DomainError::DomainError;
};

class SingularAtZeroError : public DomainError {
  public:
    using DomainError::DomainError;
};

class QuadratureFailureError : public NumericError {
  public:
    using NumericError::NumericError;
};

class EigenvalueCollisionError : public DomainError {
  public:
    using DomainError::DomainError;
};

class BetaDomainError : public DomainError {
  public:
    using DomainError::DomainError;
};

class NotPhaseTypeError : public DomainError {
  public:
    using DomainError::DomainError;
};

class InsufficientPassagesError : public NumericError {
  public:
    using NumericError::NumericError;
};

class UnknownOperationError : public DomainError {
  public:
    using DomainError::DomainError;
};

class ProbabilityRangeError : public NumericError {
  public:
    using NumericError::NumericError;
};

} // namespace levyme
