#pragma once

#include <stdexcept>
#include <string>

namespace gbw {

// All library failures derive from gbw::Error so callers can catch the family
// or a specific condition.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DimensionError : public Error {
 public:
  using Error::Error;
};

// Input matrix fails the positive-definiteness floor (or is non-finite).
class DegenerateInputError : public Error {
 public:
  using Error::Error;
};

class NotSymmetricError : public Error {
 public:
  using Error::Error;
};

// A factorization did not converge.
class ComputationError : public Error {
 public:
  using Error::Error;
};

// The generalized Lyapunov operator is numerically singular (λ_i + λ_j below floor).
class SingularOperatorError : public Error {
 public:
  using Error::Error;
};

// Rank-deficient general matrix where an invertible one is required.
class SingularInputError : public Error {
 public:
  using Error::Error;
};

// Exponential map requested outside its injectivity domain. Solvers catch this
// and shrink the step.
class InjectivityDomainError : public Error {
 public:
  using Error::Error;
};

// A curve or interpolation left the SPD cone.
class OutOfConeError : public Error {
 public:
  using Error::Error;
};

class PreconditionError : public Error {
 public:
  using Error::Error;
};

class NumericalError : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

class SolverError : public Error {
 public:
  using Error::Error;
};

}  // namespace gbw
