#pragma once

#include <stdexcept>
#include <string>

namespace qwork {

/// Index/arity violations and malformed parameters.
class ArgumentError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Input outside the mathematical domain of an operation (M0 != 1,
/// non-positive frequency, inconsistent moment sequence, ...).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Quantities that are infinite for the requested protocol, e.g. the
/// Lanczos coefficients of a quench that starts from a zero mode.
class DivergenceError : public DomainError {
 public:
  using DomainError::DomainError;
};

/// The working precision (or a truncation/quadrature tolerance) is not enough
/// to deliver the requested accuracy. Retrying with more bits may help.
class PrecisionError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A Krylov chain needed more sites than the configured cap.
class TruncationError : public PrecisionError {
 public:
  using PrecisionError::PrecisionError;
};

}  // namespace qwork
