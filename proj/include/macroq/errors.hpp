#pragma once

#include <stdexcept>
#include <string>

namespace macroq {

// Every failure raised by the library derives from Error. The CLI maps the
// concrete type onto its exit code.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Incompatible shapes, out-of-range indices, bad parameters.
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

// A state violates one of the density-matrix / pure-state invariants.
class ValidationError : public Error {
 public:
  using Error::Error;
};

// Fock truncation too small for the requested state, or dimension over budget.
class TruncationError : public Error {
 public:
  TruncationError(const std::string& what, int recommended_truncation = 0)
      : Error(what), recommended_truncation_(recommended_truncation) {}

  int recommended_truncation() const { return recommended_truncation_; }

 private:
  int recommended_truncation_;
};

// Phase-space grid too coarse for the requested finite-difference accuracy.
class ResolutionError : public Error {
 public:
  using Error::Error;
};

// Two routes that must agree did not.
class ConsistencyError : public Error {
 public:
  using Error::Error;
};

}  // namespace macroq
