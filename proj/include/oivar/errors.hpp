#pragma once

#include <stdexcept>
#include <string>

namespace oivar {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed or non-finite inputs, dimension mismatches, bad files.
class InputError : public Error {
 public:
  using Error::Error;
};

// A matrix that must be invertible has a pivot below the singularity threshold.
class SingularMatrixError : public Error {
 public:
  using Error::Error;
};

// The chain reached a state where a conditional is not defined
// (e.g. rank-deficient B0 rows, zero diagonal pivot).
class DegenerateStateError : public Error {
 public:
  using Error::Error;
};

// Factorization failure of a matrix that should be positive definite.
class NumericalError : public Error {
 public:
  using Error::Error;
};

// Raised by the Gibbs sweep; carries the 1-based step index that failed.
class StepError : public Error {
 public:
  StepError(int step, const std::string& what)
      : Error("gibbs step " + std::to_string(step) + ": " + what), step_(step) {}
  int step() const noexcept { return step_; }

 private:
  int step_;
};

}  // namespace oivar
