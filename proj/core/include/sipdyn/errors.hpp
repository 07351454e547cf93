#pragma once

#include <stdexcept>
#include <string>

namespace sipdyn {

// Base of every error thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Bad user input: parameters, ranges, names, initial conditions.
class ValidationError : public Error {
 public:
  using Error::Error;
};

// Something went wrong while computing; input was fine.
class NumericalError : public Error {
 public:
  using Error::Error;
};

class SingularStateError : public Error {
 public:
  using Error::Error;
};

class InfeasibleEquilibriumError : public Error {
 public:
  using Error::Error;
};

class StepUnderflowError : public NumericalError {
 public:
  StepUnderflowError(double t, double h)
      : NumericalError("step size underflow (h=" + std::to_string(h) +
                       ") at t=" + std::to_string(t)),
        time_(t) {}
  double time() const noexcept { return time_; }

 private:
  double time_;
};

class NotHopfPointError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class DegenerateEigenvectorError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class SeedError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

}  // namespace sipdyn
