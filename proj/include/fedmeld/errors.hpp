#pragma once

#include <stdexcept>
#include <string>

namespace fedmeld {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A function argument is outside its domain (non-positive distance, bad index, ...).
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// A configuration value violates a model invariant.
class InvalidConfig : public Error {
 public:
  using Error::Error;
};

/// Non-finite values appeared during training or evaluation.
class NumericError : public Error {
 public:
  using Error::Error;
};

/// The mix schedule cannot be realised by the constellation timing
/// (for example the flight time cannot hold delta rounds).
class InfeasibleSchedule : public Error {
 public:
  using Error::Error;
};

/// Convergence-bound constants are outside the range where the bound holds.
class ValidityError : public Error {
 public:
  using Error::Error;
};

/// An inner optimisation used for estimation failed to converge.
class EstimationError : public Error {
 public:
  using Error::Error;
};

}  // namespace fedmeld
