// Error types shared by all thrustdir modules.
#pragma once

#include <stdexcept>
#include <string>

namespace thrustdir {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A non-finite value or an out-of-domain argument reached a public operation.
class ContractViolation : public Error {
 public:
  using Error::Error;
};

/// Air speed too small for the aerodynamic angles to be defined.
class ZeroAirspeed : public Error {
 public:
  using Error::Error;
};

/// Normal equations of the coefficient fit are singular.
class DegenerateFit : public Error {
 public:
  using Error::Error;
};

/// The force vector defining the reference thrust direction vanished.
class SingularReference : public Error {
 public:
  using Error::Error;
};

/// Thrust direction reached the antipode of its reference.
class AntipodalAttitude : public Error {
 public:
  using Error::Error;
};

/// Simulated state left the finite range.
class NonFiniteState : public Error {
 public:
  using Error::Error;
};

/// Malformed scenario, table or command-line input.
class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace thrustdir
