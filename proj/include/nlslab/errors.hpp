#pragma once

#include <stdexcept>
#include <string>

namespace nlslab {

// Invalid input or configuration. The CLI maps this to exit code 1.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// NaN/Inf, non-convergent quadrature, boundary-mass violations. Exit code 2.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class QuadratureError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class BoundaryMassError : public NumericalError {
 public:
  BoundaryMassError(const std::string& where, double fraction);
  double fraction() const { return fraction_; }

 private:
  double fraction_;
};

// An invariant checked by `selftest` did not hold. Exit code 3.
class AcceptanceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace nlslab
