#pragma once

#include <stdexcept>
#include <string>

namespace v2x {

/// Raised by config::validate with the name of the first violated invariant.
class ValidationError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Raised when nearest() is asked about an empty point set.
class EmptySetError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A realization that cannot produce a serving link (no base station and no
/// vehicle within rho).
class DegenerateRealization : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Adaptive quadrature hit its subdivision limit with the error estimate still
/// above tolerance. Carries the best value and error bound reached.
class NonConvergence : public std::runtime_error {
 public:
  NonConvergence(const std::string& what, double value, double error_bound)
      : std::runtime_error(what), value_(value), error_bound_(error_bound) {}

  double value() const noexcept { return value_; }
  double error_bound() const noexcept { return error_bound_; }

 private:
  double value_;
  double error_bound_;
};

}  // namespace v2x
