#pragma once

#include <stdexcept>
#include <string>

namespace splitbell {

/// Base class of every exception thrown by the library.
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// An index, label or parameter lies outside its admissible range.
class RangeError : public Error {
public:
  using Error::Error;
};

/// The adaptive integrator ran out of steps before reaching the target.
class IntegrationError : public Error {
public:
  IntegrationError(const std::string& what, double achieved)
      : Error(what), achieved_(achieved) {}

  /// Evolution parameter reached before the failure.
  double achieved() const noexcept { return achieved_; }

private:
  double achieved_;
};

/// A ratio-type correlator has a vanishing denominator (e.g. a vacuum-only
/// table for the normalized or vacuum-excluding estimators).
class UndefinedCorrelator : public Error {
public:
  using Error::Error;
};

}  // namespace splitbell
