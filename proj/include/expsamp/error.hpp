#pragma once

#include <stdexcept>
#include <string>

namespace expsamp {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Argument outside the domain of a function (non-finite or non-positive w, ...).
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Malformed or inadmissible configuration (spec strings, intervals, orders).
class ConfigError : public Error {
 public:
  ConfigError(const std::string& what, std::size_t position = npos)
      : Error(position == npos ? what
                               : what + " (at position " + std::to_string(position) + ")"),
        position_(position) {}

  static constexpr std::size_t npos = static_cast<std::size_t>(-1);

  std::size_t position() const noexcept { return position_; }

 private:
  std::size_t position_;
};

/// An iterative numerical procedure stopped before reaching its tolerance.
/// Carries the best estimate obtained and its error bound.
class ConvergenceError : public Error {
 public:
  ConvergenceError(const std::string& what, double estimate, double error_bound)
      : Error(what + " (estimate " + std::to_string(estimate) + ", error bound " +
              std::to_string(error_bound) + ")"),
        estimate_(estimate),
        error_bound_(error_bound) {}

  double estimate() const noexcept { return estimate_; }
  double error_bound() const noexcept { return error_bound_; }

 private:
  double estimate_;
  double error_bound_;
};

class OverflowError : public Error {
 public:
  using Error::Error;
};

}  // namespace expsamp
