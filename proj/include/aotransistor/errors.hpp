#pragma once

#include <stdexcept>
#include <string>

namespace aotx {

/// Base class for every error raised by the simulator.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A caller-supplied quantity is outside its domain (negative power, NaN, ...).
class InvalidParameter : public Error {
 public:
  using Error::Error;
};

/// The Liouvillian has more than one stationary state.
class DegenerateSteadyState : public Error {
 public:
  DegenerateSteadyState(const std::string& what, int null_dimension)
      : Error(what), null_dimension_(null_dimension) {}
  int null_dimension() const noexcept { return null_dimension_; }

 private:
  int null_dimension_;
};

/// The dense steady-state system could not be solved reliably.
class SolveFailure : public Error {
 public:
  using Error::Error;
};

/// The inputs drive the model outside what it represents (e.g. optical gain).
class ModelViolation : public Error {
 public:
  using Error::Error;
};

/// Damped Picard iteration did not settle within the iteration cap.
class FixedPointDiverged : public Error {
 public:
  FixedPointDiverged(const std::string& what, double prev_1, double prev_2,
                     double last_1, double last_2)
      : Error(what), previous{prev_1, prev_2}, last{last_1, last_2} {}
  double previous[2];
  double last[2];
};

/// Malformed or inconsistent configuration input.
class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace aotx
