#pragma once

#include <stdexcept>
#include <string>

namespace oldroyd {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

/// Arrays or fields whose lattice does not match the expected grid.
class GridMismatch : public Error {
 public:
  using Error::Error;
};

/// Coefficients that no longer describe a real field.
class SymmetryError : public Error {
 public:
  using Error::Error;
};

/// Parameter or configuration value outside its admissible range.
class RangeError : public Error {
 public:
  using Error::Error;
};

/// Non-finite values appeared while evolving a state.
class BlowUpError : public Error {
 public:
  BlowUpError(const std::string& msg, long step, double time, std::string field)
      : Error(msg), step_(step), time_(time), field_(std::move(field)) {}

  long step() const { return step_; }
  double time() const { return time_; }
  const std::string& field() const { return field_; }

 private:
  long step_;
  double time_;
  std::string field_;
};

class QuadratureError : public Error {
 public:
  using Error::Error;
};

class FitError : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace oldroyd
