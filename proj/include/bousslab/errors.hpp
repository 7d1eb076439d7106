#pragma once

#include <stdexcept>
#include <string>

namespace bousslab {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Coefficients violate (C0) or fall outside both well-posedness families.
class ConstraintViolation : public Error {
 public:
  enum class Which { C0, C1C2 };
  ConstraintViolation(Which which, const std::string& what)
      : Error(what), which_(which) {}
  Which which() const noexcept { return which_; }

 private:
  Which which_;
};

class Unclassifiable : public Error {
 public:
  using Error::Error;
};

class NoThreshold : public Error {
 public:
  using Error::Error;
};

/// The time integration diverged.
class BlowUp : public Error {
 public:
  BlowUp(const std::string& what, long step, long mode)
      : Error(what), step_(step), mode_(mode) {}
  long step() const noexcept { return step_; }
  long mode() const noexcept { return mode_; }

 private:
  long step_;
  long mode_;
};

class DegenerateSeries : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace bousslab
