#pragma once

#include <stdexcept>
#include <string>

namespace rlab {

/// Base class for every error raised by the lab.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A precondition on an argument was violated (bad dimension, radius, exponent, ...).
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Requested flow time at or past the extinction guard.
class ExtinctionError : public Error {
 public:
  using Error::Error;
};

/// Explicit step rejected by the CFL guard.
class CflError : public Error {
 public:
  CflError(const std::string& what, double admissible_dt)
      : Error(what), admissible_dt_(admissible_dt) {}
  double admissible_dt() const noexcept { return admissible_dt_; }

 private:
  double admissible_dt_;
};

/// The standing hypothesis (finite horizon or positive lambda0) does not hold.
class HypothesisRefused : public Error {
 public:
  using Error::Error;
};

/// Scenario file or command line could not be parsed or validated.
class ConfigError : public Error {
 public:
  ConfigError(const std::string& what, int line = 0, std::string key = {})
      : Error(what), line_(line), key_(std::move(key)) {}
  int line() const noexcept { return line_; }
  const std::string& key() const noexcept { return key_; }

 private:
  int line_;
  std::string key_;
};

}  // namespace rlab
