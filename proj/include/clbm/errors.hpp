#ifndef CLBM_ERRORS_HPP
#define CLBM_ERRORS_HPP

#include <cstddef>
#include <stdexcept>
#include <string>

namespace clbm {

/// Base class for every error raised by the library. Precondition violations
/// on plain arguments (e.g. a nonpositive density) use std::invalid_argument.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A lifted state or operator would exceed the configured memory cap.
class CapacityError : public Error {
 public:
  CapacityError(const std::string& what, std::size_t requested_bytes, std::size_t cap_bytes)
      : Error(what + ": needs " + std::to_string(requested_bytes) + " bytes, cap is " +
              std::to_string(cap_bytes) + " bytes"),
        requested_bytes_(requested_bytes),
        cap_bytes_(cap_bytes) {}

  std::size_t requested_bytes() const { return requested_bytes_; }
  std::size_t cap_bytes() const { return cap_bytes_; }

 private:
  std::size_t requested_bytes_;
  std::size_t cap_bytes_;
};

/// A time loop produced a non-finite value.
class NumericalError : public Error {
 public:
  using Error::Error;
};

/// A single-step lifted state was asked to take part in a second update.
class StateExhaustedError : public Error {
 public:
  using Error::Error;
};

/// No phase pair realises an eigenvalue for the requested LCU weight.
class InfeasibleDecompositionError : public Error {
 public:
  InfeasibleDecompositionError(const std::string& what, double eigenvalue)
      : Error(what), eigenvalue_(eigenvalue) {}
  double eigenvalue() const { return eigenvalue_; }

 private:
  double eigenvalue_;
};

/// Amplitude encoding of an all-zero vector, or post-selection on an outcome
/// of vanishing probability.
class ZeroScaleError : public Error {
 public:
  using Error::Error;
};

/// Malformed configuration; line is 0 when the problem is not tied to a file line.
class ConfigError : public Error {
 public:
  ConfigError(const std::string& what, int line = 0)
      : Error(line > 0 ? "line " + std::to_string(line) + ": " + what : what), line_(line) {}
  int line() const { return line_; }

 private:
  int line_;
};

}  // namespace clbm

#endif  // CLBM_ERRORS_HPP
