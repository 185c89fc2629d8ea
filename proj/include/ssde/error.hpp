#pragma once

#include <stdexcept>
#include <string>

namespace ssde {

enum class ErrorKind {
  Domain,        // point outside the truncated box
  Parameter,     // invalid argument (bad exponent, scale, shape)
  Data,          // non-finite or malformed data
  Precondition,  // mathematical precondition violated (e.g. 1/q + d/p >= 1)
  Ellipticity,   // diffusion not uniformly nondegenerate
  Solver,        // linear solver did not reach its tolerance
  Calibration,   // lambda scan hit its cap
  Simulation,    // non-finite state in a path
  Config,        // configuration file problems
  Io             // file input/output
};

const char* to_string(ErrorKind kind);

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}
  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

class CalibrationError : public Error {
 public:
  CalibrationError(const std::string& what, double achieved_norm, double last_lambda)
      : Error(ErrorKind::Calibration, what),
        achieved_norm_(achieved_norm),
        last_lambda_(last_lambda) {}
  double achieved_norm() const noexcept { return achieved_norm_; }
  double last_lambda() const noexcept { return last_lambda_; }

 private:
  double achieved_norm_;
  double last_lambda_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& what) {
  throw Error(kind, what);
}

inline void require(bool condition, ErrorKind kind, const std::string& what) {
  if (!condition) fail(kind, what);
}

}  // namespace ssde
