#pragma once

#include <stdexcept>
#include <string>

namespace heterolab {

// Process exit codes used by the command line tool.
enum class ExitCode : int {
  kOk = 0,
  kValidation = 2,
  kIo = 3,
  kNumerical = 4,
};

class Error : public std::runtime_error {
 public:
  Error(ExitCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}
  ExitCode code() const noexcept { return code_; }

 private:
  ExitCode code_;
};

// Bad input: out-of-range ids, malformed parameters, inconsistent shapes.
class ValidationError : public Error {
 public:
  explicit ValidationError(const std::string& what)
      : Error(ExitCode::kValidation, what) {}
};

class IoError : public Error {
 public:
  explicit IoError(const std::string& what) : Error(ExitCode::kIo, what) {}
};

// NaN losses, bound violations found in self-check mode.
class NumericalError : public Error {
 public:
  explicit NumericalError(const std::string& what)
      : Error(ExitCode::kNumerical, what) {}
};

}  // namespace heterolab
