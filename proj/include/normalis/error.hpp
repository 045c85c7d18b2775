#pragma once

#include <stdexcept>
#include <string>

namespace normalis {

/// Failure categories; the CLI maps them onto process exit codes.
enum class ErrorKind {
  Input,        // malformed or out-of-domain input (exit 2)
  Precision,    // precision/iteration cap reached (exit 3)
  Statistical,  // a declared statistical check failed (exit 4)
  Internal,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

class InputError : public Error {
 public:
  explicit InputError(const std::string& what) : Error(ErrorKind::Input, what) {}
};

class PrecisionError : public Error {
 public:
  explicit PrecisionError(const std::string& what)
      : Error(ErrorKind::Precision, what) {}
};

class StatisticalFailure : public Error {
 public:
  explicit StatisticalFailure(const std::string& what)
      : Error(ErrorKind::Statistical, what) {}
};

int exit_code_for(ErrorKind kind) noexcept;

}  // namespace normalis
