#pragma once

#include <stdexcept>
#include <string>

namespace qaccess {

enum class ErrorKind {
  InvalidDimension,
  Shape,
  InvalidState,
  DegenerateFrame,
  WalkFailure,
  InsufficientPoints,
  ExperimentFailure,
  Fit,
  Validation,
  Usage,
  File,
};

const char* to_string(ErrorKind kind) noexcept;

// Single exception type for the library; callers branch on kind().
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace qaccess
