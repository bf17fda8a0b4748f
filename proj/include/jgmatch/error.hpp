#pragma once

#include <stdexcept>
#include <string>

namespace jgmatch {

enum class ErrorKind {
  Usage,
  Io,
  Format,
  Truncation,
  Validation,
  Dimension,
  Parameter,
  Capacity,
  Insufficient,
  Degenerate,
  Numerical,
  PointAtInfinity,
};

/// Base exception for every failure raised by the library. The kind selects
/// the process exit code used by the command-line driver.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

const char* to_string(ErrorKind kind) noexcept;

/// 0 success; 1 usage; 2 I/O; 3 validation/dimension; 4 numerical/degeneracy;
/// 5 too few correspondences.
int exit_code(ErrorKind kind) noexcept;

}  // namespace jgmatch
