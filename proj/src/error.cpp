#include "jgmatch/error.hpp"

namespace jgmatch {

const char* to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::Usage: return "usage";
    case ErrorKind::Io: return "io";
    case ErrorKind::Format: return "format";
    case ErrorKind::Truncation: return "truncation";
    case ErrorKind::Validation: return "validation";
    case ErrorKind::Dimension: return "dimension";
    case ErrorKind::Parameter: return "parameter";
    case ErrorKind::Capacity: return "capacity";
    case ErrorKind::Insufficient: return "insufficient";
    case ErrorKind::Degenerate: return "degenerate";
    case ErrorKind::Numerical: return "numerical";
    case ErrorKind::PointAtInfinity: return "point_at_infinity";
  }
  return "unknown";
}

int exit_code(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::Usage:
    case ErrorKind::Parameter:
      return 1;
    case ErrorKind::Io:
      return 2;
    case ErrorKind::Format:
    case ErrorKind::Truncation:
    case ErrorKind::Validation:
    case ErrorKind::Dimension:
    case ErrorKind::Capacity:
      return 3;
    case ErrorKind::Degenerate:
    case ErrorKind::Numerical:
    case ErrorKind::PointAtInfinity:
      return 4;
    case ErrorKind::Insufficient:
      return 5;
  }
  return 1;
}

}  // namespace jgmatch
