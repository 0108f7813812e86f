#include "jcpot/error.hpp"

namespace jcpot {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kInvalidInput:
      return "invalid-input";
    case ErrorKind::kInvalidParameter:
      return "invalid-parameter";
    case ErrorKind::kNumericalUnderflow:
      return "numerical-underflow";
    case ErrorKind::kDegenerateKernel:
      return "degenerate-kernel";
    case ErrorKind::kDegenerateMass:
      return "degenerate-mass";
    case ErrorKind::kMissingClass:
      return "missing-class";
    case ErrorKind::kParse:
      return "parse-error";
  }
  return "unknown";
}

void fail(ErrorKind kind, const std::string& message) {
  throw Error(kind, message);
}

}  // namespace jcpot
