#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace jcpot {

enum class ErrorKind {
  kInvalidInput,
  kInvalidParameter,
  kNumericalUnderflow,
  kDegenerateKernel,
  kDegenerateMass,
  kMissingClass,
  kParse,
};

std::string_view to_string(ErrorKind kind);

// All library failures are reported through this type; `kind()` drives the
// CLI exit code mapping.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(message), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] void fail(ErrorKind kind, const std::string& message);

}  // namespace jcpot
