#pragma once

#include <stdexcept>
#include <string>

namespace torspec {

// Failure categories surfaced by the library. The numeric values are part of
// the C API (see torspec.h) and must stay in sync with TSP_ERR_*.
enum class ErrorKind : int {
  InvalidArgument = 1,
  DegenerateMinimum = 2,
  EmptyShell = 3,
  ConvergenceFailure = 4,
  TruncationTooSmall = 5,
  RegionViolatesHypotheses = 6,
  DimensionCapExceeded = 7,
  ConfigError = 8,
  IoError = 9,
  MissingInput = 10,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

const char* errorKindName(ErrorKind kind) noexcept;

[[noreturn]] inline void fail(ErrorKind kind, const std::string& what) {
  throw Error(kind, what);
}

}  // namespace torspec
