#pragma once

#include <stdexcept>
#include <string>

namespace vvl {

// Numeric values are shared with the C API status codes and the CLI exit codes.
enum class ErrorCode : int {
  kConfig = 2,
  kBlowUp = 3,
  kIo = 4,
  kInvalidArgument = 5,
  kGeometry = 6,
  kCflViolation = 7,
  kNonFinite = 8,
  kNegativeDensity = 9,
  kSupport = 10,
  kMismatch = 11,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what) : std::runtime_error(what), code_(code) {}
  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& what) { throw Error(code, what); }

inline void require(bool cond, ErrorCode code, const std::string& what) {
  if (!cond) fail(code, what);
}

}  // namespace vvl
