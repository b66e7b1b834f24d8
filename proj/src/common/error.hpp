#pragma once

#include <stdexcept>
#include <string>

namespace photoart {

// Numeric values double as CLI exit codes and C API status codes.
enum class ErrorCode : int {
  kInvalidArgument = 1,
  kValidation = 2,
  kIo = 3,
  kBackend = 4,
  kDivergence = 5,
  kParse = 6,
  kWrongStage = 7,
  kNotFound = 8,
  kMalformedOutput = 9,
  kInternal = 10,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& message) {
  throw Error(code, message);
}

}  // namespace photoart
