#pragma once

#include <stdexcept>
#include <string>

namespace ppii {

enum class ErrorCode {
  InvalidInput = 1,
  CapExceeded,
  DegenerateDistribution,
  UndefinedMetric,
  NoInputs,
  Io,
  Internal,
};

const char* to_string(ErrorCode code) noexcept;

// All core failures are reported through this type; the C API maps the code
// onto its status enum and keeps what() as the message.
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

}  // namespace ppii
