#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace patred {

enum class ErrorCode {
  kInvalidArgument,
  kFileNotFound,
  kMissingColumn,
  kParse,
  kTooShort,
  kCapability,   // metric cannot be combined with the requested mode/redundancy
  kDegenerate,   // comparison is undefined (zero variance, zero entropy, zero vector)
  kNotFound,
  kTooLarge,
  kIo,
};

std::string_view to_string(ErrorCode code);

// Every library failure is reported through this one exception type; callers
// branch on code() (CLI exit status, HTTP status).
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

  // Input-validation failures as opposed to runtime/environment failures.
  bool is_validation() const noexcept {
    return code_ != ErrorCode::kIo && code_ != ErrorCode::kDegenerate;
  }

 private:
  ErrorCode code_;
};

}  // namespace patred
