#include "patred/error.hpp"

namespace patred {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidArgument: return "invalid_argument";
    case ErrorCode::kFileNotFound: return "file_not_found";
    case ErrorCode::kMissingColumn: return "missing_column";
    case ErrorCode::kParse: return "parse_error";
    case ErrorCode::kTooShort: return "too_short";
    case ErrorCode::kCapability: return "capability_error";
    case ErrorCode::kDegenerate: return "degenerate_comparison";
    case ErrorCode::kNotFound: return "not_found";
    case ErrorCode::kTooLarge: return "too_large";
    case ErrorCode::kIo: return "io_error";
  }
  return "unknown";
}

}  // namespace patred
