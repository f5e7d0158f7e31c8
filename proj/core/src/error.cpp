#include "ombudsman/error.hpp"

namespace ombudsman {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::kConfig: return "config";
    case ErrorCode::kInvalidArgument: return "invalid_argument";
    case ErrorCode::kRetriable: return "retriable";
    case ErrorCode::kParse: return "parse";
    case ErrorCode::kPartialResult: return "partial_result";
    case ErrorCode::kNotFound: return "not_found";
    case ErrorCode::kConflict: return "conflict";
    case ErrorCode::kBackend: return "backend";
    case ErrorCode::kIo: return "io";
    case ErrorCode::kMissingArtifact: return "missing_artifact";
  }
  return "unknown";
}

}  // namespace ombudsman
