#pragma once

#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace ombudsman {

enum class ErrorCode {
  kConfig,
  kInvalidArgument,
  kRetriable,
  kParse,
  kPartialResult,
  kNotFound,
  kConflict,
  kBackend,
  kIo,
  kMissingArtifact,
};

std::string_view to_string(ErrorCode code);

// Base error for everything the library throws. `details` carries
// machine-readable items (missing ids, violated constraints, ...).
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message,
        std::vector<std::string> details = {})
      : std::runtime_error(message), code_(code), details_(std::move(details)) {}

  ErrorCode code() const noexcept { return code_; }
  const std::vector<std::string>& details() const noexcept { return details_; }

 private:
  ErrorCode code_;
  std::vector<std::string> details_;
};

inline Error config_error(const std::string& msg, std::vector<std::string> details = {}) {
  return Error(ErrorCode::kConfig, msg, std::move(details));
}

}  // namespace ombudsman
