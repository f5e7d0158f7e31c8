#pragma once

#include <string>
#include <string_view>

#include <nlohmann/json_fwd.hpp>

namespace ombudsman {

// Lowercase hex SHA-256 digest.
std::string sha256_hex(std::string_view data);

// SHA-256 of the canonical (sorted-key, compact) serialization.
std::string json_hash(const nlohmann::json& value);

// SHA-256 of a file's bytes; throws Error(kIo) if unreadable.
std::string file_hash(const std::string& path);

// First `n` hex characters of a digest; used for short identifiers.
inline std::string short_hash(const std::string& digest, std::size_t n = 16) {
  return digest.substr(0, n);
}

}  // namespace ombudsman
