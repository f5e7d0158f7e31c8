#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <variant>

#include <nlohmann/json.hpp>

#include "ombudsman/corpus/post.hpp"

namespace ombudsman::corpus {

// A platform record as fetched, before normalization. Archive dumps store
// records in this shape (see raw_record_from_json).
struct RawRecord {
  Platform platform = Platform::kReddit;
  std::string id;
  std::string container_id;
  std::optional<std::string> container_title;
  std::optional<std::string> container_description;
  std::string author;
  std::string created_at;
  std::string body;
};

RawRecord raw_record_from_json(const nlohmann::json& j, Platform platform);
nlohmann::json raw_record_to_json(const RawRecord& r);

enum class RejectReason { kMissingId, kEmptyBody, kBadTimestamp };

std::string_view to_string(RejectReason r);

struct Rejection {
  RejectReason reason;
  std::string record_id;
  std::string detail;
};

using NormalizeResult = std::variant<Post, Rejection>;

// Pure: identical (record, partition, salt) gives a byte-identical Post.
NormalizeResult normalize(const RawRecord& record, Partition partition, std::string_view author_salt);

// Opaque ids are namespaced by platform: "rd:<id>" / "yt:<id>".
std::string make_post_id(Platform platform, std::string_view raw_id);

std::string hash_author(std::string_view author, std::string_view salt);

// Text normalization applied to bodies and titles.
std::string normalize_text(std::string_view s);

}  // namespace ombudsman::corpus
