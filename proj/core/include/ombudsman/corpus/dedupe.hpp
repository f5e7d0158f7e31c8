#pragma once

#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "ombudsman/corpus/post.hpp"

namespace ombudsman::corpus {

struct DroppedDuplicate {
  std::string post_id;
  std::string kept_post_id;
};

struct DedupeReport {
  std::vector<DroppedDuplicate> dropped;
};

void to_json(nlohmann::json& j, const DedupeReport& r);

struct DedupeResult {
  std::vector<Post> posts;
  DedupeReport report;
};

// Key: platform + SHA-256 of the casefolded, whitespace-collapsed text.
std::string duplicate_key(const Post& post);

// Keeps one post per key: the earliest created_at, ties broken by the
// smaller post_id. Survivors keep their input order.
DedupeResult dedupe(const std::vector<Post>& posts);

}  // namespace ombudsman::corpus
