#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "ombudsman/timestamp.hpp"

namespace ombudsman::corpus {

enum class Platform { kReddit, kYoutube };

enum class Partition { kRedditMain, kYtPolitics, kYtTargeted, kInTheWild, kUnassigned };

std::string_view to_string(Platform p);
std::string_view to_string(Partition p);
Platform parse_platform(std::string_view s);
Partition parse_partition(std::string_view s);

// All partitions in report order.
inline constexpr Partition kAllPartitions[] = {Partition::kRedditMain, Partition::kYtPolitics,
                                               Partition::kYtTargeted, Partition::kInTheWild,
                                               Partition::kUnassigned};

struct Post {
  std::string post_id;
  Platform platform = Platform::kReddit;
  std::string container_id;
  std::optional<std::string> container_title;
  std::optional<std::string> container_description;
  std::string author_hash;
  UtcSeconds created_at{};
  std::string text;
  Partition partition = Partition::kUnassigned;
  std::vector<std::string> matched_keywords;

  bool operator==(const Post&) const = default;
};

void to_json(nlohmann::json& j, const Post& p);
void from_json(const nlohmann::json& j, Post& p);

// JSONL corpus file, one Post per line.
std::vector<Post> load_corpus(const std::filesystem::path& path);
void save_corpus(const std::filesystem::path& path, const std::vector<Post>& posts);

// Appends posts whose id is not already present in the file (or earlier in
// `posts`). Returns the number written.
std::size_t append_new_posts(const std::filesystem::path& path, const std::vector<Post>& posts);

}  // namespace ombudsman::corpus
