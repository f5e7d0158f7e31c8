#include "ombudsman/corpus/post.hpp"

#include <unordered_set>

#include "ombudsman/error.hpp"
#include "ombudsman/jsonl.hpp"

namespace ombudsman::corpus {

std::string_view to_string(Platform p) {
  switch (p) {
    case Platform::kReddit: return "reddit";
    case Platform::kYoutube: return "youtube";
  }
  return "reddit";
}

std::string_view to_string(Partition p) {
  switch (p) {
    case Partition::kRedditMain: return "reddit_main";
    case Partition::kYtPolitics: return "yt_politics";
    case Partition::kYtTargeted: return "yt_targeted";
    case Partition::kInTheWild: return "in_the_wild";
    case Partition::kUnassigned: return "unassigned";
  }
  return "unassigned";
}

Platform parse_platform(std::string_view s) {
  if (s == "reddit") return Platform::kReddit;
  if (s == "youtube") return Platform::kYoutube;
  throw Error(ErrorCode::kInvalidArgument, "unknown platform '" + std::string(s) + "'");
}

Partition parse_partition(std::string_view s) {
  for (auto p : kAllPartitions) {
    if (to_string(p) == s) return p;
  }
  throw Error(ErrorCode::kInvalidArgument, "unknown partition '" + std::string(s) + "'");
}

namespace {

nlohmann::json optional_string(const std::optional<std::string>& s) {
  return s ? nlohmann::json(*s) : nlohmann::json(nullptr);
}

std::optional<std::string> read_optional(const nlohmann::json& j, const char* key) {
  auto it = j.find(key);
  if (it == j.end() || it->is_null()) return std::nullopt;
  return it->get<std::string>();
}

}  // namespace

void to_json(nlohmann::json& j, const Post& p) {
  j = nlohmann::json{
      {"post_id", p.post_id},
      {"platform", to_string(p.platform)},
      {"container_id", p.container_id},
      {"container_title", optional_string(p.container_title)},
      {"container_description", optional_string(p.container_description)},
      {"author_hash", p.author_hash},
      {"created_at", format_utc(p.created_at)},
      {"text", p.text},
      {"partition", to_string(p.partition)},
      {"matched_keywords", p.matched_keywords},
  };
}

void from_json(const nlohmann::json& j, Post& p) {
  try {
    p.post_id = j.at("post_id").get<std::string>();
    p.platform = parse_platform(j.at("platform").get<std::string>());
    p.container_id = j.value("container_id", std::string{});
    p.container_title = read_optional(j, "container_title");
    p.container_description = read_optional(j, "container_description");
    p.author_hash = j.value("author_hash", std::string{});
    p.created_at = parse_timestamp(j.at("created_at").get<std::string>());
    p.text = j.at("text").get<std::string>();
    p.partition = parse_partition(j.value("partition", std::string{"unassigned"}));
    p.matched_keywords = j.value("matched_keywords", std::vector<std::string>{});
  } catch (const nlohmann::json::exception& ex) {
    throw Error(ErrorCode::kParse, std::string("malformed post record: ") + ex.what());
  }
}

std::vector<Post> load_corpus(const std::filesystem::path& path) {
  std::vector<Post> posts;
  for (const auto& row : read_jsonl(path)) posts.push_back(row.get<Post>());
  return posts;
}

void save_corpus(const std::filesystem::path& path, const std::vector<Post>& posts) {
  std::vector<nlohmann::json> rows(posts.begin(), posts.end());
  write_jsonl(path, rows);
}

std::size_t append_new_posts(const std::filesystem::path& path, const std::vector<Post>& posts) {
  std::unordered_set<std::string> seen;
  if (std::filesystem::exists(path)) {
    for (const auto& row : read_jsonl(path)) seen.insert(row.at("post_id").get<std::string>());
  }
  std::vector<nlohmann::json> fresh;
  for (const auto& p : posts) {
    if (seen.insert(p.post_id).second) fresh.emplace_back(p);
  }
  if (!fresh.empty()) append_jsonl(path, fresh);
  return fresh.size();
}

}  // namespace ombudsman::corpus
