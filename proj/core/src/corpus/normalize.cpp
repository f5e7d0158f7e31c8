#include "ombudsman/corpus/normalize.hpp"

#include "ombudsman/error.hpp"
#include "ombudsman/hashing.hpp"
#include "ombudsman/text.hpp"

namespace ombudsman::corpus {

std::string_view to_string(RejectReason r) {
  switch (r) {
    case RejectReason::kMissingId: return "missing_id";
    case RejectReason::kEmptyBody: return "empty_body";
    case RejectReason::kBadTimestamp: return "bad_timestamp";
  }
  return "unknown";
}

std::string make_post_id(Platform platform, std::string_view raw_id) {
  return std::string(platform == Platform::kReddit ? "rd:" : "yt:") + std::string(raw_id);
}

std::string hash_author(std::string_view author, std::string_view salt) {
  std::string material(salt);
  material.push_back('\x1f');
  material.append(author);
  return sha256_hex(material);
}

std::string normalize_text(std::string_view s) {
  std::string t = text::nfc(text::strip_controls(s));
  auto first = t.find_first_not_of(" \t\n");
  if (first == std::string::npos) return {};
  auto last = t.find_last_not_of(" \t\n");
  return t.substr(first, last - first + 1);
}

namespace {

std::optional<std::string> normalize_optional(const std::optional<std::string>& s) {
  if (!s) return std::nullopt;
  auto n = normalize_text(*s);
  if (n.empty()) return std::nullopt;
  return n;
}

}  // namespace

NormalizeResult normalize(const RawRecord& record, Partition partition, std::string_view author_salt) {
  if (record.id.empty()) return Rejection{RejectReason::kMissingId, "", "record has no id"};

  Post post;
  post.post_id = make_post_id(record.platform, record.id);
  post.text = normalize_text(record.body);
  if (post.text.empty() || text::is_blank(post.text)) {
    return Rejection{RejectReason::kEmptyBody, post.post_id, "body empty after normalization"};
  }
  try {
    post.created_at = parse_timestamp(record.created_at);
  } catch (const Error& e) {
    return Rejection{RejectReason::kBadTimestamp, post.post_id, e.what()};
  }
  post.platform = record.platform;
  post.container_id = record.container_id;
  post.container_title = normalize_optional(record.container_title);
  post.container_description = normalize_optional(record.container_description);
  post.author_hash = hash_author(record.author, author_salt);
  post.partition = partition;
  return post;
}

RawRecord raw_record_from_json(const nlohmann::json& j, Platform platform) {
  auto opt = [&](const char* key) -> std::optional<std::string> {
    auto it = j.find(key);
    if (it == j.end() || it->is_null()) return std::nullopt;
    return it->get<std::string>();
  };
  RawRecord r;
  r.platform = platform;
  if (auto it = j.find("platform"); it != j.end() && it->is_string()) {
    r.platform = parse_platform(it->get<std::string>());
  }
  r.id = j.at("id").is_string() ? j.at("id").get<std::string>() : j.at("id").dump();
  r.container_id = j.value("container_id", std::string{});
  r.container_title = opt("container_title");
  r.container_description = opt("container_description");
  r.author = j.value("author", std::string{});
  const auto& ts = j.at("created_at");
  r.created_at = ts.is_string() ? ts.get<std::string>() : ts.dump();
  r.body = j.at("text").get<std::string>();
  return r;
}

nlohmann::json raw_record_to_json(const RawRecord& r) {
  nlohmann::json j{{"platform", to_string(r.platform)},
                   {"id", r.id},
                   {"container_id", r.container_id},
                   {"author", r.author},
                   {"created_at", r.created_at},
                   {"text", r.body}};
  j["container_title"] = r.container_title ? nlohmann::json(*r.container_title) : nlohmann::json(nullptr);
  j["container_description"] =
      r.container_description ? nlohmann::json(*r.container_description) : nlohmann::json(nullptr);
  return j;
}

}  // namespace ombudsman::corpus
