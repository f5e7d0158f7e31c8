#include "ombudsman/corpus/dedupe.hpp"

#include <unordered_map>

#include "ombudsman/hashing.hpp"
#include "ombudsman/text.hpp"

namespace ombudsman::corpus {

void to_json(nlohmann::json& j, const DedupeReport& r) {
  auto dropped = nlohmann::json::array();
  for (const auto& d : r.dropped) dropped.push_back({{"post_id", d.post_id}, {"kept", d.kept_post_id}});
  j = nlohmann::json{{"dropped", dropped}, {"dropped_count", r.dropped.size()}};
}

std::string duplicate_key(const Post& post) {
  return std::string(to_string(post.platform)) + ":" +
         sha256_hex(text::collapse_whitespace(text::casefold(post.text)));
}

DedupeResult dedupe(const std::vector<Post>& posts) {
  std::unordered_map<std::string, std::size_t> winner;
  std::vector<std::string> keys;
  keys.reserve(posts.size());
  for (std::size_t i = 0; i < posts.size(); ++i) {
    keys.push_back(duplicate_key(posts[i]));
    auto [it, inserted] = winner.emplace(keys.back(), i);
    if (inserted) continue;
    const Post& best = posts[it->second];
    const Post& cand = posts[i];
    if (cand.created_at < best.created_at ||
        (cand.created_at == best.created_at && cand.post_id < best.post_id)) {
      it->second = i;
    }
  }

  DedupeResult result;
  for (std::size_t i = 0; i < posts.size(); ++i) {
    std::size_t w = winner.at(keys[i]);
    if (w == i) {
      result.posts.push_back(posts[i]);
    } else {
      result.report.dropped.push_back({posts[i].post_id, posts[w].post_id});
    }
  }
  return result;
}

}  // namespace ombudsman::corpus
