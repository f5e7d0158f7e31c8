#pragma once

#include <string>
#include <vector>

#include "ombudsman/corpus/post.hpp"
#include "ombudsman/random.hpp"

namespace ombudsman::bench {

// Synthetic comments mixing filler, infrastructure words, places and incident keywords.
inline std::vector<corpus::Post> make_posts(std::size_t n, std::uint64_t seed) {
  static const std::vector<std::string> kWords = {
      "the",   "bridge", "will",   "collapse", "Pittsburgh", "road",     "soon",  "Ohio",   "cracked",
      "train", "derailment", "near", "my",     "house",      "Lake Erie", "lol",  "rusted", "infrastructure",
      "going to", "is next", "Cincinnati", "people", "say", "tunnel"};
  SeededRng rng(seed);
  std::vector<corpus::Post> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    corpus::Post p;
    p.post_id = "rd:b" + std::to_string(i);
    p.platform = corpus::Platform::kReddit;
    p.partition = corpus::Partition::kRedditMain;
    p.container_id = "c";
    auto len = 5 + rng.uniform_below(30);
    for (std::uint64_t w = 0; w < len; ++w) {
      if (!p.text.empty()) p.text += ' ';
      p.text += kWords[rng.uniform_below(kWords.size())];
    }
    out.push_back(std::move(p));
  }
  return out;
}

}  // namespace ombudsman::bench
