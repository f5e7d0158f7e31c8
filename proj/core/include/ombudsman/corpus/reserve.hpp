#pragma once

#include <cstdint>
#include <vector>

#include "ombudsman/corpus/post.hpp"

namespace ombudsman::corpus {

struct ReserveResult {
  std::vector<Post> main;
  std::vector<Post> wild;
};

// Moves a uniform sample of `n` posts from the eligible pool
// (reddit_main and yt_targeted) into the in_the_wild partition. The pool is
// ordered by post_id before sampling, so the result depends only on the set
// of posts and the seed. Throws Error(kInvalidArgument) naming the pool size
// when n exceeds it.
ReserveResult reserve_wild(const std::vector<Post>& corpus, std::size_t n, std::uint64_t seed);

}  // namespace ombudsman::corpus
