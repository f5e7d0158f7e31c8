#include "ombudsman/corpus/reserve.hpp"

#include <algorithm>
#include <unordered_set>

#include "ombudsman/error.hpp"
#include "ombudsman/random.hpp"

namespace ombudsman::corpus {

ReserveResult reserve_wild(const std::vector<Post>& corpus, std::size_t n, std::uint64_t seed) {
  std::vector<std::string> pool;
  for (const auto& p : corpus) {
    if (p.partition == Partition::kRedditMain || p.partition == Partition::kYtTargeted) {
      pool.push_back(p.post_id);
    }
  }
  if (n > pool.size()) {
    throw Error(ErrorCode::kInvalidArgument,
                "cannot reserve " + std::to_string(n) + " posts: eligible pool has " +
                    std::to_string(pool.size()),
                {"pool_size=" + std::to_string(pool.size())});
  }
  std::sort(pool.begin(), pool.end());

  SeededRng rng(seed);
  std::unordered_set<std::string> chosen;
  for (auto idx : sample_indices(pool.size(), n, rng)) chosen.insert(pool[idx]);

  ReserveResult out;
  for (const auto& p : corpus) {
    if (chosen.contains(p.post_id)) {
      Post w = p;
      w.partition = Partition::kInTheWild;
      out.wild.push_back(std::move(w));
    } else {
      out.main.push_back(p);
    }
  }
  return out;
}

}  // namespace ombudsman::corpus
