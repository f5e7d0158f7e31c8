#include "ombudsman/random.hpp"

#include <numeric>

#include "ombudsman/error.hpp"

namespace ombudsman {

std::uint64_t SeededRng::uniform_below(std::uint64_t bound) {
  if (bound == 0) throw Error(ErrorCode::kInvalidArgument, "uniform_below(0)");
  // Reject the low (2^64 mod bound) values so the remainder is unbiased.
  const std::uint64_t threshold = (0 - bound) % bound;
  for (;;) {
    std::uint64_t r = next();
    if (r >= threshold) return r % bound;
  }
}

std::uint64_t derive_seed(std::uint64_t global_seed, std::string_view name) {
  std::uint64_t h = 0xcbf29ce484222325ULL;  // FNV-1a
  for (unsigned char c : name) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  SeededRng mix(global_seed ^ h);
  return mix.next();
}

std::vector<std::size_t> sample_indices(std::size_t n, std::size_t k, SeededRng& rng) {
  if (k > n) throw Error(ErrorCode::kInvalidArgument, "sample size exceeds population");
  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  for (std::size_t i = 0; i < k; ++i) {
    auto j = i + static_cast<std::size_t>(rng.uniform_below(n - i));
    std::swap(idx[i], idx[j]);
  }
  idx.resize(k);
  return idx;
}

}  // namespace ombudsman
