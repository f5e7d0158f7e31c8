#pragma once

#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

namespace ombudsman {

// SplitMix64. Chosen over <random> distributions because their output is
// not specified across standard libraries; every sampled partition, split
// and audit must reproduce bit-for-bit from a seed on any platform.
class SeededRng {
 public:
  explicit SeededRng(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next() {
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  // Uniform integer in [0, bound) by rejection; bound must be > 0.
  std::uint64_t uniform_below(std::uint64_t bound);

  // Uniform real in [0, 1) from the top 53 bits.
  double uniform_unit() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

 private:
  std::uint64_t state_;
};

// Named sub-seed: every stage draws from derive_seed(global, "stage-name").
std::uint64_t derive_seed(std::uint64_t global_seed, std::string_view name);

// Indices of a uniform sample of `k` out of `n` without replacement, in draw
// order (partial Fisher-Yates over 0..n-1). Requires k <= n.
std::vector<std::size_t> sample_indices(std::size_t n, std::size_t k, SeededRng& rng);

template <typename T>
void shuffle_in_place(std::span<T> items, SeededRng& rng) {
  for (std::size_t i = 0; i + 1 < items.size(); ++i) {
    auto j = i + static_cast<std::size_t>(rng.uniform_below(items.size() - i));
    std::swap(items[i], items[j]);
  }
}

}  // namespace ombudsman
