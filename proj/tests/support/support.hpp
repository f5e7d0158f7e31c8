#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "ombudsman/corpus/post.hpp"
#include "ombudsman/random.hpp"

namespace ombudsman::test {

std::filesystem::path data_dir();
std::filesystem::path fixtures_dir();
// Path of the built ombudsman executable.
std::filesystem::path cli_path();

// Removed with its contents on destruction.
class TempDir {
 public:
  explicit TempDir(std::string_view tag = "t");
  ~TempDir();
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;
  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& rel) const { return path_ / rel; }

 private:
  std::filesystem::path path_;
};

// Small helpers over SeededRng for hand-rolled property generators.
class Gen {
 public:
  explicit Gen(std::uint64_t seed) : rng_(seed) {}
  std::size_t below(std::size_t n) { return static_cast<std::size_t>(rng_.uniform_below(n)); }
  std::size_t range(std::size_t lo, std::size_t hi) { return lo + below(hi - lo + 1); }
  bool chance(double p) { return rng_.uniform_unit() < p; }
  template <typename T>
  const T& pick(const std::vector<T>& v) {
    return v[below(v.size())];
  }
  SeededRng& rng() { return rng_; }

 private:
  SeededRng rng_;
};

// Random ASCII re-casing.
std::string flip_case(std::string_view s, Gen& g);

// Posts built from infrastructure vocabulary, keywords in random case,
// gazetteer cities, future-tense cues, filler and the mock sentinels.
std::vector<corpus::Post> generate_posts(std::size_t n, std::uint64_t seed);

// Text with location mentions (some adjacent), literal mask tokens,
// non-ASCII words and punctuation.
std::string generate_masking_text(Gen& g);

corpus::Post make_post(std::string id, std::string text,
                       corpus::Partition partition = corpus::Partition::kRedditMain,
                       corpus::Platform platform = corpus::Platform::kReddit);

std::string run_command(const std::string& command, int& exit_code);

}  // namespace ombudsman::test
