#include <gtest/gtest.h>

#include <set>

#include "ombudsman/error.hpp"
#include "ombudsman/hashing.hpp"
#include "ombudsman/jsonl.hpp"
#include "ombudsman/random.hpp"
#include "ombudsman/text.hpp"
#include "ombudsman/timestamp.hpp"
#include "support.hpp"

using namespace ombudsman;

TEST(Hashing, Sha256KnownVector) {
  EXPECT_EQ(sha256_hex("abc"), "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
  EXPECT_EQ(sha256_hex(""), "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
}

TEST(Hashing, JsonHashIgnoresKeyOrder) {
  auto a = nlohmann::json::parse(R"({"b": 1, "a": [1, 2]})");
  auto b = nlohmann::json::parse(R"({"a": [1, 2], "b": 1})");
  EXPECT_EQ(json_hash(a), json_hash(b));
  EXPECT_NE(json_hash(a), json_hash(nlohmann::json::parse(R"({"a": [2, 1], "b": 1})")));
}

TEST(Random, SplitMixReferenceSequence) {
  // Reference outputs of SplitMix64 seeded with 0.
  SeededRng rng(0);
  EXPECT_EQ(rng.next(), 0xe220a8397b1dcdafULL);
  EXPECT_EQ(rng.next(), 0x6e789e6aa1b965f4ULL);
  EXPECT_EQ(rng.next(), 0x06c45d188009454fULL);
}

TEST(Random, UniformBelowStaysInRange) {
  SeededRng rng(7);
  std::set<std::uint64_t> seen;
  for (int i = 0; i < 2000; ++i) {
    auto v = rng.uniform_below(6);
    ASSERT_LT(v, 6u);
    seen.insert(v);
  }
  EXPECT_EQ(seen.size(), 6u);
}

TEST(Random, SampleIndicesDistinctAndDeterministic) {
  SeededRng a(99), b(99);
  auto x = sample_indices(50, 20, a);
  auto y = sample_indices(50, 20, b);
  EXPECT_EQ(x, y);
  EXPECT_EQ(std::set<std::size_t>(x.begin(), x.end()).size(), 20u);
  for (auto i : x) EXPECT_LT(i, 50u);
}

TEST(Random, DerivedSeedsDifferByName) {
  EXPECT_NE(derive_seed(1, "ingest"), derive_seed(1, "train"));
  EXPECT_EQ(derive_seed(1, "scan"), derive_seed(1, "scan"));
  EXPECT_NE(derive_seed(1, "scan"), derive_seed(2, "scan"));
}

TEST(Text, CasefoldHandlesFullFolding) {
  EXPECT_EQ(text::casefold("STRASSE"), text::casefold("straße"));
  EXPECT_EQ(text::casefold("Fern Hollow"), "fern hollow");
}

TEST(Text, CollapseWhitespaceAndControls) {
  EXPECT_EQ(text::collapse_whitespace("  a \t\n b  c  "), "a b c");
  EXPECT_EQ(text::strip_controls("a\r\nb\rc\x01" "d\te"), "a\nb\ncd\te");
  EXPECT_TRUE(text::is_blank(" \t\n"));
  EXPECT_FALSE(text::is_blank(" x "));
}

TEST(Text, CodepointOffsets) {
  std::string s = "café 🚧 ok";
  EXPECT_EQ(text::codepoint_length(s), 9u);
  EXPECT_EQ(text::slice(s, 5, 6), "🚧");
  EXPECT_EQ(text::codepoint_offset(s, text::byte_offset(s, 7)), 7u);
  EXPECT_EQ(text::byte_offset(s, 9), s.size());
}

TEST(Text, NfcComposes) { EXPECT_EQ(text::nfc("é"), "é"); }

TEST(Timestamp, ParsesIsoAndEpoch) {
  auto t = parse_timestamp("2022-01-28T10:39:00Z");
  EXPECT_EQ(format_utc(t), "2022-01-28T10:39:00Z");
  EXPECT_EQ(parse_timestamp("1643366340"), t);
  EXPECT_EQ(parse_timestamp("2022-01-28T05:39:00.750-05:00"), t);
  EXPECT_EQ(parse_timestamp("2022-01-28T10:39:00"), t);
}

TEST(Timestamp, RejectsGarbage) {
  try {
    parse_timestamp("yesterday");
    FAIL() << "expected a parse error";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kParse);
  }
}

TEST(Jsonl, RoundTripAndBadLines) {
  test::TempDir dir;
  auto path = dir / "rows.jsonl";
  write_jsonl(path, {{{"a", 1}}, {{"a", 2}}});
  append_jsonl(path, {{{"a", 3}}});
  auto rows = read_jsonl(path);
  ASSERT_EQ(rows.size(), 3u);
  EXPECT_EQ(rows[2]["a"], 3);

  write_text_file(path, "{\"a\": 1}\nnot json\n\n{\"a\": 2}\n");
  std::vector<std::size_t> bad;
  rows = read_jsonl(path, [&](std::size_t line, const std::string&) { bad.push_back(line); });
  EXPECT_EQ(rows.size(), 2u);
  EXPECT_EQ(bad, std::vector<std::size_t>{2});
  EXPECT_THROW(read_jsonl(path), Error);
}

TEST(Errors, CodeNames) {
  EXPECT_EQ(to_string(ErrorCode::kMissingArtifact), "missing_artifact");
  EXPECT_EQ(to_string(ErrorCode::kPartialResult), "partial_result");
  EXPECT_EQ(to_string(ErrorCode::kInvalidArgument), "invalid_argument");
}
