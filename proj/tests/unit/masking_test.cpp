#include <gtest/gtest.h>

#include "criteria.hpp"
#include "ombudsman/classifier/dataset.hpp"
#include "ombudsman/error.hpp"
#include "ombudsman/jsonl.hpp"
#include "ombudsman/masking/dataset_mask.hpp"
#include "ombudsman/masking/frequency.hpp"
#include "ombudsman/masking/mask.hpp"
#include "ombudsman/masking/ner.hpp"
#include "support.hpp"

using namespace ombudsman;
using namespace ombudsman::masking;

namespace {

// Returns a fixed detection list.
class ScriptedNer final : public NerBackend {
 public:
  explicit ScriptedNer(std::vector<EntitySpan> spans) : spans_(std::move(spans)) {}
  std::string identifier() const override { return "scripted@0"; }
  std::vector<EntitySpan> detect(std::string_view) override { return spans_; }

 private:
  std::vector<EntitySpan> spans_;
};

EntitySpan span(std::size_t s, std::size_t e, EntityCategory c = EntityCategory::kLocation) {
  return {s, e, "", c};
}

classifier::LabeledExample lowell() {
  return classifier::load_dataset(test::fixtures_dir() / "lowell.jsonl").at(0);
}

}  // namespace

TEST(Extract, LowellSpans) {
  GazetteerNer ner;
  auto spans = extract_locations(lowell().text, ner);
  ASSERT_EQ(spans.size(), 2u);
  EXPECT_EQ(spans[0].start, 21u);
  EXPECT_EQ(spans[0].end, 41u);
  EXPECT_EQ(spans[0].surface, "Lowell Massachusetts");
  EXPECT_EQ(spans[1].start, 60u);
  EXPECT_EQ(spans[1].end, 69u);
  EXPECT_EQ(spans[1].surface, "Merrimack");
}

TEST(Extract, NothingToFind) {
  GazetteerNer ner;
  EXPECT_TRUE(extract_locations("the bridge is always busy", ner).empty());
  EXPECT_TRUE(extract_locations("<LOCATION>", ner).empty());
  EXPECT_TRUE(extract_locations("", ner).empty());
}

TEST(Extract, NonLocationCategoriesDropped) {
  ScriptedNer ner({span(0, 3, EntityCategory::kOther), span(4, 9, EntityCategory::kGeopolitical)});
  auto s = extract_locations("Bob Akron", ner);
  ASSERT_EQ(s.size(), 1u);
  EXPECT_EQ(s[0].surface, "Akron");
}

TEST(Extract, MaskTokenNeverTouched) {
  ScriptedNer ner({span(3, 13)});
  EXPECT_TRUE(extract_locations("in <LOCATION> now", ner).empty());
}

TEST(Mask, StateReplacedNotTheBay) {
  GazetteerNer ner;
  auto m = mask_text("Bay bridge in Maryland is next", ner);
  EXPECT_EQ(m.text, "Bay bridge in <LOCATION> is next");
  EXPECT_EQ(m.span_count, 1u);
}

TEST(Mask, EmptySpansLeaveTextAlone) {
  auto m = mask_locations("Bay bridge in Maryland is next", {});
  EXPECT_EQ(m.text, "Bay bridge in Maryland is next");
  EXPECT_EQ(m.span_count, 0u);
}

TEST(Mask, LowellMatchesGolden) {
  auto golden = classifier::load_dataset(test::fixtures_dir() / "golden/lowell_masked.jsonl").at(0);
  std::vector<classifier::LabeledExample> ds = {lowell()};
  GazetteerNer ner;
  mask_dataset(ds, ner);
  EXPECT_EQ(ds[0], golden);
}

TEST(Mask, MultibyteOffsets) {
  GazetteerNer ner;
  EXPECT_EQ(mask_text("café 🚧 Ohio…", ner).text, "café 🚧 <LOCATION>…");
}

TEST(Merge, WhitespaceJoinsOtherSeparatorsDoNot) {
  std::string t = "Lowell  Massachusetts, Ohio";
  auto m = merge_spans(t, {span(23, 27), span(8, 21), span(0, 6)});
  ASSERT_EQ(m.size(), 2u);
  EXPECT_EQ(m[0].start, 0u);
  EXPECT_EQ(m[0].end, 21u);
  EXPECT_EQ(m[0].surface, "Lowell  Massachusetts");
  EXPECT_EQ(m[1].surface, "Ohio");
}

TEST(Merge, OverlapsCollapse) {
  auto m = merge_spans("New York City", {span(0, 8), span(4, 13), span(4, 8)});
  ASSERT_EQ(m.size(), 1u);
  EXPECT_EQ(m[0].surface, "New York City");
}

TEST(Merge, OutOfRangeRejected) {
  try {
    merge_spans("abc", {span(1, 9)});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kInvalidArgument);
  }
}

TEST(Escape, LiteralTokensRewritten) {
  EXPECT_EQ(escape_mask_literals("see <LOCATION> and <LOCATION>"), "see &lt;LOCATION&gt; and &lt;LOCATION&gt;");
  GazetteerNer ner;
  std::vector<classifier::LabeledExample> ds(1);
  ds[0].text = "<LOCATION> near Ohio";
  mask_dataset(ds, ner);
  EXPECT_EQ(*ds[0].masked_text, "&lt;LOCATION&gt; near <LOCATION>");
  EXPECT_EQ(ds[0].locations, std::vector<std::string>{"Ohio"});
}

TEST(Frequency, StoplistRemovesStates) {
  auto t = location_frequency({{"Ohio", "Cincinnati"}, {"Cincinnati"}}, default_location_stoplist());
  EXPECT_EQ(t, (FrequencyTable{{"cincinnati", 2}}));
}

TEST(Frequency, EmptyStoplistKeepsStates) {
  auto t = location_frequency({{"Ohio", "Cincinnati"}, {"Cincinnati"}}, {});
  EXPECT_EQ(t, (FrequencyTable{{"cincinnati", 2}, {"ohio", 1}}));
  EXPECT_TRUE(location_frequency({}, {}).empty());
}

TEST(Frequency, PostsModeCountsOncePerPost) {
  std::vector<std::vector<std::string>> s = {{"Akron", "akron", "Toledo"}, {"Toledo"}};
  EXPECT_EQ(location_frequency(s, {}, FrequencyMode::kOccurrences), (FrequencyTable{{"akron", 2}, {"toledo", 2}}));
  EXPECT_EQ(location_frequency(s, {}, FrequencyMode::kPosts), (FrequencyTable{{"toledo", 2}, {"akron", 1}}));
}

TEST(Frequency, CsvAndStoplistFile) {
  EXPECT_EQ(frequency_csv({{"cincinnati", 2}}), "location,count\ncincinnati,2\n");
  test::TempDir dir;
  write_text_file(dir / "stop.txt", "# states\nOhio\n\n  Texas  \n");
  EXPECT_EQ(load_stoplist(dir / "stop.txt"), (std::vector<std::string>{"Ohio", "Texas"}));
  EXPECT_EQ(default_location_stoplist().size(), 52u);
}

TEST(Masking, CriterionPasses) {
  auto o = test::check_masking();
  EXPECT_EQ(o.status, test::Status::kPass) << o.detail;
  auto o2 = test::check_masking(300, 77);
  EXPECT_EQ(o2.status, test::Status::kPass) << o2.detail;
}
