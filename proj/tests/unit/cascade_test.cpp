#include <gtest/gtest.h>

#include <deque>

#include "criteria.hpp"
#include "ombudsman/cascade/backend.hpp"
#include "ombudsman/cascade/config.hpp"
#include "ombudsman/cascade/funnel.hpp"
#include "ombudsman/cascade/response_parser.hpp"
#include "ombudsman/cascade/rule_backends.hpp"
#include "ombudsman/cascade/stages.hpp"
#include "ombudsman/error.hpp"
#include "ombudsman/jsonl.hpp"
#include "support.hpp"

using namespace ombudsman;
using namespace ombudsman::cascade;
using nlohmann::json;
using ombudsman::test::make_post;
using corpus::Partition;
using corpus::Platform;

namespace {

class FixedNli final : public NliBackend {
 public:
  explicit FixedNli(NliScores s) : s_(s) {}
  std::string model_identifier() const override { return "fixed"; }
  NliScores infer(std::string_view premise, std::string_view) override {
    last_premise = std::string(premise);
    return s_;
  }
  std::size_t max_premise_chars() const override { return 20; }
  std::string last_premise;

 private:
  NliScores s_;
};

// Replies from a queue; the last reply repeats.
class ScriptedLlm final : public GenerativeBackend {
 public:
  explicit ScriptedLlm(std::deque<std::string> replies) : replies_(std::move(replies)) {}
  std::string model_identifier() const override { return "scripted"; }
  std::string generate(std::string_view prompt) override {
    ++calls;
    prompts.emplace_back(prompt);
    auto r = replies_.front();
    if (replies_.size() > 1) replies_.pop_front();
    return r;
  }
  int calls = 0;
  std::vector<std::string> prompts;

 private:
  std::deque<std::string> replies_;
};

const std::string kLowell =
    "There is a bridge in Lowell Massachusetts, it goes over the Merrimack river and it is rusted strait through.  "
    "It won’t be long before we suffer major injuries because that bridge is always bumper to bumper traffic!";

Backends rule_backends() { return make_backends({{"nli", {{"type", "rule"}}}, {"generative", {{"type", "rule"}}}}); }

}  // namespace

TEST(KeywordFilter, SubstringMatchesInKeywordOrder) {
  CascadeConfig cfg;
  auto d = keyword_filter(make_post("rd:1", "Ohio train derailment was preventable"), cfg);
  EXPECT_EQ(d.verdict, Verdict::kRetain);
  EXPECT_EQ(d.payload["matched_keywords"], json({"train derailment", "Ohio train derailment"}));
  EXPECT_EQ(d.stage_config_hash, cfg.keyword_config_hash());
}

TEST(KeywordFilter, PoliticsCommentMatchesViaVideoTitle) {
  CascadeConfig cfg;
  auto p = make_post("yt:1", "so sad", Partition::kYtPolitics, Platform::kYoutube);
  p.container_title = "Pittsburgh bridge collapse coverage";
  EXPECT_EQ(keyword_filter(p, cfg).verdict, Verdict::kRetain);
  p.partition = Partition::kYtTargeted;
  EXPECT_EQ(keyword_filter(p, cfg).verdict, Verdict::kDrop);
}

TEST(KeywordFilter, NoMatchDrops) {
  CascadeConfig cfg;
  EXPECT_EQ(keyword_filter(make_post("rd:1", "lovely weather"), cfg).verdict, Verdict::kDrop);
}

TEST(KeywordFilter, CaseInsensitive) {
  CascadeConfig cfg;
  auto d = keyword_filter(make_post("rd:1", "FERN HOLLOW bridge COLLAPSE again"), cfg);
  EXPECT_EQ(d.verdict, Verdict::kRetain);
}

TEST(NliStage, ExactlyHalfIsDropped) {
  CascadeConfig cfg;
  FixedNli nli({0.5, 0.25, 0.25});
  auto d = nli_stage(make_post("rd:1", "x"), cfg, nli);
  EXPECT_EQ(d.verdict, Verdict::kDrop);
  EXPECT_EQ(d.score, 0.5);
}

TEST(NliStage, CertainEntailmentRetained) {
  CascadeConfig cfg;
  FixedNli nli({1.0, 0.0, 0.0});
  auto d = nli_stage(make_post("rd:1", "x"), cfg, nli);
  EXPECT_EQ(d.verdict, Verdict::kRetain);
  EXPECT_EQ(d.score, 1.0);
}

TEST(NliStage, LowellPostMatchesPinnedScore) {
  auto pinned = read_json_file(test::fixtures_dir() / "golden/lowell_nli.json");
  ASSERT_EQ(pinned["premise"].get<std::string>(), kLowell);
  CascadeConfig cfg;
  RuleNliBackend nli;
  ASSERT_EQ(nli.model_identifier(), pinned["backend"].get<std::string>());
  auto d = nli_stage(make_post("rd:lowell", kLowell), cfg, nli);
  EXPECT_EQ(d.verdict, Verdict::kRetain);
  EXPECT_EQ(d.score, pinned["entailment"].get<double>());
}

TEST(NliStage, LongPremiseTruncatedAndRecorded) {
  CascadeConfig cfg;
  FixedNli nli({0.9, 0.05, 0.05});
  auto d = nli_stage(make_post("rd:1", std::string(30, 'a')), cfg, nli);
  EXPECT_EQ(nli.last_premise.size(), 20u);
  EXPECT_EQ(d.payload["truncated_from"], 30);
  EXPECT_EQ(d.payload["truncated_to"], 20);
}

TEST(NliStage, BackendFailureIsErrorVerdict) {
  CascadeConfig cfg;
  RuleNliBackend nli;
  auto d = nli_stage(make_post("rd:1", "bridge #mock-nli-error"), cfg, nli);
  EXPECT_EQ(d.verdict, Verdict::kError);
  EXPECT_TRUE(d.payload.contains("error"));
  EXPECT_FALSE(d.score.has_value());
}

TEST(NliStage, MalformedScoresAreErrors) {
  CascadeConfig cfg;
  FixedNli nli({0.9, 0.9, 0.9});
  EXPECT_EQ(nli_stage(make_post("rd:1", "x"), cfg, nli).verdict, Verdict::kError);
}

TEST(LlmAnnotate, CleanArrayRetainsWithPayload) {
  CascadeConfig cfg;
  ScriptedLlm llm({R"([{"id": "rd:1", "concern": true, "locations": ["Lowell"], "leaning": "bipartisan"}])"});
  auto d = llm_annotate({make_post("rd:1", kLowell)}, cfg, llm);
  ASSERT_EQ(d.size(), 1u);
  EXPECT_EQ(d[0].verdict, Verdict::kRetain);
  EXPECT_EQ(d[0].payload, json({{"concern", true}, {"locations", {"Lowell"}}, {"leaning", "bipartisan"}}));
  EXPECT_TRUE(is_valid_llm_payload(d[0].payload));
  EXPECT_EQ(llm.calls, 1);
}

TEST(LlmAnnotate, ProsePrefixStillRecovered) {
  CascadeConfig cfg;
  ScriptedLlm llm({"Sure, here is the JSON:\n"
                   R"([{"id": "rd:1", "concern": false, "locations": [], "leaning": null}])"});
  auto d = llm_annotate({make_post("rd:1", "x")}, cfg, llm);
  EXPECT_EQ(d[0].verdict, Verdict::kDrop);
  EXPECT_EQ(d[0].payload["concern"], false);
}

TEST(LlmAnnotate, RefusalTwiceGivesAllErrors) {
  CascadeConfig cfg;
  ScriptedLlm llm({"I cannot help with that"});
  auto d = llm_annotate({make_post("rd:1", "x"), make_post("rd:2", "y")}, cfg, llm);
  EXPECT_EQ(llm.calls, 2);
  EXPECT_EQ(llm.prompts[0], llm.prompts[1]);
  for (const auto& x : d) EXPECT_EQ(x.verdict, Verdict::kError);
}

TEST(LlmAnnotate, MissingItemRecoveredOnRetry) {
  CascadeConfig cfg;
  ScriptedLlm llm({R"([{"id": "rd:1", "concern": true, "locations": ["Akron"], "leaning": "liberal"}])",
                   R"([{"id": "rd:1", "concern": true, "locations": ["Akron"], "leaning": "liberal"},
                       {"id": "rd:2", "concern": false, "locations": [], "leaning": null}])"});
  auto d = llm_annotate({make_post("rd:1", "x"), make_post("rd:2", "y")}, cfg, llm);
  EXPECT_EQ(llm.calls, 2);
  EXPECT_EQ(d[0].verdict, Verdict::kRetain);
  EXPECT_EQ(d[1].verdict, Verdict::kDrop);
}

TEST(LlmAnnotate, LooseRecordsNormalized) {
  CascadeConfig cfg;
  ScriptedLlm llm({R"([{"id": "rd:1", "concern": "yes", "locations": "Akron", "leaning": "Liberal"}])"});
  auto d = llm_annotate({make_post("rd:1", "x")}, cfg, llm);
  EXPECT_EQ(d[0].verdict, Verdict::kRetain);
  EXPECT_EQ(d[0].payload, json({{"concern", true}, {"locations", {"Akron"}}, {"leaning", "liberal"}}));
}

TEST(LlmAnnotate, UnusableConcernIsError) {
  CascadeConfig cfg;
  ScriptedLlm llm({R"([{"id": "rd:1", "concern": "maybe", "locations": [], "leaning": null}])"});
  auto d = llm_annotate({make_post("rd:1", "x")}, cfg, llm);
  EXPECT_EQ(d[0].verdict, Verdict::kError);
  EXPECT_EQ(llm.calls, 2);
}

TEST(LlmAnnotate, OversizedBatchRejected) {
  CascadeConfig cfg;
  cfg.batch_size = 1;
  ScriptedLlm llm({"[]"});
  EXPECT_THROW(llm_annotate({make_post("rd:1", "x"), make_post("rd:2", "y")}, cfg, llm), Error);
}

TEST(LlmAnnotate, PromptCarriesExamplesAndComments) {
  CascadeConfig cfg;
  cfg.llm_examples = load_examples((test::data_dir() / "examples/few_shot.json").string());
  ASSERT_FALSE(cfg.llm_examples.empty());
  auto prompt = render_annotation_prompt(cfg, {make_post("rd:77", "the Akron bridge will fail")});
  EXPECT_NE(prompt.find("rd:77"), std::string::npos);
  EXPECT_NE(prompt.find("the Akron bridge will fail"), std::string::npos);
  EXPECT_NE(prompt.find(cfg.llm_examples[0].comments[0]["text"].get<std::string>()), std::string::npos);
  EXPECT_EQ(prompt.find("<comments>"), std::string::npos);
}

TEST(ResponseParser, ExactArrayParsedVerbatim) {
  auto r = parse_llm_response(R"([{"id": "a", "concern": true}])", {"a"});
  EXPECT_EQ(r.items.at("a"), json({{"id", "a"}, {"concern", true}}));
}

TEST(ResponseParser, TrailingProseDiscarded) {
  auto r = parse_llm_response(R"([{"id": "a", "concern": true}] and that's all {"id": "b"})", {"a"});
  EXPECT_EQ(r.items.size(), 1u);
}

TEST(ResponseParser, BraceInsideStringNotTruncated) {
  EXPECT_EQ(extract_first_json(R"({"a": "}"})"), json({{"a", "}"}}));
}

TEST(ResponseParser, UnexpectedIdsWarned) {
  auto r = parse_llm_response(R"([{"id": "a"}, {"id": "zz"}])", {"a"});
  EXPECT_EQ(r.items.count("zz"), 0u);
  EXPECT_FALSE(r.warnings.empty());
}

TEST(ResponseParser, MissingIdsReported) {
  try {
    parse_llm_response(R"([{"id": "a"}])", {"a", "b"});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kPartialResult);
    EXPECT_EQ(e.details(), std::vector<std::string>{"b"});
  }
  std::vector<std::string> missing;
  auto r = parse_llm_response_lenient(R"([{"id": "a"}])", {"a", "b"}, missing);
  EXPECT_EQ(r.items.size(), 1u);
  EXPECT_EQ(missing, std::vector<std::string>{"b"});
}

TEST(ResponseParser, AdversarialWrappers) {
  for (const auto& c : test::adversarial_replies()) {
    SCOPED_TRACE(c.name);
    auto r = parse_llm_response(c.raw, test::parser_case_ids());
    ASSERT_EQ(r.items.size(), 2u);
    EXPECT_EQ(r.items.at("c1")["concern"], true);
    EXPECT_EQ(r.items.at("c2")["concern"], false);
  }
}

TEST(ResponseParser, MalformedRepliesErrorCleanly) {
  for (const auto& c : test::malformed_replies()) {
    SCOPED_TRACE(c.name);
    try {
      parse_llm_response(c.raw, test::parser_case_ids());
      ADD_FAILURE() << "accepted";
    } catch (const Error& e) {
      EXPECT_TRUE(e.code() == ErrorCode::kParse || e.code() == ErrorCode::kPartialResult);
    }
  }
}

TEST(ResponseParser, CriterionPasses) {
  auto o = test::check_parser_robustness();
  EXPECT_EQ(o.status, test::Status::kPass) << o.detail;
}

TEST(RunCascade, EmptyCorpusAllZeros) {
  auto r = run_cascade({}, CascadeConfig{}, rule_backends());
  EXPECT_EQ(r.funnel.corpus_size, 0u);
  ASSERT_EQ(r.funnel.stages.size(), 3u);
  for (const auto& s : r.funnel.stages) {
    EXPECT_EQ(s.total, StageCounts{});
    EXPECT_EQ(s.by_partition.size(), std::size(corpus::kAllPartitions));
    EXPECT_EQ(s.by_platform.size(), 2u);
  }
  EXPECT_TRUE(r.retained.empty());
}

TEST(RunCascade, PropertySuite) {
  auto o = test::check_cascade_properties(1200, 0x5eed);
  EXPECT_EQ(o.status, test::Status::kPass) << o.detail;
  auto o2 = test::check_cascade_properties(1000, 424242);
  EXPECT_EQ(o2.status, test::Status::kPass) << o2.detail;
}

TEST(RunCascade, ParallelismDoesNotChangeOutput) {
  auto posts = test::generate_posts(300, 9);
  CascadeConfig one, four;
  four.parallelism = 4;
  auto a = run_cascade(posts, one, rule_backends());
  auto b = run_cascade(posts, four, rule_backends());
  EXPECT_EQ(a.funnel, b.funnel);
  EXPECT_EQ(a.decisions, b.decisions);
  EXPECT_EQ(a.retained, b.retained);
}

TEST(RunCascade, RetainedCarryMatchedKeywords) {
  auto r = run_cascade({make_post("rd:1", "Pittsburgh bridge collapse was awful, the Duluth bridge will go next, it is cracked and rusted")},
                       CascadeConfig{}, rule_backends());
  ASSERT_EQ(r.retained.size(), 1u);
  EXPECT_EQ(r.retained[0].matched_keywords, std::vector<std::string>{"Pittsburgh bridge collapse"});
}

TEST(RunCascade, OutputsWritten) {
  test::TempDir dir;
  auto r = run_cascade(test::generate_posts(50, 4), CascadeConfig{}, rule_backends());
  write_cascade_outputs(dir.path(), r);
  auto funnel = read_json_file(dir / "funnel.json").get<FunnelReport>();
  EXPECT_EQ(funnel, r.funnel);
  EXPECT_EQ(read_jsonl(dir / "decisions.jsonl").size(), r.decisions.size());
  EXPECT_EQ(read_jsonl(dir / "retained.jsonl").size(), r.retained.size());
}

TEST(CascadeConfig, ThresholdOutOfRange) {
  CascadeConfig cfg;
  cfg.nli_threshold = 1.5;
  auto v = cfg.violations();
  ASSERT_EQ(v.size(), 1u);
  EXPECT_EQ(v[0], "nli_threshold in (0,1)");
  cfg.batch_size = 0;
  EXPECT_EQ(cfg.violations().size(), 2u);
}

TEST(CascadeConfig, StageHashesTrackSettings) {
  CascadeConfig a, b;
  b.nli_threshold = 0.6;
  EXPECT_EQ(a.keyword_config_hash(), b.keyword_config_hash());
  EXPECT_NE(a.nli_config_hash("m"), b.nli_config_hash("m"));
  EXPECT_NE(a.nli_config_hash("m"), a.nli_config_hash("n"));
}

TEST(RuleBackends, EntailmentFollowsCueCount) {
  RuleNliBackend nli;
  EXPECT_EQ(nli.infer("nothing here", "h").entailment, 0.0);
  EXPECT_EQ(nli.infer("bridge tunnel", "h").entailment, 0.5);
  auto s = nli.infer("bridge tunnel overpass railway crack", "h");
  EXPECT_EQ(s.entailment, 0.95);
  EXPECT_TRUE(is_valid(s));
}

TEST(RuleBackends, GenerativeRule) {
  EXPECT_TRUE(RuleGenerativeBackend::has_future_cue("it won’t last"));
  EXPECT_TRUE(RuleGenerativeBackend::has_future_cue("a disaster waiting to happen"));
  EXPECT_FALSE(RuleGenerativeBackend::has_future_cue("it willingly stood"));
  EXPECT_EQ(RuleGenerativeBackend::leaning("democrats never fix anything"), "liberal");
  EXPECT_EQ(RuleGenerativeBackend::leaning("the weather"), "bipartisan");
  RuleGenerativeBackend llm;
  CascadeConfig cfg;
  auto d = llm_annotate({make_post("rd:1", kLowell), make_post("rd:2", "my bridge will fail"),
                         make_post("rd:3", "the Akron bridge will fail #mock-omit")},
                        cfg, llm);
  EXPECT_EQ(d[0].verdict, Verdict::kRetain);
  EXPECT_EQ(d[1].verdict, Verdict::kDrop);
  EXPECT_EQ(d[2].verdict, Verdict::kError);
}

TEST(ReplayCache, RecordThenReplay) {
  test::TempDir dir;
  auto path = dir / "cache.jsonl";
  {
    auto cache = std::make_shared<ReplayCache>(path, ReplayCache::Mode::kRecord);
    auto nli = with_replay(std::make_shared<RuleNliBackend>(), cache);
    EXPECT_EQ(nli->infer("bridge tunnel", "h").entailment, 0.5);
    EXPECT_EQ(cache->size(), 1u);
  }
  auto cache = std::make_shared<ReplayCache>(path, ReplayCache::Mode::kReplay);
  auto nli = with_replay(std::make_shared<RuleNliBackend>(), cache);
  EXPECT_EQ(nli->infer("bridge tunnel", "h").entailment, 0.5);
  try {
    nli->infer("never seen", "h");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kNotFound);
  }
}

TEST(Backends, SectionViolations) {
  auto v = backend_section_violations({{"nli", {{"type", "http"}}}, {"generative", {{"type", "rule"}}}, {"extra", 1}});
  EXPECT_GE(v.size(), 2u);
  EXPECT_TRUE(backend_section_violations({{"nli", {{"type", "rule"}}}, {"generative", {{"type", "rule"}}}}).empty());
}
