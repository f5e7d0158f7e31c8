#include <gtest/gtest.h>

#include <thread>

#include "ombudsman/annotation/agreement.hpp"
#include "ombudsman/annotation/export.hpp"
#include "ombudsman/annotation/records.hpp"
#include "ombudsman/annotation/store.hpp"
#include "ombudsman/annotation/workflow.hpp"
#include "ombudsman/error.hpp"
#include "ombudsman/jsonl.hpp"
#include "criteria.hpp"
#include "oracles.hpp"
#include "support.hpp"

using namespace ombudsman;
using namespace ombudsman::annotation;
using nlohmann::json;

namespace {

AnnotationRecord rec(std::string post, std::string who, Affiliation aff, Label label, int minute = 0) {
  AnnotationRecord r;
  r.post_id = std::move(post);
  r.annotator_id = std::move(who);
  r.affiliation = aff;
  r.label = label;
  r.noted_at = UtcSeconds{std::chrono::seconds{1700000000 + 60 * minute}};
  return r;
}

constexpr auto P = Label::kPositive;
constexpr auto N = Label::kNegative;

std::vector<AnnotationRecord> partisan(const std::string& post, Label d, Label r, Label i) {
  return {rec(post, "dem-1", Affiliation::kDemocrat, d), rec(post, "rep-1", Affiliation::kRepublican, r),
          rec(post, "ind-1", Affiliation::kIndependent, i)};
}

std::vector<Annotator> pool() {
  return read_json_file(test::fixtures_dir() / "annotators.json").get<std::vector<Annotator>>();
}

std::vector<std::string> ids(std::size_t n) {
  std::vector<std::string> out;
  for (std::size_t i = 0; i < n; ++i) out.push_back("rd:" + std::to_string(1000 + i));
  return out;
}

}  // namespace

TEST(AssignTasks, EvenSplitAcrossPair) {
  auto tasks = assign_tasks(ids(30), pool());
  ASSERT_EQ(tasks.size(), 30u);
  std::map<std::string, int> load;
  for (const auto& [post, who] : tasks) {
    ASSERT_EQ(who.size(), 3u);
    EXPECT_EQ(who[0].substr(0, 3), "dem");
    EXPECT_EQ(who[1].substr(0, 3), "rep");
    EXPECT_EQ(who[2].substr(0, 3), "ind");
    for (const auto& w : who) ++load[w];
  }
  for (const auto& [w, n] : load) EXPECT_EQ(n, 15) << w;
}

TEST(AssignTasks, OddCountDiffersByOne) {
  auto tasks = assign_tasks(ids(31), pool());
  std::map<std::string, int> load;
  for (const auto& [post, who] : tasks)
    for (const auto& w : who) ++load[w];
  EXPECT_EQ(load["dem-1"], 16);
  EXPECT_EQ(load["dem-2"], 15);
  EXPECT_EQ(load["ind-1"] + load["ind-2"], 31);
}

TEST(AssignTasks, MissingAffiliationRejected) {
  auto p = pool();
  std::erase_if(p, [](const Annotator& a) { return a.affiliation == Affiliation::kIndependent; });
  try {
    assign_tasks(ids(4), p);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kInvalidArgument);
    EXPECT_NE(std::string(e.what()).find("independent"), std::string::npos);
  }
}

TEST(Alpha, PerfectAgreementIsOne) {
  EXPECT_EQ(krippendorff_alpha_nominal({{1, 1, 1}, {0, 0, 0}, {1, 1, 1}}), 1.0);
}

TEST(Alpha, HandComputedSmallTable) {
  // n = 6 pairable values, 2 disagreeing ordered pairs: 1 - (2/6) / (18/30).
  EXPECT_NEAR(*krippendorff_alpha_nominal({{1, 1}, {0, 0}, {1, 0}}), 4.0 / 9.0, 1e-12);
}

TEST(Alpha, TenItemTableMatchesOracle) {
  std::vector<std::vector<int>> units = {{1, 1, 1}, {1, 1, 0}, {0, 0, 0}, {1, 0, 0}, {1, 1, 1},
                                         {0, 0, 1}, {1, 1},    {0, 0, 0}, {1, 1, 1}, {0, 1, 0}};
  auto got = krippendorff_alpha_nominal(units);
  auto want = test::oracle::alpha(units);
  ASSERT_TRUE(got && want);
  EXPECT_NEAR(*got, *want, 1e-12);
}

TEST(Alpha, SingleRatingsIgnoredAndDegenerateCases) {
  EXPECT_EQ(krippendorff_alpha_nominal({{1, 1}, {0, 0}, {1, 0}, {1}}), krippendorff_alpha_nominal({{1, 1}, {0, 0}, {1, 0}}));
  EXPECT_FALSE(krippendorff_alpha_nominal({{1, 1}, {1, 1}}).has_value());
  EXPECT_THROW(krippendorff_alpha_nominal({{1, 0}}), Error);
}

TEST(Kappa, HandFormula) {
  std::vector<int> a, b;
  auto push = [&](int x, int y, int n) {
    for (int i = 0; i < n; ++i) a.push_back(x), b.push_back(y);
  };
  push(1, 1, 40);
  push(0, 0, 40);
  push(1, 0, 10);
  push(0, 1, 10);
  // p_o = 0.8, p_e = 0.5
  EXPECT_NEAR(*cohen_kappa(a, b), 0.6, 1e-12);
  EXPECT_NEAR(*cohen_kappa(a, b), *test::oracle::kappa(a, b), 1e-12);
}

TEST(Kappa, DegenerateAndInvalid) {
  EXPECT_FALSE(cohen_kappa(std::vector<int>{1, 1}, std::vector<int>{1, 1}).has_value());
  EXPECT_THROW(cohen_kappa(std::vector<int>{}, std::vector<int>{}), Error);
  EXPECT_THROW(cohen_kappa(std::vector<int>{1}, std::vector<int>{1, 0}), Error);
}

TEST(Kappa, RecordsAlignedByPost) {
  std::vector<AnnotationRecord> a = {rec("p1", "x", Affiliation::kExpert, P), rec("p2", "x", Affiliation::kExpert, N),
                                     rec("p3", "x", Affiliation::kExpert, P)};
  std::vector<AnnotationRecord> b = {rec("p3", "y", Affiliation::kExpert, P), rec("p1", "y", Affiliation::kExpert, N),
                                     rec("p2", "y", Affiliation::kExpert, N), rec("p9", "y", Affiliation::kExpert, P)};
  EXPECT_NEAR(*cohen_kappa(a, b), *test::oracle::kappa({1, 0, 1}, {0, 0, 1}), 1e-12);
}

TEST(Agreement, CriterionPasses) {
  auto o = test::check_agreement_oracles();
  EXPECT_EQ(o.status, test::Status::kPass) << o.detail;
}

TEST(Agreement, FixtureReportShape) {
  auto records = load_records((test::fixtures_dir() / "annotations.jsonl").string());
  auto report = compute_agreement(records);
  EXPECT_TRUE(report.krippendorff_alpha.has_value());
  EXPECT_EQ(report.n_raters, pool().size());
  for (const char* k : {"democrat|independent", "democrat|republican", "independent|republican",
                        "expert:expert-a|expert:expert-b"}) {
    EXPECT_TRUE(report.pairwise_kappa.count(k)) << k;
  }
  json j = report;
  EXPECT_TRUE(j.contains("krippendorff_alpha"));
}

TEST(Agreement, TiebreakerRecordsExcluded) {
  auto base = partisan("p1", P, P, N);
  auto more = partisan("p2", N, N, N);
  base.insert(base.end(), more.begin(), more.end());
  auto with_tie = base;
  with_tie.push_back(rec("p1", "tie-1", Affiliation::kTiebreaker, P));
  EXPECT_EQ(compute_agreement(base).krippendorff_alpha, compute_agreement(with_tie).krippendorff_alpha);
}

TEST(Unanimity, AllPositiveOnly) {
  auto r = partisan("a", P, P, P);
  auto b = partisan("b", P, P, N);
  r.insert(r.end(), b.begin(), b.end());
  r.push_back(rec("c", "dem-1", Affiliation::kDemocrat, P));
  r.push_back(rec("c", "rep-1", Affiliation::kRepublican, P));
  auto f = unanimity_filter(r);
  EXPECT_EQ(f.post_ids, std::vector<std::string>{"a"});
  ASSERT_EQ(f.warnings.size(), 1u);
  EXPECT_NE(f.warnings[0].find("c"), std::string::npos);
}

TEST(Handoff, Policies) {
  std::vector<AnnotationRecord> r;
  for (auto& [id, l] : std::vector<std::pair<std::string, std::array<Label, 3>>>{
           {"ppp", {P, P, P}}, {"ppn", {P, P, N}}, {"pnn", {P, N, N}}, {"nnn", {N, N, N}}}) {
    auto x = partisan(id, l[0], l[1], l[2]);
    r.insert(r.end(), x.begin(), x.end());
  }
  r.push_back(rec("pn", "dem-1", Affiliation::kDemocrat, P));
  r.push_back(rec("pn", "rep-1", Affiliation::kRepublican, N));
  r.push_back(rec("pp", "dem-1", Affiliation::kDemocrat, P));
  r.push_back(rec("pp", "rep-1", Affiliation::kRepublican, P));

  using V = std::vector<std::string>;
  EXPECT_EQ(handoff_filter(r, HandoffPolicy::kUnanimous).post_ids, V{"ppp"});
  EXPECT_EQ(handoff_filter(r, HandoffPolicy::kAtLeastTwoPositive).post_ids, (V{"pp", "ppn", "ppp"}));
  EXPECT_EQ(handoff_filter(r, HandoffPolicy::kMajority).post_ids, (V{"pp", "ppn", "ppp"}));
  EXPECT_EQ(parse_handoff_policy(to_string(HandoffPolicy::kMajority)), HandoffPolicy::kMajority);
  EXPECT_THROW(parse_handoff_policy("sometimes"), Error);
}

TEST(Adjudicate, AgreementTiebreakPending) {
  std::vector<AnnotationRecord> experts = {
      rec("a", "expert-a", Affiliation::kExpert, P), rec("a", "expert-b", Affiliation::kExpert, P),
      rec("b", "expert-a", Affiliation::kExpert, P), rec("b", "expert-b", Affiliation::kExpert, N),
      rec("c", "expert-a", Affiliation::kExpert, N), rec("c", "expert-b", Affiliation::kExpert, P),
      rec("d", "expert-a", Affiliation::kExpert, N)};
  std::vector<AnnotationRecord> ties = {rec("b", "tie-2", Affiliation::kTiebreaker, P, 5),
                                        rec("b", "tie-1", Affiliation::kTiebreaker, N, 1)};
  auto r = adjudicate(experts, ties);
  ASSERT_EQ(r.labels.size(), 2u);
  EXPECT_EQ(r.labels[0].post_id, "a");
  EXPECT_EQ(r.labels[0].method, Method::kExpertAgreement);
  EXPECT_EQ(r.labels[0].final_label, P);
  EXPECT_EQ(r.labels[1].post_id, "b");
  EXPECT_EQ(r.labels[1].method, Method::kTiebreak);
  // the earliest tiebreaker (tie-1, negative) decides
  EXPECT_EQ(r.labels[1].final_label, N);
  EXPECT_EQ(r.pending, std::vector<std::string>{"c"});
  ASSERT_EQ(r.warnings.size(), 1u);
  EXPECT_NE(r.warnings[0].find("d"), std::string::npos);
}

TEST(Adjudicate, FixtureCounts) {
  auto expected = read_json_file(test::fixtures_dir() / "golden/expected.json")["adjudication"];
  std::vector<AnnotationRecord> experts, ties;
  for (auto& r : load_records((test::fixtures_dir() / "annotations.jsonl").string())) {
    if (r.affiliation == Affiliation::kExpert) experts.push_back(r);
    if (r.affiliation == Affiliation::kTiebreaker) ties.push_back(r);
  }
  auto result = adjudicate(experts, ties);
  std::size_t agreement = 0, tiebreak = 0;
  for (const auto& l : result.labels) (l.method == Method::kTiebreak ? tiebreak : agreement)++;
  EXPECT_EQ(agreement, expected["agreement"].get<std::size_t>());
  EXPECT_EQ(tiebreak, expected["tiebreak"].get<std::size_t>());
  EXPECT_EQ(result.pending, expected["pending"].get<std::vector<std::string>>());
}

TEST(Export, JoinsCorpusAndReportsMissing) {
  EXPECT_TRUE(export_labeled({}, {}).empty());
  std::vector<corpus::Post> corpus = {test::make_post("rd:1", "first"),
                                      test::make_post("yt:2", "second", corpus::Partition::kYtTargeted,
                                                      corpus::Platform::kYoutube)};
  std::vector<AdjudicatedLabel> labels = {{"yt:2", P, Method::kTiebreak, {}}, {"rd:1", N, Method::kExpertAgreement, {}}};
  auto out = export_labeled(labels, corpus);
  ASSERT_EQ(out.size(), 2u);
  EXPECT_EQ(out[0].post_id, "yt:2");
  EXPECT_EQ(out[0].label, 1);
  EXPECT_EQ(out[0].text, "second");
  EXPECT_EQ(out[0].partition, corpus::Partition::kYtTargeted);
  EXPECT_EQ(out[1].label, 0);
  EXPECT_FALSE(out[1].masked_text.has_value());

  labels.push_back({"rd:404", P, Method::kTiebreak, {}});
  try {
    export_labeled(labels, corpus);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kNotFound);
    EXPECT_EQ(e.details(), std::vector<std::string>{"rd:404"});
  }
}

TEST(Records, JsonRoundTrip) {
  auto r = rec("rd:1", "dem-1", Affiliation::kDemocrat, P);
  r.locations = {"Akron"};
  EXPECT_EQ(json(r).get<AnnotationRecord>(), r);
  EXPECT_THROW(json({{"post_id", "x"}, {"annotator_id", "y"}, {"affiliation", "green"}, {"label", "positive"}})
                   .get<AnnotationRecord>(),
               Error);
}

TEST(Store, DuplicateSubmissionConflicts) {
  test::TempDir dir;
  AnnotationStore store(dir / "records.jsonl");
  store.add(rec("p1", "dem-1", Affiliation::kDemocrat, P));
  try {
    store.add(rec("p1", "dem-1", Affiliation::kDemocrat, N));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kConflict);
  }
  EXPECT_EQ(store.records_for("p1")[0].label, P);
  AnnotationStore reopened(dir / "records.jsonl");
  EXPECT_EQ(reopened.size(), 1u);
}

TEST(Store, AddAllIsAtomic) {
  test::TempDir dir;
  AnnotationStore store(dir / "records.jsonl");
  store.add(rec("p1", "dem-1", Affiliation::kDemocrat, P));
  try {
    store.add_all({rec("p2", "dem-1", Affiliation::kDemocrat, P), rec("p1", "dem-1", Affiliation::kDemocrat, P),
                   rec("p3", "rep-1", Affiliation::kRepublican, N), rec("p3", "rep-1", Affiliation::kRepublican, P)});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kConflict);
    EXPECT_EQ(e.details().size(), 2u);
  }
  EXPECT_EQ(store.size(), 1u);
  EXPECT_EQ(AnnotationStore(dir / "records.jsonl").size(), 1u);
}

TEST(Store, ConcurrentWritersKeepEveryRecord) {
  test::TempDir dir;
  AnnotationStore store(dir / "records.jsonl");
  std::vector<std::thread> threads;
  for (int t = 0; t < 4; ++t) {
    threads.emplace_back([&, t] {
      for (int i = 0; i < 25; ++i)
        store.add(rec("p" + std::to_string(i), "a" + std::to_string(t), Affiliation::kIndependent, P));
    });
  }
  for (auto& th : threads) th.join();
  EXPECT_EQ(store.size(), 100u);
  EXPECT_EQ(AnnotationStore(dir / "records.jsonl").size(), 100u);
}
