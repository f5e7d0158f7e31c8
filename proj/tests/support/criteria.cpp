#include "criteria.hpp"

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <map>
#include <numeric>
#include <sstream>

#include <nlohmann/json.hpp>

#include "oracles.hpp"
#include "ombudsman/annotation/agreement.hpp"
#include "ombudsman/cascade/backend.hpp"
#include "ombudsman/cascade/funnel.hpp"
#include "ombudsman/cascade/response_parser.hpp"
#include "ombudsman/cascade/rule_backends.hpp"
#include "ombudsman/cascade/stages.hpp"
#include "ombudsman/classifier/harness.hpp"
#include "ombudsman/classifier/metrics.hpp"
#include "ombudsman/classifier/model.hpp"
#include "ombudsman/classifier/splits.hpp"
#include "ombudsman/error.hpp"
#include "ombudsman/jsonl.hpp"
#include "ombudsman/masking/dataset_mask.hpp"
#include "ombudsman/masking/mask.hpp"
#include "ombudsman/scanner/scan.hpp"
#include "ombudsman/text.hpp"
#include "support.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace ombudsman::test {

namespace {

Outcome finish(Outcome o, std::string detail) {
  o.detail = std::move(detail);
  if (!o.failures.empty()) {
    o.status = Status::kFail;
    o.detail += "; first failure: " + o.failures.front();
  }
  return o;
}

std::string fmt(double v) {
  std::ostringstream s;
  s.precision(17);
  s << v;
  return s.str();
}

json strip_config_hash(json funnel) {
  for (auto& s : funnel["stages"]) s.erase("config_hash");
  return funnel;
}

}  // namespace

Outcome check_golden_funnel() {
  Outcome o;
  TempDir out("golden");
  auto start = std::chrono::steady_clock::now();
  int code = 0;
  auto log = run_command(cli_path().string() + " run --config " + (fixtures_dir() / "pipeline.json").string() +
                             " --out " + out.path().string(),
                         code);
  double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  if (code != 0) {
    o.failures.push_back("ombudsman run exited " + std::to_string(code) + ": " + log.substr(0, 400));
    return finish(o, "run failed");
  }
  auto funnel = strip_config_hash(read_json_file(out / "cascade/funnel.json"));
  auto golden = read_json_file(fixtures_dir() / "golden/funnel.json");
  if (funnel != golden) o.failures.push_back("funnel counts differ from golden/funnel.json");

  auto manifest = read_json_file(out / "run_manifest.json");
  auto golden_manifest = read_json_file(fixtures_dir() / "golden/manifest.json");
  if (manifest["stages"].size() != 6) o.failures.push_back("manifest has " + std::to_string(manifest["stages"].size()) + " stages");
  for (const auto& stage : manifest["stages"]) {
    std::string name = stage["name"];
    if (!golden_manifest.contains(name)) {
      o.failures.push_back("stage " + name + " missing from golden manifest");
      continue;
    }
    if (stage["outputs_hash"] != golden_manifest[name]["outputs_hash"]) {
      o.failures.push_back("stage " + name + " outputs_hash " + stage["outputs_hash"].get<std::string>() +
                           " != golden " + golden_manifest[name]["outputs_hash"].get<std::string>());
    }
    if (stage["outputs"] != golden_manifest[name]["outputs"]) o.failures.push_back("stage " + name + " file hashes differ");
  }
  if (seconds >= 60) o.failures.push_back("run took " + fmt(seconds) + " s");
  const auto& llm = golden["stages"][2]["total"];
  return finish(o, "6 stages, " + std::to_string(golden["corpus_size"].get<int>()) + " main posts -> " +
                       std::to_string(llm["retain"].get<int>()) + " retained, " + fmt(std::round(seconds * 100) / 100) +
                       " s");
}

namespace {

// Returns a fixed entailment, for threshold edge cases.
class FixedNli final : public cascade::NliBackend {
 public:
  explicit FixedNli(double e) : e_(e) {}
  std::string model_identifier() const override { return "fixed"; }
  cascade::NliScores infer(std::string_view, std::string_view) override { return {e_, (1 - e_) / 2, (1 - e_) / 2}; }

 private:
  double e_;
};

void check_conservation(const cascade::StageReport& r, Outcome& o) {
  auto stage = std::string(cascade::to_string(r.stage));
  auto ok = [](const cascade::StageCounts& c) { return c.retain + c.drop + c.error == c.in; };
  if (!ok(r.total)) o.failures.push_back(stage + ": retain+drop+error != in");
  cascade::StageCounts by_part, by_plat;
  for (const auto& [p, c] : r.by_partition) {
    if (!ok(c)) o.failures.push_back(stage + ": partition " + std::string(corpus::to_string(p)) + " not conserved");
    by_part.in += c.in;
    by_part.retain += c.retain;
    by_part.drop += c.drop;
    by_part.error += c.error;
  }
  for (const auto& [p, c] : r.by_platform) {
    if (!ok(c)) o.failures.push_back(stage + ": platform " + std::string(corpus::to_string(p)) + " not conserved");
    by_plat.in += c.in;
    by_plat.retain += c.retain;
    by_plat.drop += c.drop;
    by_plat.error += c.error;
  }
  if (!(by_part == r.total)) o.failures.push_back(stage + ": partition counts do not sum to total");
  if (!(by_plat == r.total)) o.failures.push_back(stage + ": platform counts do not sum to total");
}

}  // namespace

Outcome check_cascade_properties(std::size_t n_posts, std::uint64_t seed) {
  Outcome o;
  auto posts = generate_posts(n_posts, seed);
  cascade::CascadeConfig cfg;
  auto backends = cascade::make_backends({{"nli", {{"type", "rule"}}}, {"generative", {{"type", "rule"}}}});
  auto result = cascade::run_cascade(posts, cfg, backends);
  const auto& st = result.funnel.stages;

  if (st.size() != 3) {
    o.failures.push_back("expected 3 stage reports");
    return finish(o, "");
  }
  if (st[0].total.in != posts.size()) o.failures.push_back("keyword stage did not see the whole corpus");
  for (std::size_t i = 0; i < st.size(); ++i) {
    check_conservation(st[i], o);
    if (i > 0 && st[i].total.in != st[i - 1].total.retain) {
      o.failures.push_back(std::string(cascade::to_string(st[i].stage)) + " input != previous stage retained");
    }
    if (i > 0 && st[i].total.retain > st[i - 1].total.retain) o.failures.push_back("retained count grew");
  }
  if (result.retained.size() != st[2].total.retain) o.failures.push_back("retained posts != llm retain count");

  std::map<std::string, const corpus::Post*> by_id;
  for (const auto& p : posts) by_id[p.post_id] = &p;
  std::size_t at_half = 0;
  for (const auto& d : result.decisions) {
    const auto& post = *by_id.at(d.post_id);
    if (d.stage == cascade::Stage::kKeyword) {
      bool expect = oracle::keyword_match(post, cfg.keyword_set);
      if (expect != (d.verdict == cascade::Verdict::kRetain)) o.failures.push_back("keyword verdict for " + d.post_id);
    } else if (d.stage == cascade::Stage::kNli) {
      if (post.text.find("#mock-nli-error") != std::string::npos) {
        if (d.verdict != cascade::Verdict::kError) o.failures.push_back("nli error sentinel not an error: " + d.post_id);
        continue;
      }
      double e = oracle::rule_entailment(post.text);
      if (e == 0.5) ++at_half;
      if ((e > 0.5) != (d.verdict == cascade::Verdict::kRetain)) {
        o.failures.push_back("nli verdict for " + d.post_id + " at entailment " + fmt(e));
      }
    }
  }

  Gen g(seed ^ 0xcafe);
  for (const auto& p : posts) {
    auto variant = p;
    variant.text = flip_case(p.text, g);
    if (variant.container_title) variant.container_title = flip_case(*variant.container_title, g);
    auto a = cascade::keyword_filter(p, cfg);
    auto b = cascade::keyword_filter(variant, cfg);
    if (a.verdict != b.verdict || a.payload != b.payload) o.failures.push_back("case changed keyword verdict: " + p.post_id);
  }

  auto probe = make_post("rd:edge", "infrastructure");
  FixedNli half(0.5), above(std::nextafter(0.5, 1.0)), below(std::nextafter(0.5, 0.0));
  if (cascade::nli_stage(probe, cfg, half).verdict != cascade::Verdict::kDrop) o.failures.push_back("0.5 retained");
  if (cascade::nli_stage(probe, cfg, below).verdict != cascade::Verdict::kDrop) o.failures.push_back("0.5- retained");
  if (cascade::nli_stage(probe, cfg, above).verdict != cascade::Verdict::kRetain) o.failures.push_back("0.5+ dropped");
  if (at_half == 0) o.failures.push_back("generator produced no post at entailment exactly 0.5");

  return finish(o, std::to_string(posts.size()) + " posts, " + std::to_string(at_half) +
                       " at entailment 0.5, funnel " + std::to_string(st[0].total.retain) + "/" +
                       std::to_string(st[1].total.retain) + "/" + std::to_string(st[2].total.retain) + ", " +
                       std::to_string(o.failures.size()) + " violations");
}

namespace {

std::vector<std::vector<int>> random_table(Gen& g, std::size_t& raters, std::size_t& cats) {
  for (;;) {
    std::size_t items = g.range(5, 30);
    raters = g.range(2, 5);
    cats = g.range(2, 4);
    std::vector<std::vector<int>> units(items);
    for (auto& u : units) {
      for (std::size_t r = 0; r < raters; ++r) {
        if (g.chance(0.15)) continue;  // missing rating
        // Skewed toward agreement so alpha spans a useful range.
        u.push_back(static_cast<int>(g.chance(0.6) && !u.empty() ? static_cast<std::size_t>(u.front()) : g.below(cats)));
      }
    }
    std::size_t pairable = 0;
    for (const auto& u : units) pairable += u.size() >= 2 ? 1 : 0;
    if (pairable >= 2 && oracle::alpha(units)) return units;
  }
}

std::vector<int> relabel(const std::vector<int>& v, const std::vector<int>& perm) {
  std::vector<int> out;
  for (int x : v) out.push_back(perm[static_cast<std::size_t>(x)]);
  return out;
}

}  // namespace

Outcome check_agreement_oracles(std::size_t n_tables, std::uint64_t seed) {
  Outcome o;
  Gen g(seed);
  double worst = 0;
  for (std::size_t t = 0; t < n_tables; ++t) {
    std::size_t raters = 0, cats = 0;
    auto units = random_table(g, raters, cats);
    auto got = annotation::krippendorff_alpha_nominal(units);
    auto want = oracle::alpha(units);
    if (!got) {
      o.failures.push_back("alpha null on table " + std::to_string(t));
      continue;
    }
    worst = std::max(worst, std::abs(*got - *want));
    if (std::abs(*got - *want) >= 1e-9) o.failures.push_back("alpha table " + std::to_string(t) + ": " + fmt(*got) + " vs " + fmt(*want));

    std::vector<int> perm(cats);
    std::iota(perm.begin(), perm.end(), 0);
    shuffle_in_place(std::span<int>(perm), g.rng());
    auto relabeled = units;
    auto permuted = units;
    for (auto& u : relabeled) u = relabel(u, perm);
    for (auto& u : permuted) shuffle_in_place(std::span<int>(u), g.rng());
    auto r1 = annotation::krippendorff_alpha_nominal(relabeled);
    auto r2 = annotation::krippendorff_alpha_nominal(permuted);
    if (!r1 || std::abs(*r1 - *got) >= 1e-12) o.failures.push_back("alpha relabel invariance, table " + std::to_string(t));
    if (!r2 || std::abs(*r2 - *got) >= 1e-12) o.failures.push_back("alpha rater permutation, table " + std::to_string(t));

    // Kappa over the first two raters' full columns of a fresh table.
    std::size_t n = g.range(5, 60);
    std::vector<int> a(n), b(n);
    for (std::size_t i = 0; i < n; ++i) {
      a[i] = static_cast<int>(g.below(cats));
      b[i] = g.chance(0.7) ? a[i] : static_cast<int>(g.below(cats));
    }
    auto k = annotation::cohen_kappa(a, b);
    auto kw = oracle::kappa(a, b);
    if (k.has_value() != kw.has_value()) {
      o.failures.push_back("kappa definedness, pair " + std::to_string(t));
    } else if (k) {
      worst = std::max(worst, std::abs(*k - *kw));
      if (std::abs(*k - *kw) >= 1e-9) o.failures.push_back("kappa pair " + std::to_string(t) + ": " + fmt(*k) + " vs " + fmt(*kw));
      auto ks = annotation::cohen_kappa(b, a);
      auto kr = annotation::cohen_kappa(relabel(a, perm), relabel(b, perm));
      if (!ks || std::abs(*ks - *k) >= 1e-12) o.failures.push_back("kappa rater swap, pair " + std::to_string(t));
      if (!kr || std::abs(*kr - *k) >= 1e-12) o.failures.push_back("kappa relabel invariance, pair " + std::to_string(t));
    }
  }
  std::vector<std::vector<int>> perfect = {{1, 1, 1}, {0, 0, 0}, {1, 1, 1}, {0, 0}};
  auto pa = annotation::krippendorff_alpha_nominal(perfect);
  if (!pa || *pa != 1.0) o.failures.push_back("perfect agreement alpha != 1");
  auto pk = annotation::cohen_kappa(std::vector<int>{1, 0, 1, 0}, std::vector<int>{1, 0, 1, 0});
  if (!pk || *pk != 1.0) o.failures.push_back("perfect agreement kappa != 1");
  return finish(o, std::to_string(n_tables) + " tables, max |delta| " + fmt(worst));
}

Outcome check_metric_oracles(std::size_t n_pairs, std::uint64_t seed) {
  Outcome o;
  Gen g(seed);
  double worst = 0;
  for (std::size_t t = 0; t < n_pairs; ++t) {
    std::size_t n = g.range(1, 200);
    double base = g.chance(0.2) ? 0.02 : 0.5;  // some rare-class pairs
    std::vector<int> preds(n), golds(n);
    for (std::size_t i = 0; i < n; ++i) {
      golds[i] = g.chance(base) ? 1 : 0;
      preds[i] = g.chance(0.75) ? golds[i] : 1 - golds[i];
    }
    auto m = classifier::compute_macro_metrics(preds, golds);
    auto w = oracle::macro(preds, golds);
    for (auto [got, want] : {std::pair{m.precision, w.precision}, std::pair{m.recall, w.recall},
                             std::pair{m.f1, w.f1}, std::pair{m.accuracy, w.accuracy}}) {
      worst = std::max(worst, std::abs(got - want));
      if (std::abs(got - want) >= 1e-12) o.failures.push_back("pair " + std::to_string(t) + ": " + fmt(got) + " vs " + fmt(want));
    }
    std::vector<int> sp, sg;
    for (int x : preds) sp.push_back(1 - x);
    for (int x : golds) sg.push_back(1 - x);
    auto s = classifier::compute_macro_metrics(sp, sg);
    if (std::abs(s.precision - m.precision) >= 1e-12 || std::abs(s.recall - m.recall) >= 1e-12 ||
        std::abs(s.f1 - m.f1) >= 1e-12 || s.accuracy != m.accuracy) {
      o.failures.push_back("label swap changed macro metrics, pair " + std::to_string(t));
    }
  }
  return finish(o, std::to_string(n_pairs) + " pairs, max |delta| " + fmt(worst));
}

Outcome check_masking(std::size_t n_texts, std::uint64_t seed) {
  Outcome o;
  masking::GazetteerNer ner;
  const std::string token(masking::kDefaultMaskToken);
  Gen g(seed);
  std::size_t masked_regions = 0;
  for (std::size_t i = 0; i < n_texts; ++i) {
    auto text = masking::escape_mask_literals(generate_masking_text(g));
    auto spans = masking::extract_locations(text, ner);
    auto once = masking::mask_locations(text, spans);
    auto twice = masking::mask_text(once.text, ner);
    masked_regions += once.span_count;
    auto where = " (text " + std::to_string(i) + ")";
    if (twice.text != once.text || twice.span_count != 0) o.failures.push_back("not idempotent" + where);
    if (!masking::extract_locations(once.text, ner).empty()) o.failures.push_back("location survives masking" + where);
    if (once.span_count != spans.size()) o.failures.push_back("span_count != merged spans" + where);
    std::size_t covered = 0;
    for (const auto& s : spans) covered += s.end - s.start;
    auto expected = text::codepoint_length(text) - covered + once.span_count * text::codepoint_length(token);
    if (text::codepoint_length(once.text) != expected) o.failures.push_back("length accounting" + where);
    std::size_t tokens = 0;
    for (auto pos = once.text.find(token); pos != std::string::npos; pos = once.text.find(token, pos + 1)) ++tokens;
    if (tokens != once.span_count) o.failures.push_back("token count != span_count" + where);
  }

  TempDir tmp("lowell");
  auto dataset = classifier::load_dataset(fixtures_dir() / "lowell.jsonl");
  masking::mask_dataset(dataset, ner);
  classifier::save_dataset(tmp / "lowell_masked.jsonl", dataset);
  if (read_text_file(tmp / "lowell_masked.jsonl") != read_text_file(fixtures_dir() / "golden/lowell_masked.jsonl")) {
    o.failures.push_back("Lowell masked output differs from golden/lowell_masked.jsonl");
  }
  return finish(o, std::to_string(n_texts) + " texts, " + std::to_string(masked_regions) +
                       " masked regions, Lowell fixture byte-exact");
}

const std::vector<std::string>& parser_case_ids() {
  static const std::vector<std::string> ids = {"c1", "c2"};
  return ids;
}

std::vector<ParserCase> adversarial_replies() {
  const std::string arr =
      R"([{"id": "c1", "concern": true, "locations": ["Lowell"], "leaning": "bipartisan"}, )"
      R"({"id": "c2", "concern": false, "locations": [], "leaning": null}])";
  const std::string pretty =
      "[\n  {\n    \"id\": \"c1\",\n    \"concern\": true,\n    \"locations\": [\"Lowell\"],\n    \"leaning\": "
      "\"bipartisan\"\n  },\n  {\n    \"id\": \"c2\",\n    \"concern\": false,\n    \"locations\": [],\n    "
      "\"leaning\": null\n  }\n]";
  std::string crlf = pretty;
  for (std::size_t p = crlf.find('\n'); p != std::string::npos; p = crlf.find('\n', p + 2)) crlf.replace(p, 1, "\r\n");
  return {
      {"prose prefix", "Sure, here is the JSON:\n" + arr},
      {"prose suffix", arr + "\nLet me know if you need anything else!"},
      {"prose both sides", "Here you go.\n" + arr + "\nHope this helps."},
      {"json fence", "```json\n" + arr + "\n```"},
      {"bare fence", "```\n" + arr + "\n```"},
      {"fence inside prose", "Sure!\n\n```json\n" + arr + "\n```\n\nThese are my ratings."},
      {"closing brace in string",
       R"([{"id": "c1", "concern": true, "locations": ["Lowell"], "leaning": "bipartisan", "reason": "bridge } over river"}, {"id": "c2", "concern": false, "locations": [], "leaning": null}])"},
      {"brackets in string",
       R"(Result: [{"id": "c1", "concern": true, "locations": ["Lowell [MA]"], "leaning": "bipartisan"}, {"id": "c2", "concern": false, "locations": [], "leaning": null}])"},
      {"escaped quote before brace",
       R"([{"id": "c1", "concern": true, "locations": ["Lowell"], "leaning": "bipartisan", "note": "he said \"}]\" loudly"}, {"id": "c2", "concern": false, "locations": [], "leaning": null}])"},
      {"escaped backslash at string end",
       R"([{"id": "c1", "concern": true, "locations": ["Lowell"], "leaning": "bipartisan", "path": "C:\\dir\\"}, {"id": "c2", "concern": false, "locations": [], "leaning": null}])"},
      {"bracketed prose first", "As noted [see above], the answer is " + arr},
      {"braced prose first", "Format {id, concern} as requested: " + arr},
      {"object wrapper", R"({"results": )" + arr + "}"},
      {"object keyed by id",
       R"({"c1": {"concern": true, "locations": ["Lowell"], "leaning": "bipartisan"}, "c2": {"concern": false, "locations": [], "leaning": null}})"},
      {"pretty printed", pretty},
      {"windows line endings", "Answer:\r\n" + crlf + "\r\n"},
      {"unicode in strings",
       R"(Voilà : [{"id": "c1", "concern": true, "locations": ["Lowell", "Montréal"], "leaning": "bipartisan"}, {"id": "c2", "concern": false, "locations": [], "leaning": null}] ✅)"},
      {"second block ignored", arr + "\n\nAlternative:\n[{\"id\": \"zz\"}]"},
      {"trailing brace prose", arr + " } end of answer }"},
      {"apostrophes and fence language", "Here's what I'd say, don't worry:\n```JSON\n" + arr + "\n```"},
  };
}

std::vector<ParserCase> malformed_replies() {
  return {
      {"empty", ""},
      {"refusal", "I cannot help with that."},
      {"truncated", R"([{"id": "c1", "concern": true, "locations": ["Lowell"])"},
      {"broken fence", "```json\n[{\"id\": \"c1\", \"concern\": tru}]\n```"},
      {"unbalanced", R"({"id": "c1", "concern": true)"},
      {"records without ids", R"([{"concern": true}, {"concern": false}])"},
      {"bare number", "42"},
      {"empty array", "[]"},
      {"one id missing", R"([{"id": "c1", "concern": true, "locations": [], "leaning": null}])"},
      {"string literal only", R"("[not json]")"},
  };
}

Outcome check_parser_robustness() {
  Outcome o;
  std::size_t recovered = 0, rejected = 0;
  auto cases = adversarial_replies();
  for (const auto& c : cases) {
    try {
      auto parsed = cascade::parse_llm_response(c.raw, parser_case_ids());
      bool ok = parsed.items.size() == 2 && parsed.items.at("c1").value("concern", false) &&
                !parsed.items.at("c2").value("concern", true);
      if (ok) ++recovered;
      else o.failures.push_back("wrong payload: " + c.name);
    } catch (const std::exception& ex) {
      o.failures.push_back("not recovered: " + c.name + " (" + ex.what() + ")");
    }
  }
  auto bad = malformed_replies();
  for (const auto& c : bad) {
    try {
      cascade::parse_llm_response(c.raw, parser_case_ids());
      o.failures.push_back("accepted malformed: " + c.name);
    } catch (const Error& e) {
      if (e.code() == ErrorCode::kParse || e.code() == ErrorCode::kPartialResult) ++rejected;
      else o.failures.push_back("wrong error code for " + c.name);
    } catch (const std::exception& ex) {
      o.failures.push_back("unclean failure for " + c.name + ": " + ex.what());
    }
  }
  return finish(o, std::to_string(recovered) + "/" + std::to_string(cases.size()) + " adversarial recovered, " +
                       std::to_string(rejected) + "/" + std::to_string(bad.size()) + " malformed rejected");
}

Outcome check_scan_audit() {
  Outcome o;
  auto corpus = corpus::load_corpus(fixtures_dir() / "wild_posts.jsonl");
  auto expected = read_json_file(fixtures_dir() / "golden/expected.json")["scan"];
  auto registry = classifier::ModelRegistry::with_defaults();
  classifier::TrainConfig tc;
  tc.model_identifier = "mock:rule";
  tc.epochs = 1;
  classifier::TrainingLog log;
  auto model = registry.for_identifier("mock:rule").train({"a", "b"}, {0, 1}, tc, log);
  masking::GazetteerNer ner;
  scanner::ScanOptions opts;
  opts.model_ref = "mock:rule";
  opts.model_identifier = "mock:rule";
  auto report = scanner::scan(corpus, *model, ner, opts);
  if (report.n_positive != expected["n_positive"].get<std::size_t>() ||
      report.n_negative != expected["n_negative"].get<std::size_t>()) {
    o.failures.push_back("scan counts " + std::to_string(report.n_positive) + "/" + std::to_string(report.n_negative) +
                         " differ from golden");
  }

  auto first = report, second = report;
  scanner::sample_audit(first, 10, 10, 42);
  scanner::sample_audit(second, 10, 10, 42);
  if (first.audit_pos_sample != second.audit_pos_sample || first.audit_neg_sample != second.audit_neg_sample) {
    o.failures.push_back("audit sample not reproducible");
  }
  if (first.audit_pos_sample.size() != 10 || first.audit_neg_sample.size() != 10) o.failures.push_back("audit size");

  // Synthetic audit: 20 predicted positives (12 confirmed), 20 predicted
  // negatives (5 actually positive).
  scanner::ScanReport synth;
  std::map<std::string, int> labels;
  for (int i = 0; i < 40; ++i) {
    auto id = "p" + std::to_string(i);
    int pred = i < 20 ? 1 : 0;
    synth.predictions.push_back({id, pred, pred ? 0.9 : 0.1});
    (pred ? synth.audit_pos_sample : synth.audit_neg_sample).push_back(id);
    labels[id] = pred ? (i < 12 ? 1 : 0) : (i < 25 ? 1 : 0);
  }
  labels["unrelated"] = 1;
  scanner::estimate_wild_metrics(synth, labels);
  const double tp = 12, fp = 8, tn = 15, fn = 5;
  double p1 = tp / (tp + fp), r1 = tp / (tp + fn), p0 = tn / (tn + fn), r0 = tn / (tn + fp);
  double f1 = 2 * p1 * r1 / (p1 + r1), f0 = 2 * p0 * r0 / (p0 + r0);
  const auto& e = *synth.estimated_metrics;
  classifier::Confusion want{12, 8, 15, 5};
  if (!(e.confusion == want)) o.failures.push_back("audit confusion differs");
  if (e.precision != (p1 + p0) / 2 || e.recall != (r1 + r0) / 2 || e.f1 != (f1 + f0) / 2 ||
      e.accuracy != (tp + tn) / 40) {
    o.failures.push_back("estimated metrics differ from confusion oracle");
  }
  return finish(o, "wild fixture " + std::to_string(report.n_positive) + " positive / " +
                       std::to_string(report.n_negative) + " negative; audit 10+10 reproducible; synthetic estimate exact");
}

Outcome check_paper_scale() {
  Outcome o;
  const char* path = std::getenv("OMBUDSMAN_PAPER_DATASET");
  if (path == nullptr || *path == '\0') {
    o.status = Status::kSkip;
    o.detail = "set OMBUDSMAN_PAPER_DATASET to a labeled dataset to run (target macro F1 0.82 +/- 0.05)";
    return o;
  }
  auto dataset = classifier::load_dataset(path);
  classifier::TrainConfig tc;
  if (const char* cfg = std::getenv("OMBUDSMAN_PAPER_TRAIN_CONFIG"); cfg != nullptr && *cfg != '\0') {
    tc = read_json_file(cfg).get<classifier::TrainConfig>();
  }
  if (tc.masking == classifier::Masking::kMask) {
    masking::GazetteerNer ner;
    bool missing = false;
    for (const auto& e : dataset) missing = missing || !e.masked_text;
    if (missing) masking::mask_dataset(dataset, ner);
  }
  auto manifest = classifier::make_splits(dataset, 0.7, 20240917);
  TempDir out("paper");
  auto registry = classifier::ModelRegistry::with_defaults();
  auto ref = classifier::train(dataset, manifest, tc, registry, out.path());
  auto runs = classifier::load_runs(ref, registry);
  auto report = classifier::evaluate(runs, dataset, manifest, tc.masking, tc.model_identifier);
  if (std::abs(report.mean_f1 - 0.82) > 0.05) {
    o.failures.push_back("macro F1 " + fmt(report.mean_f1) + " outside 0.82 +/- 0.05");
  }
  return finish(o, tc.model_identifier + " macro F1 " + fmt(report.mean_f1) + " over " +
                       std::to_string(report.runs.size()) + " runs");
}

const std::vector<Criterion>& primary_criteria() {
  static const std::vector<Criterion> all = {
      {"golden-funnel", [] { return check_golden_funnel(); }},
      {"cascade-semantics", [] { return check_cascade_properties(); }},
      {"agreement-oracles", [] { return check_agreement_oracles(); }},
      {"metric-oracles", [] { return check_metric_oracles(); }},
      {"masking", [] { return check_masking(); }},
      {"parser-robustness", [] { return check_parser_robustness(); }},
      {"scan-audit", [] { return check_scan_audit(); }},
      {"paper-scale", [] { return check_paper_scale(); }},
  };
  return all;
}

}  // namespace ombudsman::test
