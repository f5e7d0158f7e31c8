#include "ombudsman/pipeline/run.hpp"

#include <algorithm>
#include <chrono>
#include <fstream>
#include <set>

#include <spdlog/spdlog.h>

#include "ombudsman/annotation/agreement.hpp"
#include "ombudsman/annotation/export.hpp"
#include "ombudsman/annotation/records.hpp"
#include "ombudsman/annotation/workflow.hpp"
#include "ombudsman/cascade/backend.hpp"
#include "ombudsman/cascade/funnel.hpp"
#include "ombudsman/classifier/dataset.hpp"
#include "ombudsman/classifier/harness.hpp"
#include "ombudsman/classifier/splits.hpp"
#include "ombudsman/corpus/dedupe.hpp"
#include "ombudsman/corpus/ingest.hpp"
#include "ombudsman/corpus/reserve.hpp"
#include "ombudsman/error.hpp"
#include "ombudsman/hashing.hpp"
#include "ombudsman/jsonl.hpp"
#include "ombudsman/masking/dataset_mask.hpp"
#include "ombudsman/masking/frequency.hpp"
#include "ombudsman/random.hpp"
#include "ombudsman/scanner/scan.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace ombudsman::pipeline {

const StageRecord* RunManifest::find(std::string_view stage) const {
  for (const auto& s : stages) {
    if (s.name == stage) return &s;
  }
  return nullptr;
}

void to_json(json& j, const StageRecord& r) {
  j = json{{"name", r.name},
           {"inputs_hash", r.inputs_hash},
           {"outputs_hash", r.outputs_hash},
           {"outputs", r.outputs},
           {"duration_seconds", r.duration_seconds},
           {"skipped", r.skipped},
           {"summary", r.summary}};
}

void from_json(const json& j, StageRecord& r) {
  r.name = j.at("name").get<std::string>();
  r.inputs_hash = j.at("inputs_hash").get<std::string>();
  r.outputs_hash = j.at("outputs_hash").get<std::string>();
  r.outputs = j.value("outputs", std::map<std::string, std::string>{});
  r.duration_seconds = j.value("duration_seconds", 0.0);
  r.skipped = j.value("skipped", false);
  r.summary = j.value("summary", json::object());
}

void to_json(json& j, const RunManifest& m) { j = json{{"seed", m.seed}, {"stages", m.stages}}; }

void from_json(const json& j, RunManifest& m) {
  m.seed = j.at("seed").get<std::uint64_t>();
  m.stages = j.at("stages").get<std::vector<StageRecord>>();
}

fs::path manifest_path(const PipelineConfig& config) { return config.output_dir / "run_manifest.json"; }

std::vector<std::string> parse_stage_list(std::string_view csv) {
  std::set<std::string> wanted;
  std::vector<std::string> unknown;
  std::size_t start = 0;
  while (start <= csv.size()) {
    auto end = csv.find(',', start);
    if (end == std::string_view::npos) end = csv.size();
    std::string name(csv.substr(start, end - start));
    name.erase(0, name.find_first_not_of(' '));
    name.erase(name.find_last_not_of(' ') + 1);
    if (!name.empty()) {
      if (std::find(kStages.begin(), kStages.end(), name) == kStages.end()) {
        unknown.push_back(name);
      } else {
        wanted.insert(name);
      }
    }
    start = end + 1;
  }
  if (!unknown.empty()) {
    std::string msg = "unknown stage(s):";
    for (const auto& u : unknown) msg += " " + u;
    throw Error(ErrorCode::kInvalidArgument, msg + " (expected ingest,cascade,annotate,adjudicate,train,scan)",
                unknown);
  }
  std::vector<std::string> out;
  for (auto s : kStages) {
    if (wanted.empty() || wanted.contains(std::string(s))) out.emplace_back(s);
  }
  return out;
}

namespace {

std::string model_slug(const std::string& model_identifier, classifier::Masking masking) {
  std::string slug;
  for (char c : model_identifier) {
    bool keep = std::isalnum(static_cast<unsigned char>(c)) || c == '.' || c == '-' || c == '_';
    slug += keep ? c : '_';
  }
  return slug + "-" + std::string(classifier::to_string(masking));
}

// Wall-clock fields do not enter output hashes.
std::string output_digest(const fs::path& path) {
  if (path.extension() == ".json") {
    try {
      auto j = read_json_file(path);
      if (j.is_object() && j.contains("created_at")) {
        j.erase("created_at");
        return json_hash(j);
      }
    } catch (const std::exception&) {
    }
  }
  return file_hash(path.string());
}

std::string optional_file_hash(const std::optional<fs::path>& p) { return p ? file_hash(p->string()) : ""; }

struct StageResult {
  std::vector<fs::path> outputs;  // relative to output_dir
  json summary = json::object();
};

class Runner {
 public:
  Runner(const PipelineConfig& cfg, const RunOptions& opt) : cfg_(cfg), opt_(opt), out_(cfg.output_dir) {}

  RunManifest run() {
    auto stages = opt_.stages.empty() ? parse_stage_list("") : opt_.stages;
    fs::create_directories(out_);
    if (fs::exists(manifest_path(cfg_))) {
      try {
        manifest_ = read_json_file(manifest_path(cfg_)).get<RunManifest>();
      } catch (const std::exception& e) {
        spdlog::warn("ignoring unreadable run manifest: {}", e.what());
        manifest_ = {};
      }
    }
    manifest_.seed = cfg_.seed;
    for (const auto& s : kStages) {
      if (std::find(stages.begin(), stages.end(), s) != stages.end()) run_stage(std::string(s));
    }
    return manifest_;
  }

 private:
  fs::path at(const fs::path& rel) const { return out_ / rel; }
  std::string hash_of(const fs::path& rel) const { return file_hash(at(rel).string()); }

  void require(const std::string& stage, const fs::path& rel, const std::string& producer) const {
    if (fs::exists(at(rel))) return;
    throw Error(ErrorCode::kMissingArtifact,
                "stage '" + stage + "' needs " + rel.generic_string() + ", which does not exist; run stage '" +
                    producer + "' first",
                {producer, rel.generic_string()});
  }

  fs::path scan_model_dir() const { return fs::path("train") / model_slug(cfg_.scan.model_identifier, cfg_.scan.masking); }

  fs::path scan_corpus() const { return cfg_.scan.corpus ? *cfg_.scan.corpus : at("ingest/wild.jsonl"); }

  // Checks upstream artifacts and returns the material the inputs hash covers.
  json inputs_for(const std::string& stage) const {
    const json& raw = cfg_.raw;
    auto section = [&](const char* k) { return raw.contains(k) ? raw[k] : json::object(); };
    if (stage == "ingest") {
      json archives = json::array();
      for (const auto& s : cfg_.ingest.sources) {
        archives.push_back(s.archive_path ? file_hash(*s.archive_path) : "");
      }
      return {{"config", section("ingest")}, {"archives", archives}, {"seed", derive_seed(cfg_.seed, "ingest")}};
    }
    if (stage == "cascade") {
      require(stage, "ingest/corpus.jsonl", "ingest");
      json backends = section("backends");
      std::string cache;
      if (auto rc = cfg_.backends.find("replay_cache"); rc != cfg_.backends.end() &&
                                                         rc->value("mode", std::string{"record"}) == "replay") {
        fs::path p = (*rc)["path"].get<std::string>();
        if (fs::exists(p)) cache = file_hash(p.string());
      }
      return {{"config", section("cascade")},
              {"backends", backends},
              {"replay_cache", cache},
              {"prompt", optional_file_hash(cfg_.cascade_prompt)},
              {"examples", optional_file_hash(cfg_.cascade_examples)},
              {"corpus", hash_of("ingest/corpus.jsonl")}};
    }
    if (stage == "annotate") {
      require(stage, "cascade/retained.jsonl", "cascade");
      return {{"config", section("annotation")},
              {"records", file_hash(cfg_.annotation.records.string())},
              {"pool", optional_file_hash(cfg_.annotation.pool)},
              {"retained", hash_of("cascade/retained.jsonl")}};
    }
    if (stage == "adjudicate") {
      require(stage, "cascade/retained.jsonl", "cascade");
      require(stage, "annotate/expert_queue.json", "annotate");
      return {{"records", file_hash(cfg_.annotation.records.string())},
              {"queue", hash_of("annotate/expert_queue.json")},
              {"retained", hash_of("cascade/retained.jsonl")},
              {"masking", section("masking")},
              {"stoplist", optional_file_hash(cfg_.masking.stoplist)}};
    }
    if (stage == "train") {
      require(stage, "adjudicate/dataset.jsonl", "adjudicate");
      return {{"config", section("train")},
              {"dataset", hash_of("adjudicate/dataset.jsonl")},
              {"seed", derive_seed(cfg_.seed, "train")}};
    }
    // scan
    auto model_dir = scan_model_dir();
    require(stage, model_dir / "model.json", "train");
    if (!cfg_.scan.corpus) require(stage, "ingest/wild.jsonl", "ingest");
    json model = json::object();
    for (const auto& e : fs::recursive_directory_iterator(at(model_dir))) {
      if (e.is_regular_file()) model[fs::relative(e.path(), out_).generic_string()] = file_hash(e.path().string());
    }
    return {{"config", section("scan")},
            {"corpus", file_hash(scan_corpus().string())},
            {"model", model},
            {"ner", cfg_.masking.ner},
            {"audit_labels", optional_file_hash(cfg_.scan.audit_labels)},
            {"seed", derive_seed(cfg_.seed, "scan")}};
  }

  bool outputs_intact(const StageRecord& r) const {
    for (const auto& [rel, digest] : r.outputs) {
      if (!fs::is_regular_file(at(rel)) || output_digest(at(rel)) != digest) return false;
    }
    return true;
  }

  void run_stage(const std::string& stage) {
    json inputs = inputs_for(stage);
    std::string inputs_hash = short_hash(json_hash({{"stage", stage}, {"inputs", inputs}}));
    const StageRecord* prev = manifest_.find(stage);

    if (!opt_.force && prev && prev->inputs_hash == inputs_hash && outputs_intact(*prev)) {
      spdlog::info("stage {}: inputs unchanged, skipping", stage);
      StageRecord rec = *prev;
      rec.skipped = true;
      rec.duration_seconds = 0;
      upsert(std::move(rec));
      return;
    }

    // A crawl interrupted mid-stage keeps its raw sinks and cursors so it
    // can resume. Any completed crawl (changed config, --force, damaged
    // outputs) starts over; its record is dropped first so that an
    // interruption of the new crawl resumes too.
    if (stage == "ingest") {
      bool keep_raw = prev == nullptr;
      if (prev != nullptr) {
        std::erase_if(manifest_.stages, [](const StageRecord& s) { return s.name == "ingest"; });
        prev = nullptr;
        write_json_file(manifest_path(cfg_), manifest_);
      }
      if (fs::exists(at("ingest"))) {
        for (const auto& e : fs::directory_iterator(at("ingest"))) {
          if (keep_raw && e.path().filename() == "raw") continue;
          fs::remove_all(e.path());
        }
      }
    } else {
      fs::remove_all(at(stage));
    }
    fs::create_directories(at(stage));

    spdlog::info("stage {}: running", stage);
    auto t0 = std::chrono::steady_clock::now();
    StageResult result = stage == "ingest"       ? run_ingest()
                         : stage == "cascade"    ? run_cascade()
                         : stage == "annotate"   ? run_annotate()
                         : stage == "adjudicate" ? run_adjudicate()
                         : stage == "train"      ? run_train()
                                                 : run_scan();
    std::chrono::duration<double> elapsed = std::chrono::steady_clock::now() - t0;

    StageRecord rec;
    rec.name = stage;
    rec.inputs_hash = inputs_hash;
    for (const auto& rel : result.outputs) rec.outputs[rel.generic_string()] = output_digest(at(rel));
    rec.outputs_hash = short_hash(json_hash(rec.outputs));
    rec.duration_seconds = elapsed.count();
    rec.summary = std::move(result.summary);
    spdlog::info("stage {}: done in {:.2f}s, outputs {}", stage, rec.duration_seconds, rec.outputs_hash);
    upsert(std::move(rec));
  }

  void upsert(StageRecord rec) {
    auto& v = manifest_.stages;
    v.erase(std::remove_if(v.begin(), v.end(), [&](const StageRecord& s) { return s.name == rec.name; }), v.end());
    v.push_back(std::move(rec));
    auto order = [](const std::string& n) { return std::find(kStages.begin(), kStages.end(), n) - kStages.begin(); };
    std::sort(v.begin(), v.end(), [&](const auto& a, const auto& b) { return order(a.name) < order(b.name); });
    write_json_file(manifest_path(cfg_), manifest_);
  }

  StageResult run_ingest() {
    corpus::IngestOptions io;
    io.author_salt = cfg_.ingest.author_salt;
    io.fetcher = opt_.fetcher;
    io.env = opt_.env;
    fs::create_directories(at("ingest/raw"));
    json per_source = json::object();
    std::vector<corpus::Post> all;
    for (const auto& spec : cfg_.ingest.sources) {
      auto sink = at("ingest/raw") / (spec.effective_name() + ".jsonl");
      per_source[spec.effective_name()] = corpus::ingest(spec, sink, io);
      if (fs::exists(sink)) {
        auto posts = corpus::load_corpus(sink);
        all.insert(all.end(), posts.begin(), posts.end());
      }
    }
    // The same post can arrive through two sources; the first one wins.
    std::set<std::string> seen;
    std::vector<corpus::Post> unique;
    for (auto& p : all) {
      if (seen.insert(p.post_id).second) unique.push_back(std::move(p));
    }
    auto deduped = corpus::dedupe(unique);
    auto reserved = corpus::reserve_wild(deduped.posts, cfg_.ingest.wild_sample, derive_seed(cfg_.seed, "ingest"));
    corpus::save_corpus(at("ingest/corpus.jsonl"), reserved.main);
    corpus::save_corpus(at("ingest/wild.jsonl"), reserved.wild);
    write_json_file(at("ingest/dedupe.json"), deduped.report);
    json summary{{"sources", per_source},
                 {"fetched_unique", unique.size()},
                 {"duplicates_dropped", deduped.report.dropped.size()},
                 {"main", reserved.main.size()},
                 {"wild", reserved.wild.size()}};
    write_json_file(at("ingest/summary.json"), summary);
    return {{"ingest/corpus.jsonl", "ingest/wild.jsonl", "ingest/dedupe.json", "ingest/summary.json"},
            {{"main", reserved.main.size()}, {"wild", reserved.wild.size()}}};
  }

  StageResult run_cascade() {
    auto corpus = corpus::load_corpus(at("ingest/corpus.jsonl"));
    auto backends = cascade::make_backends(cfg_.backends, cfg_.base_dir);
    auto result = cascade::run_cascade(corpus, cfg_.cascade, backends);
    cascade::write_cascade_outputs(at("cascade"), result);
    json totals = json::array();
    for (const auto& s : result.funnel.stages) {
      totals.push_back({{"stage", cascade::to_string(s.stage)}, {"counts", s.total}});
    }
    return {{"cascade/decisions.jsonl", "cascade/funnel.json", "cascade/retained.jsonl"},
            {{"corpus_size", result.funnel.corpus_size}, {"stages", totals}, {"retained", result.retained.size()}}};
  }

  // Records restricted to posts that survived the cascade.
  std::vector<annotation::AnnotationRecord> records_for_retained(std::size_t* ignored = nullptr) const {
    std::set<std::string> retained;
    for (const auto& p : corpus::load_corpus(at("cascade/retained.jsonl"))) retained.insert(p.post_id);
    std::vector<annotation::AnnotationRecord> out;
    std::size_t n_ignored = 0;
    for (auto& r : annotation::load_records(cfg_.annotation.records.string())) {
      if (retained.contains(r.post_id)) {
        out.push_back(std::move(r));
      } else {
        ++n_ignored;
      }
    }
    if (ignored) *ignored = n_ignored;
    return out;
  }

  StageResult run_annotate() {
    auto retained = corpus::load_corpus(at("cascade/retained.jsonl"));
    std::vector<std::string> ids;
    for (const auto& p : retained) ids.push_back(p.post_id);
    std::sort(ids.begin(), ids.end());

    std::size_t ignored = 0;
    auto records = records_for_retained(&ignored);
    std::vector<annotation::AnnotationRecord> partisan;
    std::copy_if(records.begin(), records.end(), std::back_inserter(partisan),
                 [](const auto& r) { return annotation::is_partisan(r.affiliation); });

    StageResult res;
    if (cfg_.annotation.pool) {
      auto pool = read_json_file(*cfg_.annotation.pool).get<std::vector<annotation::Annotator>>();
      write_json_file(at("annotate/assignments.json"), annotation::assign_tasks(ids, pool));
      res.outputs.emplace_back("annotate/assignments.json");
    }
    auto handoff = annotation::handoff_filter(partisan, cfg_.annotation.handoff_policy);
    auto agreement = annotation::compute_agreement(records);
    auto queue = cfg_.annotation.expert_review == ExpertReview::kAll ? ids : handoff.post_ids;

    if (ignored > 0) spdlog::warn("{} annotation record(s) refer to posts outside the cascade output", ignored);
    write_json_file(at("annotate/handoff.json"), {{"policy", annotation::to_string(cfg_.annotation.handoff_policy)},
                                                  {"candidates", handoff.post_ids},
                                                  {"warnings", handoff.warnings},
                                                  {"records_ignored", ignored}});
    write_json_file(at("annotate/agreement.json"), agreement);
    write_json_file(at("annotate/expert_queue.json"), queue);
    res.outputs.insert(res.outputs.end(),
                       {"annotate/handoff.json", "annotate/agreement.json", "annotate/expert_queue.json"});
    res.summary = {{"handoff_candidates", handoff.post_ids.size()},
                   {"expert_queue", queue.size()},
                   {"alpha", json(agreement).at("krippendorff_alpha")}};
    return res;
  }

  StageResult run_adjudicate() {
    auto queue = read_json_file(at("annotate/expert_queue.json")).get<std::set<std::string>>();
    std::vector<annotation::AnnotationRecord> experts, tiebreakers;
    for (auto& r : records_for_retained()) {
      if (!queue.contains(r.post_id)) continue;
      if (r.affiliation == annotation::Affiliation::kExpert) experts.push_back(r);
      if (r.affiliation == annotation::Affiliation::kTiebreaker) tiebreakers.push_back(r);
    }
    auto adjudicated = annotation::adjudicate(experts, tiebreakers);
    auto retained = corpus::load_corpus(at("cascade/retained.jsonl"));
    auto dataset = annotation::export_labeled(adjudicated.labels, retained);
    auto ner = masking::make_ner_backend(cfg_.masking.ner);
    masking::mask_dataset(dataset, *ner, cfg_.masking.mask_token);

    std::vector<std::vector<std::string>> surfaces;
    for (const auto& e : dataset) {
      if (e.label == 1) surfaces.push_back(e.locations);
    }
    auto stoplist =
        cfg_.masking.stoplist ? masking::load_stoplist(*cfg_.masking.stoplist) : masking::default_location_stoplist();
    auto table = masking::location_frequency(surfaces, stoplist, cfg_.masking.frequency_mode);

    annotation::save_adjudicated(at("adjudicate/adjudicated.jsonl").string(), adjudicated.labels);
    write_json_file(at("adjudicate/adjudication.json"),
                    {{"pending", adjudicated.pending}, {"warnings", adjudicated.warnings}});
    classifier::save_dataset(at("adjudicate/dataset.jsonl"), dataset);
    write_text_file(at("adjudicate/locations.csv"), masking::frequency_csv(table));
    auto summary = classifier::summarize(dataset);
    return {{"adjudicate/adjudicated.jsonl", "adjudicate/adjudication.json", "adjudicate/dataset.jsonl",
             "adjudicate/locations.csv"},
            {{"dataset", summary}, {"pending", adjudicated.pending.size()}}};
  }

  StageResult run_train() {
    auto dataset = classifier::load_dataset(at("adjudicate/dataset.jsonl"));
    auto seed = derive_seed(cfg_.seed, "train");
    const auto& t = cfg_.train;
    auto manifest = t.protocol == "kfold" ? classifier::make_kfold_splits(dataset, t.k, seed)
                                          : classifier::make_splits(dataset, t.train_ratio, seed, t.runs);
    classifier::save_manifest(at("train/splits.json"), manifest);

    auto registry = classifier::ModelRegistry::with_defaults();
    json reports = json::array();
    json summary = json::array();
    for (const auto& config : t.configs) {
      auto slug = model_slug(config.model_identifier, config.masking);
      auto dir = at("train") / slug;
      auto ref = classifier::train(dataset, manifest, config, registry, dir);
      auto runs = classifier::load_runs(ref, registry);
      auto report = classifier::evaluate(runs, dataset, manifest, config.masking, config.model_identifier);
      report.protocol = t.protocol;
      write_json_file(dir / "eval.json", report);
      reports.push_back(report);
      summary.push_back({{"model", slug}, {"mean_f1", report.mean_f1}});
    }
    write_json_file(at("train/eval.json"), reports);

    StageResult res;
    for (const auto& e : fs::recursive_directory_iterator(at("train"))) {
      if (e.is_regular_file()) res.outputs.push_back(fs::relative(e.path(), out_));
    }
    std::sort(res.outputs.begin(), res.outputs.end());
    res.summary = {{"models", summary}};
    return res;
  }

  StageResult run_scan() {
    auto registry = classifier::ModelRegistry::with_defaults();
    auto model_dir = scan_model_dir();
    auto ref = classifier::load_model_ref(at(model_dir));
    auto runs = classifier::load_runs(ref, registry);
    if (cfg_.scan.run >= runs.size()) {
      throw Error(ErrorCode::kInvalidArgument, "scan.model.run " + std::to_string(cfg_.scan.run) + " but model has " +
                                                   std::to_string(runs.size()) + " run(s)");
    }
    auto wild = corpus::load_corpus(scan_corpus());
    auto ner = masking::make_ner_backend(cfg_.masking.ner);

    scanner::ScanOptions so;
    so.model_ref = model_dir.generic_string() + "#" + std::to_string(cfg_.scan.run);
    so.model_identifier = ref.model_identifier;
    so.masking = cfg_.scan.masking;
    so.created_at = cfg_.run_timestamp.value_or(now_utc());
    auto report = scanner::scan(wild, *runs[cfg_.scan.run], *ner, so);
    if (cfg_.scan.audit_n_pos + cfg_.scan.audit_n_neg > 0) {
      scanner::sample_audit(report, cfg_.scan.audit_n_pos, cfg_.scan.audit_n_neg, derive_seed(cfg_.seed, "scan"));
      if (cfg_.scan.audit_labels) {
        auto labels = scanner::labels_from_records(annotation::load_records(cfg_.scan.audit_labels->string()));
        scanner::estimate_wild_metrics(report, labels);
      }
    }
    scanner::ReportStore store(at("scan/reports"));
    store.put(report);
    write_text_file(at("scan/flagged.csv"), scanner::flagged_csv(report));
    json summary{{"report_id", report.id},
                 {"n_positive", report.n_positive},
                 {"n_negative", report.n_negative},
                 {"n_errors", report.errors.size()}};
    write_json_file(at("scan/summary.json"), summary);
    return {{fs::path("scan/reports") / (report.id + ".json"), "scan/flagged.csv", "scan/summary.json"}, summary};
  }

  const PipelineConfig& cfg_;
  const RunOptions& opt_;
  fs::path out_;
  RunManifest manifest_;
};

}  // namespace

RunManifest run_pipeline(const PipelineConfig& config, const RunOptions& options) {
  return Runner(config, options).run();
}

}  // namespace ombudsman::pipeline
