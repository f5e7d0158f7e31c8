#include "ombudsman/scanner/scan.hpp"

#include <algorithm>
#include <set>

#include <spdlog/spdlog.h>

#include "ombudsman/error.hpp"
#include "ombudsman/hashing.hpp"
#include "ombudsman/jsonl.hpp"
#include "ombudsman/masking/mask.hpp"
#include "ombudsman/random.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace ombudsman::scanner {

void to_json(json& j, const FlaggedItem& f) {
  j = json{{"post_id", f.post_id},
           {"score", f.score},
           {"locations", f.locations},
           {"location_spans", f.location_spans},
           {"text", f.text},
           {"platform", corpus::to_string(f.platform)},
           {"partition", corpus::to_string(f.partition)}};
}

void from_json(const json& j, FlaggedItem& f) {
  f.post_id = j.at("post_id").get<std::string>();
  f.score = j.at("score").get<double>();
  f.locations = j.value("locations", std::vector<std::string>{});
  f.location_spans = j.value("location_spans", std::vector<masking::EntitySpan>{});
  f.text = j.value("text", std::string{});
  f.platform = corpus::parse_platform(j.value("platform", std::string{"reddit"}));
  f.partition = corpus::parse_partition(j.value("partition", std::string{"unassigned"}));
}

void to_json(json& j, const ScanReport& r) {
  json preds = json::array();
  for (const auto& p : r.predictions) preds.push_back({{"post_id", p.post_id}, {"label", p.label}, {"score", p.score}});
  json errors = json::array();
  for (const auto& e : r.errors) errors.push_back({{"post_id", e.post_id}, {"message", e.message}});
  json est;
  if (r.estimated_metrics) {
    const auto& m = *r.estimated_metrics;
    est = {{"kind", "audit_sample_estimate"},
           {"precision", m.precision},
           {"recall", m.recall},
           {"f1", m.f1},
           {"accuracy", m.accuracy},
           {"confusion", m.confusion},
           {"n_audit_positive", m.n_audit_positive},
           {"n_audit_negative", m.n_audit_negative}};
  }
  j = json{{"id", r.id},
           {"corpus_hash", r.corpus_hash},
           {"model_ref", r.model_ref},
           {"model_identifier", r.model_identifier},
           {"masking", classifier::to_string(r.masking)},
           {"n_positive", r.n_positive},
           {"n_negative", r.n_negative},
           {"n_errors", r.errors.size()},
           {"predictions", preds},
           {"flagged", r.flagged},
           {"errors", errors},
           {"audit_pos_sample", r.audit_pos_sample},
           {"audit_neg_sample", r.audit_neg_sample},
           {"audit_seed", r.audit_seed ? json(*r.audit_seed) : json()},
           {"estimated_metrics", est},
           {"created_at", format_utc(r.created_at)},
           {"notes", r.notes}};
}

void from_json(const json& j, ScanReport& r) {
  r = ScanReport{};
  r.id = j.at("id").get<std::string>();
  r.corpus_hash = j.at("corpus_hash").get<std::string>();
  r.model_ref = j.value("model_ref", std::string{});
  r.model_identifier = j.value("model_identifier", std::string{});
  r.masking = classifier::parse_masking(j.value("masking", std::string{"mask"}));
  r.n_positive = j.at("n_positive").get<std::size_t>();
  r.n_negative = j.at("n_negative").get<std::size_t>();
  for (const auto& p : j.at("predictions")) {
    r.predictions.push_back({p.at("post_id").get<std::string>(), p.at("label").get<int>(), p.at("score").get<double>()});
  }
  r.flagged = j.value("flagged", std::vector<FlaggedItem>{});
  for (const auto& e : j.value("errors", json::array())) {
    r.errors.push_back({e.at("post_id").get<std::string>(), e.value("message", std::string{})});
  }
  r.audit_pos_sample = j.value("audit_pos_sample", std::vector<std::string>{});
  r.audit_neg_sample = j.value("audit_neg_sample", std::vector<std::string>{});
  if (j.contains("audit_seed") && !j["audit_seed"].is_null()) r.audit_seed = j["audit_seed"].get<std::uint64_t>();
  if (j.contains("estimated_metrics") && !j["estimated_metrics"].is_null()) {
    const auto& m = j["estimated_metrics"];
    EstimatedMetrics e;
    e.precision = m.at("precision").get<double>();
    e.recall = m.at("recall").get<double>();
    e.f1 = m.at("f1").get<double>();
    e.accuracy = m.at("accuracy").get<double>();
    e.confusion = m.at("confusion").get<classifier::Confusion>();
    e.n_audit_positive = m.at("n_audit_positive").get<std::size_t>();
    e.n_audit_negative = m.at("n_audit_negative").get<std::size_t>();
    r.estimated_metrics = e;
  }
  r.created_at = parse_timestamp(j.at("created_at").get<std::string>());
  r.notes = j.value("notes", std::vector<std::string>{});
}

std::string corpus_hash(const std::vector<corpus::Post>& corpus) {
  json rows = json::array();
  for (const auto& p : corpus) rows.push_back({p.post_id, p.text});
  return json_hash(rows);
}

ScanReport scan(const std::vector<corpus::Post>& corpus, classifier::TrainedModel& model, masking::NerBackend& ner,
                const ScanOptions& options) {
  std::set<std::string> seen;
  for (const auto& p : corpus) {
    if (!seen.insert(p.post_id).second) {
      throw Error(ErrorCode::kInvalidArgument, "corpus lists post " + p.post_id + " more than once");
    }
  }
  ScanReport r;
  r.corpus_hash = corpus_hash(corpus);
  r.model_ref = options.model_ref;
  r.model_identifier = options.model_identifier;
  r.masking = options.masking;
  r.created_at = options.created_at;
  r.id = short_hash(json_hash({{"corpus", r.corpus_hash}, {"model", r.model_ref}, {"masking", to_string(r.masking)}}));

  for (const auto& post : corpus) {
    try {
      double score;
      if (options.masking == classifier::Masking::kMask) {
        auto escaped = masking::escape_mask_literals(post.text);
        score = model.predict_proba(masking::mask_text(escaped, ner).text);
      } else {
        score = model.predict_proba(post.text);
      }
      if (!(score >= 0.0 && score <= 1.0)) throw Error(ErrorCode::kBackend, "model score outside [0,1]");
      int label = score > 0.5 ? 1 : 0;
      r.predictions.push_back({post.post_id, label, score});
      if (label == 1) {
        ++r.n_positive;
        FlaggedItem f;
        f.post_id = post.post_id;
        f.score = score;
        f.location_spans = masking::extract_locations(post.text, ner);
        for (const auto& s : f.location_spans) f.locations.push_back(s.surface);
        f.text = post.text;
        f.platform = post.platform;
        f.partition = post.partition;
        r.flagged.push_back(std::move(f));
      } else {
        ++r.n_negative;
      }
    } catch (const std::exception& e) {
      r.errors.push_back({post.post_id, e.what()});
    }
  }
  std::sort(r.flagged.begin(), r.flagged.end(), [](const FlaggedItem& a, const FlaggedItem& b) {
    return a.score != b.score ? a.score > b.score : a.post_id < b.post_id;
  });
  if (!r.errors.empty()) {
    r.notes.push_back(std::to_string(r.errors.size()) + " post(s) failed to classify and are excluded from counts");
  }
  spdlog::info("scan {}: {} positive, {} negative, {} errors", r.id, r.n_positive, r.n_negative, r.errors.size());
  return r;
}

void sample_audit(ScanReport& report, std::size_t n_pos, std::size_t n_neg, std::uint64_t seed) {
  std::vector<std::string> pos, neg;
  for (const auto& p : report.predictions) (p.label == 1 ? pos : neg).push_back(p.post_id);
  if (n_pos > pos.size() || n_neg > neg.size()) {
    throw Error(ErrorCode::kInvalidArgument,
                "audit request exceeds predictions: asked " + std::to_string(n_pos) + " positive / " +
                    std::to_string(n_neg) + " negative, available " + std::to_string(pos.size()) + " / " +
                    std::to_string(neg.size()));
  }
  auto draw = [&](std::vector<std::string>& pool, std::size_t k, const char* name) {
    std::sort(pool.begin(), pool.end());
    SeededRng rng(derive_seed(seed, name));
    std::vector<std::string> out;
    for (auto i : sample_indices(pool.size(), k, rng)) out.push_back(pool[i]);
    return out;
  };
  report.audit_pos_sample = draw(pos, n_pos, "audit-positive");
  report.audit_neg_sample = draw(neg, n_neg, "audit-negative");
  report.audit_seed = seed;
  report.estimated_metrics.reset();
}

void estimate_wild_metrics(ScanReport& report, const std::map<std::string, int>& audit_labels) {
  std::map<std::string, int> predicted;
  for (const auto& p : report.predictions) predicted[p.post_id] = p.label;
  std::vector<int> preds, golds;
  std::vector<std::string> unlabeled;
  for (const auto* sample : {&report.audit_pos_sample, &report.audit_neg_sample}) {
    for (const auto& id : *sample) {
      auto it = audit_labels.find(id);
      if (it == audit_labels.end()) {
        unlabeled.push_back(id);
        continue;
      }
      preds.push_back(predicted.at(id));
      golds.push_back(it->second);
    }
  }
  if (!unlabeled.empty()) {
    throw Error(ErrorCode::kInvalidArgument, std::to_string(unlabeled.size()) + " audit item(s) have no label",
                unlabeled);
  }
  if (golds.empty()) throw Error(ErrorCode::kInvalidArgument, "audit sample is empty; run sample_audit first");
  auto m = classifier::compute_macro_metrics(preds, golds);
  EstimatedMetrics e;
  e.precision = m.precision;
  e.recall = m.recall;
  e.f1 = m.f1;
  e.accuracy = m.accuracy;
  e.confusion = m.confusion;
  e.n_audit_positive = report.audit_pos_sample.size();
  e.n_audit_negative = report.audit_neg_sample.size();
  report.estimated_metrics = e;
}

std::map<std::string, int> labels_from_records(const std::vector<annotation::AnnotationRecord>& records) {
  std::map<std::string, const annotation::AnnotationRecord*> first;
  for (const auto& r : records) {
    auto& slot = first[r.post_id];
    if (slot == nullptr || std::tie(r.noted_at, r.annotator_id) < std::tie(slot->noted_at, slot->annotator_id)) {
      slot = &r;
    }
  }
  std::map<std::string, int> out;
  for (const auto& [id, r] : first) out[id] = r->label == annotation::Label::kPositive ? 1 : 0;
  return out;
}

namespace {

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out.push_back('"');
    out.push_back(c);
  }
  return out + "\"";
}

}  // namespace

std::string flagged_csv(const ScanReport& report) {
  std::string out = "post_id,score,locations,text\n";
  for (const auto& f : report.flagged) {
    std::string locs;
    for (const auto& l : f.locations) locs += (locs.empty() ? "" : ";") + l;
    out += csv_field(f.post_id) + "," + json(f.score).dump() + "," + csv_field(locs) + "," + csv_field(f.text) + "\n";
  }
  return out;
}

ReportStore::ReportStore(fs::path dir) : dir_(std::move(dir)) { fs::create_directories(dir_); }

void ReportStore::put(const ScanReport& report) {
  if (report.id.empty()) throw Error(ErrorCode::kInvalidArgument, "scan report has no id");
  write_json_file(dir_ / (report.id + ".json"), report);
}

ScanReport ReportStore::get(const std::string& id) const {
  if (!contains(id)) throw Error(ErrorCode::kNotFound, "no scan with id '" + id + "'");
  return read_json_file(dir_ / (id + ".json")).get<ScanReport>();
}

bool ReportStore::contains(const std::string& id) const {
  if (id.empty() || id.find_first_of("/\\.") != std::string::npos) return false;
  return fs::exists(dir_ / (id + ".json"));
}

std::vector<std::string> ReportStore::ids() const {
  std::vector<std::string> out;
  for (const auto& entry : fs::directory_iterator(dir_)) {
    if (entry.path().extension() == ".json") out.push_back(entry.path().stem().string());
  }
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace ombudsman::scanner
