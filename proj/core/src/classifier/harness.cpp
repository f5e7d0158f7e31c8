#include "ombudsman/classifier/harness.hpp"

#include <map>
#include <unordered_map>

#include <spdlog/spdlog.h>

#include "ombudsman/cascade/response_parser.hpp"
#include "ombudsman/cascade/stages.hpp"
#include "ombudsman/error.hpp"
#include "ombudsman/jsonl.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace ombudsman::classifier {

const std::string& model_input(const LabeledExample& e, Masking masking) {
  if (masking == Masking::kNoMask) return e.text;
  if (!e.masked_text) {
    throw Error(ErrorCode::kInvalidArgument, "example " + e.post_id + " has no masked_text; mask the dataset first");
  }
  return *e.masked_text;
}

void to_json(json& j, const ModelRef& m) {
  json runs = json::array();
  for (const auto& r : m.runs) {
    runs.push_back({{"index", r.index}, {"seed", r.seed}, {"artifact", r.artifact.string()}, {"log", r.log}});
  }
  j = json{{"model_identifier", m.model_identifier},
           {"backend", m.backend},
           {"masking", to_string(m.masking)},
           {"protocol", m.protocol},
           {"dataset_hash", m.dataset_hash},
           {"config", m.config},
           {"runs", runs}};
}

void from_json(const json& j, ModelRef& m) {
  m.model_identifier = j.at("model_identifier").get<std::string>();
  m.backend = j.at("backend").get<std::string>();
  m.masking = parse_masking(j.at("masking").get<std::string>());
  m.protocol = j.value("protocol", std::string{"repeated_holdout"});
  m.dataset_hash = j.value("dataset_hash", std::string{});
  m.config = j.at("config").get<TrainConfig>();
  m.runs.clear();
  for (const auto& r : j.at("runs")) {
    RunRecord rec;
    rec.index = r.at("index").get<std::size_t>();
    rec.seed = r.at("seed").get<std::uint64_t>();
    rec.artifact = r.at("artifact").get<std::string>();
    rec.log = r.value("log", TrainingLog{});
    m.runs.push_back(std::move(rec));
  }
}

ModelRef load_model_ref(const fs::path& dir_or_file) {
  fs::path file = fs::is_directory(dir_or_file) ? dir_or_file / "model.json" : dir_or_file;
  if (!fs::exists(file)) throw Error(ErrorCode::kMissingArtifact, "no trained model at " + file.string());
  auto ref = read_json_file(file).get<ModelRef>();
  ref.dir = file.parent_path();
  return ref;
}

namespace {

std::unordered_map<std::string, const LabeledExample*> index_of(const std::vector<LabeledExample>& dataset) {
  std::unordered_map<std::string, const LabeledExample*> out;
  for (const auto& e : dataset) out.emplace(e.post_id, &e);
  return out;
}

const LabeledExample& lookup(const std::unordered_map<std::string, const LabeledExample*>& idx,
                             const std::string& id) {
  auto it = idx.find(id);
  if (it == idx.end()) throw Error(ErrorCode::kNotFound, "manifest id " + id + " is not in the dataset");
  return *it->second;
}

std::vector<std::string> train_ids_for(const SplitManifest& m, std::size_t run) {
  if (m.folds.empty()) return m.train_ids;
  std::vector<std::string> out;
  for (std::size_t f = 0; f < m.folds.size(); ++f) {
    if (f != run) out.insert(out.end(), m.folds[f].begin(), m.folds[f].end());
  }
  return out;
}

const std::vector<std::string>& test_ids_for(const SplitManifest& m, std::size_t run) {
  return m.folds.empty() ? m.test_ids : m.folds.at(run);
}

void check_hash(const std::vector<LabeledExample>& dataset, const SplitManifest& manifest) {
  if (!manifest.dataset_hash.empty() && manifest.dataset_hash != dataset_hash(dataset)) {
    throw Error(ErrorCode::kInvalidArgument, "split manifest was made for a different dataset (hash mismatch)");
  }
}

}  // namespace

ModelRef train(const std::vector<LabeledExample>& dataset, const SplitManifest& manifest, const TrainConfig& config,
               const ModelRegistry& registry, const fs::path& out_dir) {
  auto problems = config.violations();
  if (!problems.empty()) throw Error(ErrorCode::kConfig, problems.front(), problems);
  check_hash(dataset, manifest);
  auto& backend = registry.for_identifier(config.model_identifier);
  auto idx = index_of(dataset);
  fs::create_directories(out_dir);

  ModelRef ref;
  ref.model_identifier = config.model_identifier;
  ref.backend = backend.name();
  ref.masking = config.masking;
  ref.protocol = manifest.folds.empty() ? "repeated_holdout" : "kfold";
  ref.dataset_hash = manifest.dataset_hash;
  ref.config = config;
  ref.dir = out_dir;

  for (std::size_t r = 0; r < manifest.run_seeds.size(); ++r) {
    std::vector<std::string> texts;
    std::vector<int> labels;
    for (const auto& id : train_ids_for(manifest, r)) {
      const auto& e = lookup(idx, id);
      texts.push_back(model_input(e, config.masking));
      labels.push_back(e.label);
    }
    RunRecord rec;
    rec.index = r;
    rec.seed = manifest.run_seeds[r];
    rec.artifact = "run-" + std::to_string(r) + ".json";
    TrainConfig run_config = config;
    run_config.seed = rec.seed;
    run_config.backend_options["artifact_dir"] = (out_dir / ("run-" + std::to_string(r))).string();
    try {
      auto model = backend.train(texts, labels, run_config, rec.log);
      write_json_file(out_dir / rec.artifact, model->artifact());
    } catch (const std::exception& e) {
      rec.log.status = e.what();
      ref.runs.push_back(std::move(rec));
      write_json_file(out_dir / "train_log.json", ref);
      throw;
    }
    spdlog::info("trained {} run {} ({} examples, final loss {})", config.model_identifier, r, texts.size(),
                 rec.log.epoch_loss.empty() ? 0.0 : rec.log.epoch_loss.back());
    ref.runs.push_back(std::move(rec));
  }
  write_json_file(out_dir / "model.json", ref);
  return ref;
}

std::vector<std::unique_ptr<TrainedModel>> load_runs(const ModelRef& ref, const ModelRegistry& registry) {
  auto& backend = registry.by_name(ref.backend);
  std::vector<std::unique_ptr<TrainedModel>> out;
  for (const auto& r : ref.runs) {
    auto path = ref.dir / r.artifact;
    if (!fs::exists(path)) throw Error(ErrorCode::kMissingArtifact, "model artifact missing: " + path.string());
    out.push_back(backend.load(read_json_file(path)));
  }
  return out;
}

void to_json(json& j, const EvalReport& r) {
  json runs = json::array();
  for (const auto& run : r.runs) runs.push_back({{"seed", run.seed}, {"n_test", run.n_test}, {"metrics", run.metrics}});
  j = json{{"model", r.model},
           {"masking", to_string(r.masking)},
           {"protocol", r.protocol},
           {"runs", runs},
           {"mean",
            {{"precision", r.mean_precision},
             {"recall", r.mean_recall},
             {"f1", r.mean_f1},
             {"accuracy", r.mean_accuracy}}},
           {"dispersion",
            {{"kind", "variance"},
             {"precision", r.var_precision},
             {"recall", r.var_recall},
             {"f1", r.var_f1},
             {"accuracy", r.var_accuracy}}},
           {"abstentions", r.abstentions},
           {"notes", r.notes}};
}

namespace {

// Mean and population variance. The mean is accumulated as offsets from the
// first value so identical runs give exactly that value and variance 0.
std::pair<double, double> mean_var(const std::vector<double>& xs) {
  if (xs.empty()) return {0.0, 0.0};
  const double x0 = xs.front();
  double shift = 0;
  for (double x : xs) shift += x - x0;
  const double n = static_cast<double>(xs.size());
  const double mean = x0 + shift / n;
  double ss = 0;
  for (double x : xs) ss += (x - mean) * (x - mean);
  return {mean, ss / n};
}

}  // namespace

EvalReport aggregate_runs(std::vector<RunEval> runs) {
  EvalReport r;
  std::vector<double> p, rc, f, a;
  for (const auto& run : runs) {
    p.push_back(run.metrics.precision);
    rc.push_back(run.metrics.recall);
    f.push_back(run.metrics.f1);
    a.push_back(run.metrics.accuracy);
  }
  std::tie(r.mean_precision, r.var_precision) = mean_var(p);
  std::tie(r.mean_recall, r.var_recall) = mean_var(rc);
  std::tie(r.mean_f1, r.var_f1) = mean_var(f);
  std::tie(r.mean_accuracy, r.var_accuracy) = mean_var(a);
  r.runs = std::move(runs);
  return r;
}

EvalReport evaluate(std::vector<std::unique_ptr<TrainedModel>>& runs, const std::vector<LabeledExample>& dataset,
                    const SplitManifest& manifest, Masking masking, const std::string& model_name) {
  check_hash(dataset, manifest);
  if (runs.size() != manifest.run_seeds.size()) {
    throw Error(ErrorCode::kInvalidArgument, "expected " + std::to_string(manifest.run_seeds.size()) +
                                                 " trained runs, got " + std::to_string(runs.size()));
  }
  auto idx = index_of(dataset);
  std::vector<RunEval> evals;
  for (std::size_t r = 0; r < runs.size(); ++r) {
    const auto& ids = test_ids_for(manifest, r);
    if (ids.empty()) throw Error(ErrorCode::kInvalidArgument, "test split is empty");
    std::vector<std::string> texts;
    std::vector<int> golds;
    for (const auto& id : ids) {
      const auto& e = lookup(idx, id);
      texts.push_back(model_input(e, masking));
      golds.push_back(e.label);
    }
    auto scores = runs[r]->predict_batch(texts);
    std::vector<int> preds;
    for (double s : scores) preds.push_back(s > 0.5 ? 1 : 0);
    RunEval ev;
    ev.seed = manifest.run_seeds[r];
    ev.n_test = ids.size();
    ev.metrics = compute_macro_metrics(preds, golds);
    evals.push_back(std::move(ev));
  }
  auto report = aggregate_runs(std::move(evals));
  report.model = model_name;
  report.masking = masking;
  report.protocol = manifest.folds.empty() ? "repeated_holdout" : "kfold";
  return report;
}

void to_json(json& j, const ZeroShotOutcome& o) {
  j = json{{"post_id", o.post_id}, {"label", o.label ? json(*o.label) : json()}, {"note", o.note}};
}

namespace {

std::optional<int> rating_of(const json& v) {
  if (v.is_boolean()) return v.get<bool>() ? 1 : 0;
  if (v.is_number_integer() || v.is_number_unsigned()) {
    auto n = v.get<long long>();
    if (n == 0 || n == 1) return static_cast<int>(n);
  }
  if (v.is_number_float()) {
    double d = v.get<double>();
    if (d == 0.0 || d == 1.0) return static_cast<int>(d);
  }
  if (v.is_string()) {
    auto s = v.get<std::string>();
    if (s == "0" || s == "1") return s == "1" ? 1 : 0;
  }
  return std::nullopt;
}

std::optional<int> read_rating(std::string_view raw, const std::string& id) {
  auto value = cascade::extract_first_json(raw);
  if (value.is_object() && value.contains("rating")) return rating_of(value["rating"]);
  auto parsed = cascade::parse_llm_response(raw, {id});
  const auto& rec = parsed.items.at(id);
  if (rec.contains("rating")) return rating_of(rec["rating"]);
  return std::nullopt;
}

}  // namespace

ZeroShotOutcome zero_shot_classify(const corpus::Post& post, std::string_view prompt_template,
                                   cascade::GenerativeBackend& backend) {
  ZeroShotOutcome out;
  out.post_id = post.post_id;
  const auto prompt = cascade::render_zero_shot_prompt(prompt_template, post);
  for (int attempt = 0; attempt < 2; ++attempt) {
    try {
      if (auto r = read_rating(backend.generate(prompt), post.post_id)) {
        out.label = r;
        out.note.clear();
        return out;
      }
      out.note = "reply has no 0/1 rating";
    } catch (const std::exception& e) {
      out.note = e.what();
    }
  }
  out.note = "abstained: " + out.note;
  return out;
}

EvalReport zero_shot_evaluate(const std::vector<LabeledExample>& dataset, const SplitManifest& manifest,
                              std::string_view prompt_template, cascade::GenerativeBackend& backend,
                              std::vector<ZeroShotOutcome>* outcomes) {
  auto idx = index_of(dataset);
  if (manifest.test_ids.empty()) throw Error(ErrorCode::kInvalidArgument, "test split is empty");
  std::vector<int> preds, golds;
  std::size_t abstained = 0;
  for (const auto& id : manifest.test_ids) {
    const auto& e = lookup(idx, id);
    corpus::Post post;
    post.post_id = e.post_id;
    post.text = e.text;
    post.platform = e.platform;
    post.partition = e.partition;
    auto o = zero_shot_classify(post, prompt_template, backend);
    if (o.label) {
      preds.push_back(*o.label);
      golds.push_back(e.label);
    } else {
      ++abstained;
    }
    if (outcomes != nullptr) outcomes->push_back(std::move(o));
  }
  std::vector<RunEval> runs;
  if (!golds.empty()) runs.push_back({0, golds.size(), compute_macro_metrics(preds, golds)});
  auto report = aggregate_runs(std::move(runs));
  report.model = backend.model_identifier();
  report.masking = Masking::kNoMask;
  report.protocol = "zero_shot";
  report.abstentions = abstained;
  if (abstained > 0) {
    report.notes.push_back(std::to_string(abstained) + " abstention(s) excluded from metrics");
  }
  if (golds.empty()) report.notes.emplace_back("every item abstained; no metrics computed");
  return report;
}

}  // namespace ombudsman::classifier
