#pragma once

#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "ombudsman/cascade/backend.hpp"
#include "ombudsman/classifier/dataset.hpp"
#include "ombudsman/classifier/metrics.hpp"
#include "ombudsman/classifier/model.hpp"
#include "ombudsman/classifier/splits.hpp"
#include "ombudsman/corpus/post.hpp"

namespace ombudsman::classifier {

// The text a model sees for an example under a masking variant. Throws
// Error(kInvalidArgument) for kMask when masked_text is missing.
const std::string& model_input(const LabeledExample& e, Masking masking);

struct RunRecord {
  std::size_t index = 0;
  std::uint64_t seed = 0;
  std::filesystem::path artifact;  // relative to the model directory
  TrainingLog log;
};

// What train() leaves behind: <dir>/model.json plus one artifact per run.
struct ModelRef {
  std::string model_identifier;
  std::string backend;
  Masking masking = Masking::kMask;
  std::string protocol = "repeated_holdout";  // or "kfold"
  std::string dataset_hash;
  TrainConfig config;
  std::vector<RunRecord> runs;
  std::filesystem::path dir;  // not serialized
};

void to_json(nlohmann::json& j, const ModelRef& m);
void from_json(const nlohmann::json& j, ModelRef& m);
ModelRef load_model_ref(const std::filesystem::path& dir_or_file);

// Trains one model per run seed (or per fold under k-fold) and writes the
// artifacts and logs under `out_dir`. On failure the logs of completed
// epochs are written before the error propagates.
ModelRef train(const std::vector<LabeledExample>& dataset, const SplitManifest& manifest, const TrainConfig& config,
               const ModelRegistry& registry, const std::filesystem::path& out_dir);

std::vector<std::unique_ptr<TrainedModel>> load_runs(const ModelRef& ref, const ModelRegistry& registry);

struct RunEval {
  std::uint64_t seed = 0;
  std::size_t n_test = 0;
  MacroMetrics metrics;
};

struct EvalReport {
  std::string model;
  Masking masking = Masking::kMask;
  std::string protocol = "repeated_holdout";
  std::vector<RunEval> runs;
  double mean_precision = 0, mean_recall = 0, mean_f1 = 0, mean_accuracy = 0;
  double var_precision = 0, var_recall = 0, var_f1 = 0, var_accuracy = 0;  // population variance
  std::size_t abstentions = 0;
  std::vector<std::string> notes;
};

void to_json(nlohmann::json& j, const EvalReport& r);

// Scores each run's model on its test ids (fold r under k-fold, the shared
// test split otherwise) with argmax labels, then aggregates.
// Throws Error(kInvalidArgument) on an empty test split or a run count that
// does not match the manifest.
EvalReport evaluate(std::vector<std::unique_ptr<TrainedModel>>& runs, const std::vector<LabeledExample>& dataset,
                    const SplitManifest& manifest, Masking masking, const std::string& model_name);

EvalReport aggregate_runs(std::vector<RunEval> runs);

struct ZeroShotOutcome {
  std::string post_id;
  std::optional<int> label;  // nullopt = abstained
  std::string note;
};

void to_json(nlohmann::json& j, const ZeroShotOutcome& o);

// Renders the zero-shot prompt, reads the 0/1 "rating" from the reply and
// retries once with the same prompt if it cannot. A second failure is an
// abstention, never a guessed label.
ZeroShotOutcome zero_shot_classify(const corpus::Post& post, std::string_view prompt_template,
                                   cascade::GenerativeBackend& backend);

// Zero-shot over the manifest's test ids; abstentions are excluded from the
// metrics and counted.
EvalReport zero_shot_evaluate(const std::vector<LabeledExample>& dataset, const SplitManifest& manifest,
                              std::string_view prompt_template, cascade::GenerativeBackend& backend,
                              std::vector<ZeroShotOutcome>* outcomes = nullptr);

}  // namespace ombudsman::classifier
