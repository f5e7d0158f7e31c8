#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

namespace ombudsman::classifier {

enum class Masking { kMask, kNoMask };

std::string_view to_string(Masking m);
Masking parse_masking(std::string_view s);

struct OptimizerConfig {
  std::string name = "adam";
  double learning_rate = 2e-5;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
  double weight_decay = 0.0;
};

struct TrainConfig {
  std::string model_identifier = "bow-logreg";
  Masking masking = Masking::kMask;
  std::size_t epochs = 5;
  OptimizerConfig optimizer;
  std::size_t batch_size = 16;
  std::size_t max_length = 512;  // tokens fed to the model per text
  std::uint64_t seed = 0;
  nlohmann::json backend_options = nlohmann::json::object();

  std::vector<std::string> violations() const;
};

void to_json(nlohmann::json& j, const TrainConfig& c);
// Strict: unknown keys throw Error(kConfig) naming every one.
void from_json(const nlohmann::json& j, TrainConfig& c);
std::vector<std::string> train_config_violations(const nlohmann::json& j, const std::string& where);

struct TrainingLog {
  std::vector<double> epoch_loss;
  std::string status = "ok";  // or the failure message
};

void to_json(nlohmann::json& j, const TrainingLog& l);
void from_json(const nlohmann::json& j, TrainingLog& l);

class TrainedModel {
 public:
  virtual ~TrainedModel() = default;
  // Probability of the positive class.
  virtual double predict_proba(std::string_view text) = 0;
  virtual std::vector<double> predict_batch(const std::vector<std::string>& texts);
  // Self-describing JSON that the owning backend's load() accepts.
  virtual nlohmann::json artifact() const = 0;
};

class ModelBackend {
 public:
  virtual ~ModelBackend() = default;
  virtual std::string name() const = 0;
  virtual bool supports(std::string_view model_identifier) const = 0;
  // Appends one loss per completed epoch to `log`; on failure the log keeps
  // what was completed and the error propagates.
  virtual std::unique_ptr<TrainedModel> train(const std::vector<std::string>& texts, const std::vector<int>& labels,
                                              const TrainConfig& config, TrainingLog& log) = 0;
  virtual std::unique_ptr<TrainedModel> load(const nlohmann::json& artifact) = 0;
};

// Backends keyed by model_identifier. The defaults are "bow-logreg",
// "mock:constant-negative", "mock:constant-positive", "mock:rule" and
// "external:<name>" (configured through backend_options.command).
class ModelRegistry {
 public:
  static ModelRegistry with_defaults();
  void add(std::shared_ptr<ModelBackend> backend);
  // Throws Error(kConfig) when no backend supports the identifier.
  ModelBackend& for_identifier(std::string_view model_identifier) const;
  ModelBackend& by_name(std::string_view name) const;

 private:
  std::vector<std::shared_ptr<ModelBackend>> backends_;
};

// Hashed bag of unigrams and bigrams over casefolded word tokens, trained as
// a logistic regression with minibatch Adam.
class BowLogregBackend final : public ModelBackend {
 public:
  static constexpr std::size_t kBuckets = 1u << 18;
  std::string name() const override { return "bow-logreg"; }
  bool supports(std::string_view id) const override;
  std::unique_ptr<TrainedModel> train(const std::vector<std::string>& texts, const std::vector<int>& labels,
                                      const TrainConfig& config, TrainingLog& log) override;
  std::unique_ptr<TrainedModel> load(const nlohmann::json& artifact) override;

  // Token stream the model sees, truncated to max_length tokens.
  static std::vector<std::string> tokenize(std::string_view text, std::size_t max_length);
};

// Deterministic stand-ins. "mock:rule" flags texts with a location (a
// gazetteer hit or a <LOCATION> mask token) and a future-tense cue; its score is 0.55 + 0.1 * min(4, cues)
// when flagged and 0.45 - 0.1 * min(4, cues) otherwise, where cues counts
// the rule NLI backend's cue stems.
class MockModelBackend final : public ModelBackend {
 public:
  std::string name() const override { return "mock"; }
  bool supports(std::string_view id) const override;
  std::unique_ptr<TrainedModel> train(const std::vector<std::string>& texts, const std::vector<int>& labels,
                                      const TrainConfig& config, TrainingLog& log) override;
  std::unique_ptr<TrainedModel> load(const nlohmann::json& artifact) override;
};

// Returns the gold label of every text it was built with; unknown texts
// score 0.
class OracleModel final : public TrainedModel {
 public:
  explicit OracleModel(std::map<std::string, int> gold_by_text) : gold_(std::move(gold_by_text)) {}
  double predict_proba(std::string_view text) override;
  nlohmann::json artifact() const override;

 private:
  std::map<std::string, int> gold_;
};

// Delegates to an external program:
//   <command> train --config <cfg.json> --train <train.jsonl> --out <dir>
//   <command> predict --artifact <dir> --in <texts.jsonl> --out <scores.jsonl>
// train writes <dir>/log.json ({"epoch_loss": [...]}); predict writes one
// {"score": p} per input line.
class ExternalCommandBackend final : public ModelBackend {
 public:
  explicit ExternalCommandBackend(std::filesystem::path work_dir = std::filesystem::temp_directory_path());
  std::string name() const override { return "external"; }
  bool supports(std::string_view id) const override;
  std::unique_ptr<TrainedModel> train(const std::vector<std::string>& texts, const std::vector<int>& labels,
                                      const TrainConfig& config, TrainingLog& log) override;
  std::unique_ptr<TrainedModel> load(const nlohmann::json& artifact) override;

 private:
  std::filesystem::path work_dir_;
};

}  // namespace ombudsman::classifier
