#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "ombudsman/annotation/records.hpp"
#include "ombudsman/classifier/metrics.hpp"
#include "ombudsman/classifier/model.hpp"
#include "ombudsman/corpus/post.hpp"
#include "ombudsman/masking/ner.hpp"
#include "ombudsman/timestamp.hpp"

namespace ombudsman::scanner {

struct Prediction {
  std::string post_id;
  int label = 0;
  double score = 0;  // positive-class probability
};

// A post predicted positive, enriched for routing and triage.
struct FlaggedItem {
  std::string post_id;
  double score = 0;
  std::vector<std::string> locations;
  std::vector<masking::EntitySpan> location_spans;  // code points into text
  std::string text;
  corpus::Platform platform = corpus::Platform::kReddit;
  corpus::Partition partition = corpus::Partition::kUnassigned;
};

struct ScanError {
  std::string post_id;
  std::string message;
};

// Metrics measured on the human-labeled audit sample, not extrapolated.
struct EstimatedMetrics {
  double precision = 0;
  double recall = 0;
  double f1 = 0;
  double accuracy = 0;
  classifier::Confusion confusion;
  std::size_t n_audit_positive = 0;
  std::size_t n_audit_negative = 0;
};

struct ScanReport {
  std::string id;
  std::string corpus_hash;
  std::string model_ref;
  std::string model_identifier;
  classifier::Masking masking = classifier::Masking::kMask;
  std::size_t n_positive = 0;
  std::size_t n_negative = 0;
  std::vector<Prediction> predictions;  // corpus order
  std::vector<FlaggedItem> flagged;     // score desc, post_id asc
  std::vector<ScanError> errors;
  std::vector<std::string> audit_pos_sample;
  std::vector<std::string> audit_neg_sample;
  std::optional<std::uint64_t> audit_seed;
  std::optional<EstimatedMetrics> estimated_metrics;
  UtcSeconds created_at{};
  std::vector<std::string> notes;
};

void to_json(nlohmann::json& j, const FlaggedItem& f);
void from_json(const nlohmann::json& j, FlaggedItem& f);
void to_json(nlohmann::json& j, const ScanReport& r);
void from_json(const nlohmann::json& j, ScanReport& r);

// Hash over (post_id, text) pairs in corpus order.
std::string corpus_hash(const std::vector<corpus::Post>& corpus);

struct ScanOptions {
  std::string model_ref;         // recorded in the report
  std::string model_identifier;  // recorded in the report
  classifier::Masking masking = classifier::Masking::kMask;
  UtcSeconds created_at{};
};

// Classifies every post once (positive iff score > 0.5). Under kMask the
// model sees the masked text. A post whose classification throws becomes a
// scan error and is left out of the counts. Throws Error(kInvalidArgument)
// on duplicate post ids. The report id derives from the corpus hash and the
// model reference.
ScanReport scan(const std::vector<corpus::Post>& corpus, classifier::TrainedModel& model, masking::NerBackend& ner,
                const ScanOptions& options);

// Draws n_pos predicted positives and n_neg predicted negatives uniformly
// without replacement (ids sorted before sampling). Replaces any earlier
// sample and estimate. Throws Error(kInvalidArgument) naming the available
// counts when a request is too large.
void sample_audit(ScanReport& report, std::size_t n_pos, std::size_t n_neg, std::uint64_t seed);

// Macro metrics of the predictions against human labels over the union of
// both audit samples. Throws Error(kInvalidArgument) listing unlabeled
// audit items. Labels for other posts are ignored.
void estimate_wild_metrics(ScanReport& report, const std::map<std::string, int>& audit_labels);

// Audit labels from annotation records: the earliest record per post.
std::map<std::string, int> labels_from_records(const std::vector<annotation::AnnotationRecord>& records);

// post_id,score,locations,text with ';'-joined locations.
std::string flagged_csv(const ScanReport& report);

// One JSON file per report: <dir>/<id>.json.
class ReportStore {
 public:
  explicit ReportStore(std::filesystem::path dir);
  void put(const ScanReport& report);
  // Throws Error(kNotFound).
  ScanReport get(const std::string& id) const;
  bool contains(const std::string& id) const;
  std::vector<std::string> ids() const;  // sorted
  const std::filesystem::path& dir() const { return dir_; }

 private:
  std::filesystem::path dir_;
};

}  // namespace ombudsman::scanner
