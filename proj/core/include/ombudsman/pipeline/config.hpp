#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "ombudsman/annotation/workflow.hpp"
#include "ombudsman/cascade/config.hpp"
#include "ombudsman/classifier/model.hpp"
#include "ombudsman/corpus/ingest.hpp"
#include "ombudsman/corpus/source.hpp"
#include "ombudsman/masking/frequency.hpp"
#include "ombudsman/timestamp.hpp"

namespace ombudsman::pipeline {

// Which posts go to the two experts: every cascade survivor, or only the
// partisan hand-off candidates.
enum class ExpertReview { kAll, kHandoffCandidates };

struct IngestSection {
  std::string author_salt;
  std::vector<corpus::SourceSpec> sources;  // archive paths already resolved
  std::size_t wild_sample = 0;
};

struct AnnotationSection {
  std::filesystem::path records;
  std::optional<std::filesystem::path> pool;
  annotation::HandoffPolicy handoff_policy = annotation::HandoffPolicy::kAtLeastTwoPositive;
  ExpertReview expert_review = ExpertReview::kAll;
};

struct MaskingSection {
  nlohmann::json ner = {{"type", "gazetteer"}};
  std::string mask_token = "<LOCATION>";
  std::optional<std::filesystem::path> stoplist;
  masking::FrequencyMode frequency_mode = masking::FrequencyMode::kOccurrences;
};

struct TrainSection {
  std::string protocol = "repeated_holdout";  // or "kfold"
  double train_ratio = 0.7;
  std::size_t runs = 5;
  std::size_t k = 5;
  std::vector<classifier::TrainConfig> configs;
};

struct ScanSection {
  std::optional<std::filesystem::path> corpus;  // default: the reserved wild set
  std::string model_identifier;                 // default: first train config
  classifier::Masking masking = classifier::Masking::kMask;
  std::size_t run = 0;
  std::size_t audit_n_pos = 0;
  std::size_t audit_n_neg = 0;
  std::optional<std::filesystem::path> audit_labels;
};

struct PipelineConfig {
  std::filesystem::path base_dir;  // relative paths resolve against this
  std::filesystem::path output_dir;
  std::uint64_t seed = 0;
  std::optional<UtcSeconds> run_timestamp;
  IngestSection ingest;
  cascade::CascadeConfig cascade;
  std::optional<std::filesystem::path> cascade_examples;
  std::optional<std::filesystem::path> cascade_prompt;
  nlohmann::json backends;
  AnnotationSection annotation;
  MaskingSection masking;
  TrainSection train;
  ScanSection scan;
  nlohmann::json raw;  // the document as loaded

  std::filesystem::path resolve(const std::string& p) const;
};

inline constexpr std::array<std::string_view, 7> kSections = {"ingest",  "cascade", "backends", "annotation",
                                                              "masking", "train",   "scan"};

// Every problem with the document: unknown keys, wrong types, out-of-range
// values, missing files and unset credential variables.
std::vector<std::string> config_violations(const nlohmann::json& doc, const std::filesystem::path& base_dir,
                                           const corpus::EnvLookup& env = {});

// Throws Error(kConfig) carrying the full violation list.
PipelineConfig parse_config(const nlohmann::json& doc, const std::filesystem::path& base_dir,
                            const corpus::EnvLookup& env = {});

// Reads only the named top-level sections (plus output_dir, seed and
// run_timestamp); the others are checked for unknown top-level keys only.
PipelineConfig parse_sections(const nlohmann::json& doc, const std::filesystem::path& base_dir,
                              const std::vector<std::string>& sections, const corpus::EnvLookup& env = {});

// Missing file -> kNotFound; bad JSON -> kParse.
nlohmann::json load_config_document(const std::filesystem::path& path);
PipelineConfig load_sections(const std::filesystem::path& path, const std::vector<std::string>& sections,
                             const corpus::EnvLookup& env = {});

// Loads, parses and checks that the output directory is writable.
// Errors: missing file -> kNotFound; bad JSON -> kParse; otherwise kConfig.
PipelineConfig validate_config(const std::filesystem::path& path, const corpus::EnvLookup& env = {});

}  // namespace ombudsman::pipeline
