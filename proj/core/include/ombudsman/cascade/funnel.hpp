#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "ombudsman/cascade/backend.hpp"
#include "ombudsman/cascade/config.hpp"
#include "ombudsman/cascade/stages.hpp"
#include "ombudsman/corpus/post.hpp"

namespace ombudsman::cascade {

struct StageCounts {
  std::size_t in = 0;
  std::size_t retain = 0;
  std::size_t drop = 0;
  std::size_t error = 0;

  bool operator==(const StageCounts&) const = default;
};

struct StageReport {
  Stage stage = Stage::kKeyword;
  std::string config_hash;
  StageCounts total;
  std::map<corpus::Partition, StageCounts> by_partition;  // every partition present
  std::map<corpus::Platform, StageCounts> by_platform;    // every platform present

  bool operator==(const StageReport&) const = default;
};

struct FunnelReport {
  std::size_t corpus_size = 0;
  std::vector<StageReport> stages;  // keyword, nli, llm

  bool operator==(const FunnelReport&) const = default;
};

void to_json(nlohmann::json& j, const StageCounts& c);
void from_json(const nlohmann::json& j, StageCounts& c);
void to_json(nlohmann::json& j, const FunnelReport& r);
void from_json(const nlohmann::json& j, FunnelReport& r);

struct CascadeResult {
  FunnelReport funnel;
  std::vector<StageDecision> decisions;  // stage order, then corpus order
  std::vector<corpus::Post> retained;    // survivors of all three stages, matched_keywords filled
};

// Keyword -> NLI -> LLM, each stage seeing only the previous stage's
// retained posts. Work within a stage runs on config.parallelism threads;
// outputs are ordered as if sequential.
CascadeResult run_cascade(const std::vector<corpus::Post>& corpus, const CascadeConfig& config,
                          const Backends& backends);

// Writes decisions.jsonl, funnel.json and retained.jsonl into `dir`.
void write_cascade_outputs(const std::filesystem::path& dir, const CascadeResult& result);

}  // namespace ombudsman::cascade
