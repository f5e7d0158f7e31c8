#pragma once

#include <array>
#include <filesystem>
#include <map>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "ombudsman/corpus/source.hpp"
#include "ombudsman/pipeline/config.hpp"

namespace ombudsman::pipeline {

// Stage order of a full run.
inline constexpr std::array<std::string_view, 6> kStages = {"ingest", "cascade", "annotate",
                                                            "adjudicate", "train", "scan"};

struct StageRecord {
  std::string name;
  std::string inputs_hash;
  std::string outputs_hash;
  std::map<std::string, std::string> outputs;  // path relative to output_dir -> sha256
  double duration_seconds = 0;
  bool skipped = false;
  nlohmann::json summary = nlohmann::json::object();
};

struct RunManifest {
  std::uint64_t seed = 0;
  std::vector<StageRecord> stages;  // stage order

  const StageRecord* find(std::string_view stage) const;
};

void to_json(nlohmann::json& j, const StageRecord& r);
void from_json(const nlohmann::json& j, StageRecord& r);
void to_json(nlohmann::json& j, const RunManifest& m);
void from_json(const nlohmann::json& j, RunManifest& m);

std::filesystem::path manifest_path(const PipelineConfig& config);

// "a,b,c" -> stage names in run order. Empty -> all stages. Throws
// Error(kInvalidArgument) naming unknown stages.
std::vector<std::string> parse_stage_list(std::string_view csv);

struct RunOptions {
  std::vector<std::string> stages;  // empty = all
  bool force = false;               // rerun even when inputs are unchanged
  corpus::EnvLookup env;
  std::shared_ptr<corpus::Fetcher> fetcher;
};

// Runs the requested stages in order and rewrites run_manifest.json after
// each one. A stage whose inputs hash matches the previous manifest and
// whose outputs are intact is skipped. Sub-seeds are derived from the global
// seed by stage name.
//
// Errors: an upstream artifact missing for a requested stage ->
// Error(kMissingArtifact) naming the stage to run first (also in details).
RunManifest run_pipeline(const PipelineConfig& config, const RunOptions& options = {});

}  // namespace ombudsman::pipeline
