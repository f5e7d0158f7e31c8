#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "ombudsman/cascade/backend.hpp"
#include "ombudsman/cascade/config.hpp"
#include "ombudsman/corpus/post.hpp"

namespace ombudsman::cascade {

enum class Stage { kKeyword, kNli, kLlm };
enum class Verdict { kRetain, kDrop, kError };

inline constexpr Stage kAllStages[] = {Stage::kKeyword, Stage::kNli, Stage::kLlm};

std::string_view to_string(Stage s);
std::string_view to_string(Verdict v);
Stage parse_stage(std::string_view s);
Verdict parse_verdict(std::string_view s);

// payload by stage:
//   keyword: {"matched_keywords": [...]}
//   nli:     null, or {"truncated_from": n, "truncated_to": m}
//   llm:     {"concern": bool, "locations": [...], "leaning": "liberal"|"conservative"|"bipartisan"|null}
//   error:   {"error": message, "retriable": bool}
struct StageDecision {
  std::string post_id;
  Stage stage = Stage::kKeyword;
  Verdict verdict = Verdict::kDrop;
  std::optional<double> score;
  nlohmann::json payload;
  std::string stage_config_hash;

  bool operator==(const StageDecision&) const = default;
};

void to_json(nlohmann::json& j, const StageDecision& d);
void from_json(const nlohmann::json& j, StageDecision& d);

// Keywords (in keyword_set order) found as casefolded substrings of the
// text, or of the container title/description for yt_politics comments.
std::vector<std::string> matched_keywords(const corpus::Post& post, const std::vector<std::string>& keywords);

StageDecision keyword_filter(const corpus::Post& post, const CascadeConfig& config);

StageDecision nli_stage(const corpus::Post& post, const CascadeConfig& config, NliBackend& backend);

// The annotation prompt with exemplars and the batch filled in.
std::string render_annotation_prompt(const CascadeConfig& config, const std::vector<corpus::Post>& batch);

// The zero-shot prompt with its input/output schemas filled in and the post
// appended as "Input: {...}".
std::string render_zero_shot_prompt(std::string_view prompt_template, const corpus::Post& post);

// One decision per post, in batch order. An unusable reply is retried once
// with the identical prompt; items still missing afterwards get an error
// verdict. Throws Error(kInvalidArgument) if the batch exceeds batch_size.
std::vector<StageDecision> llm_annotate(const std::vector<corpus::Post>& batch, const CascadeConfig& config,
                                        GenerativeBackend& backend);

// Validates an llm payload against the documented schema.
bool is_valid_llm_payload(const nlohmann::json& payload);

}  // namespace ombudsman::cascade
