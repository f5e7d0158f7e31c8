#pragma once

#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

namespace ombudsman::cascade {

inline constexpr std::string_view kDefaultHypothesis = "There is a growing infrastructure concern somewhere.";
inline constexpr double kDefaultNliThreshold = 0.5;
inline constexpr std::size_t kDefaultBatchSize = 10;

// Incident keywords used both as platform search terms and as the first
// cascade filter.
const std::vector<std::string>& default_keywords();

// Annotation prompt with <examples>, <comments> and <response> placeholders.
std::string_view default_annotation_prompt();

// Zero-shot prompt with two <schema> placeholders (input, then output).
std::string_view default_zero_shot_prompt();

struct FewShotExample {
  nlohmann::json comments;  // [{"id": ..., "text": ...}]
  nlohmann::json response;  // [{"id": ..., "concern": ..., "locations": [...], "leaning": ...}]
};

void to_json(nlohmann::json& j, const FewShotExample& e);
void from_json(const nlohmann::json& j, FewShotExample& e);

std::vector<FewShotExample> load_examples(const std::string& path);

struct CascadeConfig {
  std::vector<std::string> keyword_set = default_keywords();
  std::string nli_hypothesis{kDefaultHypothesis};
  double nli_threshold = kDefaultNliThreshold;
  std::string annotation_prompt{default_annotation_prompt()};
  std::vector<FewShotExample> llm_examples;
  std::size_t batch_size = kDefaultBatchSize;
  std::size_t parallelism = 1;

  // Every violated constraint, empty when valid.
  std::vector<std::string> violations() const;

  // Hashes identifying the exact settings each stage ran with.
  std::string keyword_config_hash() const;
  std::string nli_config_hash(std::string_view model_identifier) const;
  std::string llm_config_hash(std::string_view model_identifier) const;
};

}  // namespace ombudsman::cascade
