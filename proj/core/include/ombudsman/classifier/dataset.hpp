#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "ombudsman/corpus/post.hpp"

namespace ombudsman::classifier {

// label: 1 = anticipatory infrastructure concern, 0 = not.
struct LabeledExample {
  std::string post_id;
  std::string text;
  std::optional<std::string> masked_text;
  std::vector<std::string> locations;  // surfaces found when masking
  int label = 0;
  corpus::Platform platform = corpus::Platform::kReddit;
  corpus::Partition partition = corpus::Partition::kUnassigned;

  bool operator==(const LabeledExample&) const = default;
};

void to_json(nlohmann::json& j, const LabeledExample& e);
void from_json(const nlohmann::json& j, LabeledExample& e);

struct DatasetSummary {
  std::size_t n_positive = 0;
  std::size_t n_negative = 0;
  std::size_t total = 0;
};

void to_json(nlohmann::json& j, const DatasetSummary& s);
DatasetSummary summarize(const std::vector<LabeledExample>& dataset);

std::vector<LabeledExample> load_dataset(const std::filesystem::path& path);
void save_dataset(const std::filesystem::path& path, const std::vector<LabeledExample>& dataset);

// Hash of (post_id, text, masked_text, label) over the dataset in id order.
std::string dataset_hash(const std::vector<LabeledExample>& dataset);

}  // namespace ombudsman::classifier
