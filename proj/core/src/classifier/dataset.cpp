#include "ombudsman/classifier/dataset.hpp"

#include <algorithm>

#include "ombudsman/error.hpp"
#include "ombudsman/hashing.hpp"
#include "ombudsman/jsonl.hpp"

using nlohmann::json;

namespace ombudsman::classifier {

void to_json(json& j, const LabeledExample& e) {
  j = json{{"post_id", e.post_id},
           {"text", e.text},
           {"masked_text", e.masked_text ? json(*e.masked_text) : json()},
           {"locations", e.locations},
           {"label", e.label},
           {"platform", corpus::to_string(e.platform)},
           {"partition", corpus::to_string(e.partition)}};
}

void from_json(const json& j, LabeledExample& e) {
  e.post_id = j.at("post_id").get<std::string>();
  e.text = j.at("text").get<std::string>();
  e.masked_text.reset();
  if (j.contains("masked_text") && !j["masked_text"].is_null()) e.masked_text = j["masked_text"].get<std::string>();
  e.locations = j.value("locations", std::vector<std::string>{});
  e.label = j.at("label").get<int>();
  if (e.label != 0 && e.label != 1) throw Error(ErrorCode::kParse, "label must be 0 or 1 for " + e.post_id);
  e.platform = corpus::parse_platform(j.value("platform", std::string{"reddit"}));
  e.partition = corpus::parse_partition(j.value("partition", std::string{"unassigned"}));
}

void to_json(json& j, const DatasetSummary& s) {
  j = json{{"n_positive", s.n_positive}, {"n_negative", s.n_negative}, {"total", s.total}};
}

DatasetSummary summarize(const std::vector<LabeledExample>& dataset) {
  DatasetSummary s;
  for (const auto& e : dataset) (e.label == 1 ? s.n_positive : s.n_negative)++;
  s.total = dataset.size();
  return s;
}

std::vector<LabeledExample> load_dataset(const std::filesystem::path& path) {
  std::vector<LabeledExample> out;
  for (const auto& row : read_jsonl(path)) out.push_back(row.get<LabeledExample>());
  return out;
}

void save_dataset(const std::filesystem::path& path, const std::vector<LabeledExample>& dataset) {
  std::vector<json> rows(dataset.begin(), dataset.end());
  write_jsonl(path, rows);
}

std::string dataset_hash(const std::vector<LabeledExample>& dataset) {
  std::vector<const LabeledExample*> sorted;
  for (const auto& e : dataset) sorted.push_back(&e);
  std::sort(sorted.begin(), sorted.end(), [](const auto* a, const auto* b) { return a->post_id < b->post_id; });
  json rows = json::array();
  for (const auto* e : sorted) {
    rows.push_back({e->post_id, e->text, e->masked_text ? json(*e->masked_text) : json(), e->label});
  }
  return json_hash(rows);
}

}  // namespace ombudsman::classifier
