#include "ombudsman/annotation/export.hpp"

#include <unordered_map>

#include "ombudsman/error.hpp"

namespace ombudsman::annotation {

std::vector<classifier::LabeledExample> export_labeled(const std::vector<AdjudicatedLabel>& adjudicated,
                                                       const std::vector<corpus::Post>& corpus) {
  std::unordered_map<std::string, const corpus::Post*> by_id;
  for (const auto& p : corpus) by_id.emplace(p.post_id, &p);

  std::vector<std::string> dangling;
  std::vector<classifier::LabeledExample> out;
  for (const auto& a : adjudicated) {
    auto it = by_id.find(a.post_id);
    if (it == by_id.end()) {
      dangling.push_back(a.post_id);
      continue;
    }
    classifier::LabeledExample e;
    e.post_id = a.post_id;
    e.text = it->second->text;
    e.label = a.final_label == Label::kPositive ? 1 : 0;
    e.platform = it->second->platform;
    e.partition = it->second->partition;
    out.push_back(std::move(e));
  }
  if (!dangling.empty()) {
    throw Error(ErrorCode::kNotFound,
                std::to_string(dangling.size()) + " adjudicated post(s) not found in the corpus", dangling);
  }
  return out;
}

}  // namespace ombudsman::annotation
