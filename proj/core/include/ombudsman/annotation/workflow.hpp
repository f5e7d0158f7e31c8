#pragma once

#include <map>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "ombudsman/annotation/records.hpp"

namespace ombudsman::annotation {

struct Annotator {
  std::string id;
  Affiliation affiliation = Affiliation::kIndependent;
};

void from_json(const nlohmann::json& j, Annotator& a);
void to_json(nlohmann::json& j, const Annotator& a);

// post_id -> [democrat, republican, independent] annotator ids. Posts are
// dealt round-robin within each affiliation in pool order, so loads differ
// by at most one. Throws Error(kInvalidArgument) naming a missing
// affiliation.
std::map<std::string, std::vector<std::string>> assign_tasks(const std::vector<std::string>& post_ids,
                                                             const std::vector<Annotator>& pool);

enum class HandoffPolicy { kUnanimous, kAtLeastTwoPositive, kMajority };

std::string_view to_string(HandoffPolicy p);
HandoffPolicy parse_handoff_policy(std::string_view s);

struct FilterResult {
  std::vector<std::string> post_ids;  // sorted
  std::vector<std::string> warnings;
};

// Posts whose three partisan labels are all positive. Posts with a
// different number of partisan records are excluded with a warning.
FilterResult unanimity_filter(const std::vector<AnnotationRecord>& records);

// Expert-review candidates under a policy. kUnanimous is unanimity_filter;
// kAtLeastTwoPositive needs two positive partisan labels; kMajority needs
// more positive than negative partisan labels. The latter two accept any
// post with at least two partisan records.
FilterResult handoff_filter(const std::vector<AnnotationRecord>& records, HandoffPolicy policy);

struct AdjudicationResult {
  std::vector<AdjudicatedLabel> labels;  // by post_id
  std::vector<std::string> pending;      // expert disagreement, no tiebreaker yet
  std::vector<std::string> warnings;
};

void to_json(nlohmann::json& j, const AdjudicationResult& r);

// Expert agreement resolves a post directly. A disagreement consumes the
// earliest tiebreaker record for that post and takes the majority of the
// three; without one the post stays pending. Posts without exactly two
// expert records are skipped with a warning.
AdjudicationResult adjudicate(const std::vector<AnnotationRecord>& expert_records,
                              const std::vector<AnnotationRecord>& tiebreaker_records);

}  // namespace ombudsman::annotation
