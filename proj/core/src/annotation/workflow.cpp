#include "ombudsman/annotation/workflow.hpp"

#include <algorithm>
#include <set>

#include "ombudsman/error.hpp"

using nlohmann::json;

namespace ombudsman::annotation {

void from_json(const json& j, Annotator& a) {
  a.id = j.at("id").get<std::string>();
  a.affiliation = parse_affiliation(j.at("affiliation").get<std::string>());
}

void to_json(json& j, const Annotator& a) { j = json{{"id", a.id}, {"affiliation", to_string(a.affiliation)}}; }

std::map<std::string, std::vector<std::string>> assign_tasks(const std::vector<std::string>& post_ids,
                                                             const std::vector<Annotator>& pool) {
  std::set<std::string> seen;
  std::map<Affiliation, std::vector<std::string>> by_aff;
  for (const auto& a : pool) {
    if (!seen.insert(a.id).second) throw Error(ErrorCode::kInvalidArgument, "annotator '" + a.id + "' listed twice");
    by_aff[a.affiliation].push_back(a.id);
  }
  for (auto aff : kPartisan) {
    if (by_aff[aff].empty()) {
      throw Error(ErrorCode::kInvalidArgument, "annotator pool has no " + std::string(to_string(aff)) + " annotator");
    }
  }
  std::map<std::string, std::vector<std::string>> out;
  std::size_t k = 0;
  for (const auto& post : post_ids) {
    if (out.contains(post)) throw Error(ErrorCode::kInvalidArgument, "post '" + post + "' listed twice");
    auto& slot = out[post];
    for (auto aff : kPartisan) {
      const auto& ids = by_aff[aff];
      slot.push_back(ids[k % ids.size()]);
    }
    ++k;
  }
  return out;
}

std::string_view to_string(HandoffPolicy p) {
  switch (p) {
    case HandoffPolicy::kUnanimous: return "unanimous";
    case HandoffPolicy::kAtLeastTwoPositive: return "at_least_two_positive";
    case HandoffPolicy::kMajority: return "majority";
  }
  return "?";
}

HandoffPolicy parse_handoff_policy(std::string_view s) {
  for (auto p : {HandoffPolicy::kUnanimous, HandoffPolicy::kAtLeastTwoPositive, HandoffPolicy::kMajority}) {
    if (to_string(p) == s) return p;
  }
  throw Error(ErrorCode::kConfig, "handoff policy must be unanimous|at_least_two_positive|majority");
}

FilterResult handoff_filter(const std::vector<AnnotationRecord>& records, HandoffPolicy policy) {
  struct Tally {
    std::size_t total = 0;
    std::size_t positive = 0;
  };
  std::map<std::string, Tally> tallies;
  for (const auto& r : records) {
    if (!is_partisan(r.affiliation)) continue;
    auto& t = tallies[r.post_id];
    ++t.total;
    if (r.label == Label::kPositive) ++t.positive;
  }
  FilterResult out;
  for (const auto& [post, t] : tallies) {
    if (policy == HandoffPolicy::kUnanimous) {
      if (t.total != 3) {
        out.warnings.push_back(post + ": expected 3 partisan records, found " + std::to_string(t.total));
        continue;
      }
      if (t.positive == 3) out.post_ids.push_back(post);
      continue;
    }
    if (t.total < 2) {
      out.warnings.push_back(post + ": needs at least 2 partisan records, found " + std::to_string(t.total));
      continue;
    }
    bool pass = policy == HandoffPolicy::kAtLeastTwoPositive ? t.positive >= 2 : 2 * t.positive > t.total;
    if (pass) out.post_ids.push_back(post);
  }
  return out;
}

FilterResult unanimity_filter(const std::vector<AnnotationRecord>& records) {
  return handoff_filter(records, HandoffPolicy::kUnanimous);
}

void to_json(json& j, const AdjudicationResult& r) {
  j = json{{"labels", r.labels}, {"pending", r.pending}, {"warnings", r.warnings}};
}

AdjudicationResult adjudicate(const std::vector<AnnotationRecord>& expert_records,
                              const std::vector<AnnotationRecord>& tiebreaker_records) {
  std::map<std::string, std::vector<const AnnotationRecord*>> experts;
  for (const auto& r : expert_records) {
    if (r.affiliation != Affiliation::kExpert) continue;
    experts[r.post_id].push_back(&r);
  }
  std::map<std::string, const AnnotationRecord*> tiebreak;
  for (const auto& r : tiebreaker_records) {
    if (r.affiliation != Affiliation::kTiebreaker) continue;
    auto& slot = tiebreak[r.post_id];
    if (slot == nullptr || std::tie(r.noted_at, r.annotator_id) < std::tie(slot->noted_at, slot->annotator_id)) {
      slot = &r;
    }
  }

  AdjudicationResult out;
  for (auto& [post, pair] : experts) {
    if (pair.size() != 2) {
      out.warnings.push_back(post + ": expected 2 expert records, found " + std::to_string(pair.size()));
      continue;
    }
    std::sort(pair.begin(), pair.end(),
              [](const auto* a, const auto* b) { return a->annotator_id < b->annotator_id; });
    AdjudicatedLabel label;
    label.post_id = post;
    label.source_annotators = {pair[0]->annotator_id, pair[1]->annotator_id};
    if (pair[0]->label == pair[1]->label) {
      label.final_label = pair[0]->label;
      label.method = Method::kExpertAgreement;
    } else {
      auto it = tiebreak.find(post);
      if (it == tiebreak.end()) {
        out.pending.push_back(post);
        continue;
      }
      // One expert sided with each label, so the tiebreaker's vote is the
      // majority of the three.
      label.final_label = it->second->label;
      label.method = Method::kTiebreak;
      label.source_annotators.push_back(it->second->annotator_id);
    }
    out.labels.push_back(std::move(label));
  }
  return out;
}

}  // namespace ombudsman::annotation
