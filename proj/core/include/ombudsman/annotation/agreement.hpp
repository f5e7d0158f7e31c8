#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "ombudsman/annotation/records.hpp"

namespace ombudsman::annotation {

// Nominal Krippendorff's alpha over units of category codes, one inner
// vector per item holding every rating it received. Items with a single
// rating are not pairable and are ignored. Returns nullopt when expected
// disagreement is zero (only one category ever used).
// Throws Error(kInvalidArgument) with fewer than 2 pairable items.
std::optional<double> krippendorff_alpha_nominal(const std::vector<std::vector<int>>& units);

// Cohen's kappa over aligned ratings of the same items. Returns nullopt
// when chance agreement is 1. Throws Error(kInvalidArgument) on empty or
// mismatched input.
std::optional<double> cohen_kappa(const std::vector<int>& a, const std::vector<int>& b);

// Kappa on the posts both record sets rate (by post_id).
std::optional<double> cohen_kappa(const std::vector<AnnotationRecord>& a, const std::vector<AnnotationRecord>& b);

struct AgreementReport {
  std::optional<double> krippendorff_alpha;
  // Keys: "democrat|independent", "democrat|republican",
  // "independent|republican" for the partisan roles, and
  // "expert:<a>|expert:<b>" for each pair of expert annotators.
  std::map<std::string, std::optional<double>> pairwise_kappa;
  std::size_t n_items = 0;   // posts pairable for alpha
  std::size_t n_raters = 0;  // distinct partisan annotators
};

void to_json(nlohmann::json& j, const AgreementReport& r);

// Alpha over partisan records grouped by post; tiebreaker records are never
// included. Statistics whose preconditions fail are reported as null.
AgreementReport compute_agreement(const std::vector<AnnotationRecord>& records);

}  // namespace ombudsman::annotation
