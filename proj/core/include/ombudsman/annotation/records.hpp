#pragma once

#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "ombudsman/timestamp.hpp"

namespace ombudsman::annotation {

enum class Affiliation { kDemocrat, kRepublican, kIndependent, kExpert, kTiebreaker };
enum class Label { kPositive, kNegative };
enum class Method { kExpertAgreement, kTiebreak };

inline constexpr Affiliation kPartisan[] = {Affiliation::kDemocrat, Affiliation::kRepublican,
                                            Affiliation::kIndependent};

std::string_view to_string(Affiliation a);
std::string_view to_string(Label l);
std::string_view to_string(Method m);
Affiliation parse_affiliation(std::string_view s);
Label parse_label(std::string_view s);
Method parse_method(std::string_view s);
bool is_partisan(Affiliation a);

struct AnnotationRecord {
  std::string post_id;
  std::string annotator_id;
  Affiliation affiliation = Affiliation::kIndependent;
  Label label = Label::kNegative;
  std::vector<std::string> locations;
  UtcSeconds noted_at{};

  bool operator==(const AnnotationRecord&) const = default;
};

void to_json(nlohmann::json& j, const AnnotationRecord& r);
void from_json(const nlohmann::json& j, AnnotationRecord& r);

struct AdjudicatedLabel {
  std::string post_id;
  Label final_label = Label::kNegative;
  Method method = Method::kExpertAgreement;
  std::vector<std::string> source_annotators;

  bool operator==(const AdjudicatedLabel&) const = default;
};

void to_json(nlohmann::json& j, const AdjudicatedLabel& a);
void from_json(const nlohmann::json& j, AdjudicatedLabel& a);

std::vector<AnnotationRecord> load_records(const std::string& path);
void save_records(const std::string& path, const std::vector<AnnotationRecord>& records);
std::vector<AdjudicatedLabel> load_adjudicated(const std::string& path);
void save_adjudicated(const std::string& path, const std::vector<AdjudicatedLabel>& labels);

}  // namespace ombudsman::annotation
