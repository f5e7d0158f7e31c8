#include "ombudsman/annotation/records.hpp"

#include "ombudsman/error.hpp"
#include "ombudsman/jsonl.hpp"

using nlohmann::json;

namespace ombudsman::annotation {

std::string_view to_string(Affiliation a) {
  switch (a) {
    case Affiliation::kDemocrat: return "democrat";
    case Affiliation::kRepublican: return "republican";
    case Affiliation::kIndependent: return "independent";
    case Affiliation::kExpert: return "expert";
    case Affiliation::kTiebreaker: return "tiebreaker";
  }
  return "?";
}

std::string_view to_string(Label l) { return l == Label::kPositive ? "positive" : "negative"; }

std::string_view to_string(Method m) { return m == Method::kExpertAgreement ? "expert_agreement" : "tiebreak"; }

Affiliation parse_affiliation(std::string_view s) {
  for (auto a : {Affiliation::kDemocrat, Affiliation::kRepublican, Affiliation::kIndependent, Affiliation::kExpert,
                 Affiliation::kTiebreaker}) {
    if (to_string(a) == s) return a;
  }
  throw Error(ErrorCode::kParse, "unknown affiliation '" + std::string(s) + "'");
}

Label parse_label(std::string_view s) {
  if (s == "positive") return Label::kPositive;
  if (s == "negative") return Label::kNegative;
  throw Error(ErrorCode::kParse, "label must be positive or negative, got '" + std::string(s) + "'");
}

Method parse_method(std::string_view s) {
  if (s == "expert_agreement") return Method::kExpertAgreement;
  if (s == "tiebreak") return Method::kTiebreak;
  throw Error(ErrorCode::kParse, "unknown adjudication method '" + std::string(s) + "'");
}

bool is_partisan(Affiliation a) {
  return a == Affiliation::kDemocrat || a == Affiliation::kRepublican || a == Affiliation::kIndependent;
}

void to_json(json& j, const AnnotationRecord& r) {
  j = json{{"post_id", r.post_id},
           {"annotator_id", r.annotator_id},
           {"affiliation", to_string(r.affiliation)},
           {"label", to_string(r.label)},
           {"locations", r.locations},
           {"noted_at", format_utc(r.noted_at)}};
}

void from_json(const json& j, AnnotationRecord& r) {
  r.post_id = j.at("post_id").get<std::string>();
  r.annotator_id = j.at("annotator_id").get<std::string>();
  if (r.post_id.empty() || r.annotator_id.empty()) {
    throw Error(ErrorCode::kParse, "annotation record needs non-empty post_id and annotator_id");
  }
  r.affiliation = parse_affiliation(j.at("affiliation").get<std::string>());
  if (!j.contains("label") || !j["label"].is_string()) throw Error(ErrorCode::kParse, "annotation label is mandatory");
  r.label = parse_label(j["label"].get<std::string>());
  r.locations = j.value("locations", std::vector<std::string>{});
  r.noted_at = j.contains("noted_at") && !j["noted_at"].is_null()
                   ? parse_timestamp(j["noted_at"].get<std::string>())
                   : UtcSeconds{};
}

void to_json(json& j, const AdjudicatedLabel& a) {
  j = json{{"post_id", a.post_id},
           {"final_label", to_string(a.final_label)},
           {"method", to_string(a.method)},
           {"source_annotators", a.source_annotators}};
}

void from_json(const json& j, AdjudicatedLabel& a) {
  a.post_id = j.at("post_id").get<std::string>();
  a.final_label = parse_label(j.at("final_label").get<std::string>());
  a.method = parse_method(j.at("method").get<std::string>());
  a.source_annotators = j.at("source_annotators").get<std::vector<std::string>>();
}

std::vector<AnnotationRecord> load_records(const std::string& path) {
  std::vector<AnnotationRecord> out;
  for (const auto& row : read_jsonl(path)) out.push_back(row.get<AnnotationRecord>());
  return out;
}

void save_records(const std::string& path, const std::vector<AnnotationRecord>& records) {
  std::vector<json> rows(records.begin(), records.end());
  write_jsonl(path, rows);
}

std::vector<AdjudicatedLabel> load_adjudicated(const std::string& path) {
  std::vector<AdjudicatedLabel> out;
  for (const auto& row : read_jsonl(path)) out.push_back(row.get<AdjudicatedLabel>());
  return out;
}

void save_adjudicated(const std::string& path, const std::vector<AdjudicatedLabel>& labels) {
  std::vector<json> rows(labels.begin(), labels.end());
  write_jsonl(path, rows);
}

}  // namespace ombudsman::annotation
