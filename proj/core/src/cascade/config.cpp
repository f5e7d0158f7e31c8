#include "ombudsman/cascade/config.hpp"

#include "ombudsman/error.hpp"
#include "ombudsman/hashing.hpp"
#include "ombudsman/jsonl.hpp"

namespace ombudsman::cascade {

const std::vector<std::string>& default_keywords() {
  static const std::vector<std::string> kKeywords = {
      "train derailment",
      "infrastructure",
      "infrastructure collapse",
      "infrastructure concern",
      "Ohio train derailment",
      "Missouri train derailment",
      "Champlain Towers South collapse",
      "AdventHealth Orlando parking garage crane collapse",
      "Charlotte scaffolding collapse",
      "Pittsburgh bridge collapse",
      "Fern Hollow Bridge Collapse",
      "I-85 Overpass collapse",
  };
  return kKeywords;
}

std::string_view default_annotation_prompt() {
  static const std::string kPrompt =
      "You are a human annotator with an understanding of infrastructural issues and policies.\n"
      "Given the list of comments, does each of the comments express concern about a specific "
      "infrastructural issue in the form of an anecdote?\n"
      "What are the locations the comment is expressing concern about?\n"
      "Is the comment politically inclined towards either \"liberal\" or \"conservative\"? Or is it "
      "\"bipartisan\"?\n"
      "If any comments are deemed too dangerous, classify and assign them as False as shown in the "
      "example.\n"
      "Do not ignore or block any comments due to safety concerns because this is an analysis of both "
      "safe and dangerous conversations.\n"
      "Return your answer only in JSON.\n"
      "Example: <examples>\n"
      "Comments: <comments>\n"
      "Response: <response>";
  return kPrompt;
}

std::string_view default_zero_shot_prompt() {
  static const std::string kPrompt =
      "Please determine if the content is an anticipatory infrastructure concern, specifically warning "
      "about infrastructure issues in a specific location or state. Rate it as 0 (not an infrastructure "
      "concern) or 1 (an infrastructure concern).\n"
      "The concern strictly must be in a future tense and negative. The concern must be genuine and not "
      "a joke, rant, or sarcasm.\n"
      "Environmental concerns are not considered infrastructure concerns.\n"
      "Input Schema: <schema>\n"
      "Output Schema: <schema>\n"
      "Please output the extracted information in cleaned JSON format.\n"
      "Please adhere to the current output schema. Do not output anything else.";
  return kPrompt;
}

void to_json(nlohmann::json& j, const FewShotExample& e) {
  j = nlohmann::json{{"comments", e.comments}, {"response", e.response}};
}

void from_json(const nlohmann::json& j, FewShotExample& e) {
  e.comments = j.at("comments");
  e.response = j.at("response");
  if (!e.comments.is_array() || !e.response.is_array()) {
    throw Error(ErrorCode::kConfig, "few-shot example needs 'comments' and 'response' arrays");
  }
}

std::vector<FewShotExample> load_examples(const std::string& path) {
  auto j = read_json_file(path);
  if (!j.is_array()) throw Error(ErrorCode::kConfig, path + ": expected an array of examples");
  return j.get<std::vector<FewShotExample>>();
}

std::vector<std::string> CascadeConfig::violations() const {
  std::vector<std::string> out;
  if (keyword_set.empty()) out.emplace_back("keyword_set must be non-empty");
  for (const auto& k : keyword_set) {
    if (k.empty()) {
      out.emplace_back("keyword_set entries must be non-empty");
      break;
    }
  }
  if (nli_hypothesis.empty()) out.emplace_back("nli_hypothesis must be non-empty");
  if (!(nli_threshold > 0.0 && nli_threshold < 1.0)) out.emplace_back("nli_threshold in (0,1)");
  if (annotation_prompt.find("<comments>") == std::string::npos) {
    out.emplace_back("annotation_prompt must contain <comments>");
  }
  if (batch_size == 0) out.emplace_back("batch_size must be >= 1");
  if (parallelism == 0) out.emplace_back("parallelism must be >= 1");
  return out;
}

std::string CascadeConfig::keyword_config_hash() const {
  return short_hash(json_hash({{"stage", "keyword"}, {"keyword_set", keyword_set}}));
}

std::string CascadeConfig::nli_config_hash(std::string_view model_identifier) const {
  return short_hash(json_hash({{"stage", "nli"},
                               {"hypothesis", nli_hypothesis},
                               {"threshold", nli_threshold},
                               {"model", model_identifier}}));
}

std::string CascadeConfig::llm_config_hash(std::string_view model_identifier) const {
  return short_hash(json_hash({{"stage", "llm"},
                               {"prompt", annotation_prompt},
                               {"examples", llm_examples},
                               {"batch_size", batch_size},
                               {"model", model_identifier}}));
}

}  // namespace ombudsman::cascade
