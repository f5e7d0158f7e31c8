#include "ombudsman/cascade/stages.hpp"

#include <set>

#include <spdlog/spdlog.h>

#include "ombudsman/cascade/response_parser.hpp"
#include "ombudsman/error.hpp"
#include "ombudsman/text.hpp"

using nlohmann::json;

namespace ombudsman::cascade {

std::string_view to_string(Stage s) {
  switch (s) {
    case Stage::kKeyword: return "keyword";
    case Stage::kNli: return "nli";
    case Stage::kLlm: return "llm";
  }
  return "?";
}

std::string_view to_string(Verdict v) {
  switch (v) {
    case Verdict::kRetain: return "retain";
    case Verdict::kDrop: return "drop";
    case Verdict::kError: return "error";
  }
  return "?";
}

Stage parse_stage(std::string_view s) {
  for (auto st : kAllStages) {
    if (to_string(st) == s) return st;
  }
  throw Error(ErrorCode::kParse, "unknown stage '" + std::string(s) + "'");
}

Verdict parse_verdict(std::string_view s) {
  for (auto v : {Verdict::kRetain, Verdict::kDrop, Verdict::kError}) {
    if (to_string(v) == s) return v;
  }
  throw Error(ErrorCode::kParse, "unknown verdict '" + std::string(s) + "'");
}

void to_json(json& j, const StageDecision& d) {
  j = json{{"post_id", d.post_id},
           {"stage", to_string(d.stage)},
           {"verdict", to_string(d.verdict)},
           {"score", d.score ? json(*d.score) : json()},
           {"payload", d.payload},
           {"stage_config_hash", d.stage_config_hash}};
}

void from_json(const json& j, StageDecision& d) {
  d.post_id = j.at("post_id").get<std::string>();
  d.stage = parse_stage(j.at("stage").get<std::string>());
  d.verdict = parse_verdict(j.at("verdict").get<std::string>());
  d.score.reset();
  if (j.contains("score") && !j["score"].is_null()) d.score = j["score"].get<double>();
  d.payload = j.value("payload", json());
  d.stage_config_hash = j.value("stage_config_hash", std::string{});
}

namespace {

json error_payload(const std::string& message, bool retriable) {
  return {{"error", message}, {"retriable", retriable}};
}

bool is_retriable(const std::exception& e) {
  auto* err = dynamic_cast<const Error*>(&e);
  return err != nullptr && err->code() == ErrorCode::kRetriable;
}

}  // namespace

std::vector<std::string> matched_keywords(const corpus::Post& post, const std::vector<std::string>& keywords) {
  std::vector<std::string> haystacks{text::casefold(post.text)};
  if (post.platform == corpus::Platform::kYoutube && post.partition == corpus::Partition::kYtPolitics) {
    if (post.container_title) haystacks.push_back(text::casefold(*post.container_title));
    if (post.container_description) haystacks.push_back(text::casefold(*post.container_description));
  }
  std::vector<std::string> out;
  for (const auto& k : keywords) {
    auto needle = text::casefold(k);
    for (const auto& h : haystacks) {
      if (h.find(needle) != std::string::npos) {
        out.push_back(k);
        break;
      }
    }
  }
  return out;
}

StageDecision keyword_filter(const corpus::Post& post, const CascadeConfig& config) {
  StageDecision d;
  d.post_id = post.post_id;
  d.stage = Stage::kKeyword;
  d.stage_config_hash = config.keyword_config_hash();
  auto matched = matched_keywords(post, config.keyword_set);
  d.verdict = matched.empty() ? Verdict::kDrop : Verdict::kRetain;
  d.payload = {{"matched_keywords", matched}};
  return d;
}

StageDecision nli_stage(const corpus::Post& post, const CascadeConfig& config, NliBackend& backend) {
  StageDecision d;
  d.post_id = post.post_id;
  d.stage = Stage::kNli;
  d.stage_config_hash = config.nli_config_hash(backend.model_identifier());

  std::string premise = post.text;
  auto length = text::codepoint_length(premise);
  auto limit = backend.max_premise_chars();
  if (limit > 0 && length > limit) {
    premise = text::slice(premise, 0, limit);
    d.payload = {{"truncated_from", length}, {"truncated_to", limit}};
  }
  try {
    auto s = backend.infer(premise, config.nli_hypothesis);
    if (!is_valid(s)) throw Error(ErrorCode::kBackend, "NLI backend returned an invalid probability triple");
    d.score = s.entailment;
    d.verdict = s.entailment > config.nli_threshold ? Verdict::kRetain : Verdict::kDrop;
  } catch (const std::exception& e) {
    d.verdict = Verdict::kError;
    json p = error_payload(e.what(), is_retriable(e));
    if (d.payload.is_object()) p.update(d.payload);
    d.payload = std::move(p);
  }
  return d;
}

std::string render_annotation_prompt(const CascadeConfig& config, const std::vector<corpus::Post>& batch) {
  std::string examples;
  for (const auto& ex : config.llm_examples) {
    if (!examples.empty()) examples.push_back('\n');
    examples += json(ex).dump();
  }
  json comments = json::array();
  for (const auto& p : batch) comments.push_back({{"id", p.post_id}, {"text", p.text}});

  // Single left-to-right pass so placeholder text inside substituted content
  // is never expanded again.
  const std::string& tpl = config.annotation_prompt;
  std::string out;
  std::size_t i = 0;
  while (i < tpl.size()) {
    auto lt = tpl.find('<', i);
    if (lt == std::string::npos) {
      out.append(tpl, i);
      break;
    }
    out.append(tpl, i, lt - i);
    std::string_view rest(tpl.data() + lt, tpl.size() - lt);
    if (rest.starts_with("<examples>")) {
      out += examples;
      i = lt + 10;
    } else if (rest.starts_with("<comments>")) {
      out += comments.dump();
      i = lt + 10;
    } else if (rest.starts_with("<response>")) {
      i = lt + 10;
    } else {
      out.push_back('<');
      i = lt + 1;
    }
  }
  return out;
}

std::string render_zero_shot_prompt(std::string_view prompt_template, const corpus::Post& post) {
  static const std::string kSchemas[] = {
      json{{"id", "string"}, {"text", "string"}}.dump(),
      json{{"id", "string"}, {"rating", "0 or 1"}}.dump(),
  };
  std::string out;
  std::size_t filled = 0;
  std::size_t i = 0;
  constexpr std::string_view kPlaceholder = "<schema>";
  while (true) {
    auto pos = prompt_template.find(kPlaceholder, i);
    if (pos == std::string_view::npos || filled == 2) {
      out.append(prompt_template.substr(i));
      break;
    }
    out.append(prompt_template.substr(i, pos - i));
    out += kSchemas[filled++];
    i = pos + kPlaceholder.size();
  }
  out += "\nInput: ";
  out += json{{"id", post.post_id}, {"text", post.text}}.dump();
  return out;
}

namespace {

std::optional<bool> concern_of(const json& v) {
  if (v.is_boolean()) return v.get<bool>();
  if (v.is_number()) return v.get<double>() != 0.0;
  if (v.is_string()) {
    auto s = text::ascii_lower(v.get<std::string>());
    if (s == "true" || s == "yes" || s == "positive" || s == "1") return true;
    if (s == "false" || s == "no" || s == "negative" || s == "0") return false;
  }
  return std::nullopt;
}

// Normalizes one model record to the payload schema; nullopt if unusable.
std::optional<json> to_payload(const json& rec) {
  std::optional<bool> concern;
  for (const char* key : {"concern", "is_concern", "label"}) {
    if (rec.contains(key)) {
      concern = concern_of(rec[key]);
      break;
    }
  }
  if (!concern) return std::nullopt;
  json locations = json::array();
  if (rec.contains("locations") && rec["locations"].is_array()) {
    for (const auto& l : rec["locations"]) {
      if (l.is_string() && !l.get<std::string>().empty()) locations.push_back(l);
    }
  } else if (rec.contains("locations") && rec["locations"].is_string()) {
    locations.push_back(rec["locations"]);
  }
  json leaning;
  if (rec.contains("leaning") && rec["leaning"].is_string()) {
    auto l = text::ascii_lower(rec["leaning"].get<std::string>());
    if (l == "liberal" || l == "conservative" || l == "bipartisan") leaning = l;
  }
  return json{{"concern", *concern}, {"locations", locations}, {"leaning", leaning}};
}

}  // namespace

bool is_valid_llm_payload(const json& p) {
  if (!p.is_object() || p.size() != 3) return false;
  if (!p.contains("concern") || !p["concern"].is_boolean()) return false;
  if (!p.contains("locations") || !p["locations"].is_array()) return false;
  for (const auto& l : p["locations"]) {
    if (!l.is_string()) return false;
  }
  if (!p.contains("leaning")) return false;
  const auto& l = p["leaning"];
  return l.is_null() || (l.is_string() && (l == "liberal" || l == "conservative" || l == "bipartisan"));
}

std::vector<StageDecision> llm_annotate(const std::vector<corpus::Post>& batch, const CascadeConfig& config,
                                        GenerativeBackend& backend) {
  if (batch.size() > config.batch_size) {
    throw Error(ErrorCode::kInvalidArgument, "batch of " + std::to_string(batch.size()) +
                                                 " exceeds batch_size " + std::to_string(config.batch_size));
  }
  std::vector<std::string> ids;
  for (const auto& p : batch) ids.push_back(p.post_id);
  const auto prompt = render_annotation_prompt(config, batch);
  const auto hash = config.llm_config_hash(backend.model_identifier());

  std::map<std::string, json> records;
  std::string last_error = "no attempt made";
  bool retriable = false;
  for (int attempt = 0; attempt < 2; ++attempt) {
    try {
      auto raw = backend.generate(prompt);
      std::vector<std::string> missing;
      auto parsed = parse_llm_response_lenient(raw, ids, missing);
      for (auto& [id, rec] : parsed.items) {
        if (auto payload = to_payload(rec)) records[id] = std::move(*payload);
      }
      std::size_t unusable = 0;
      for (const auto& id : ids) unusable += records.contains(id) ? 0 : 1;
      if (unusable == 0) break;
      last_error = std::to_string(unusable) + " item(s) missing or malformed in model response";
      retriable = false;
    } catch (const std::exception& e) {
      last_error = e.what();
      retriable = is_retriable(e);
    }
    spdlog::warn("llm batch attempt {} incomplete: {}", attempt + 1, last_error);
  }

  std::vector<StageDecision> out;
  for (const auto& id : ids) {
    StageDecision d;
    d.post_id = id;
    d.stage = Stage::kLlm;
    d.stage_config_hash = hash;
    if (auto it = records.find(id); it != records.end()) {
      d.payload = it->second;
      d.verdict = it->second["concern"].get<bool>() ? Verdict::kRetain : Verdict::kDrop;
    } else {
      d.verdict = Verdict::kError;
      d.payload = error_payload(last_error, retriable);
    }
    out.push_back(std::move(d));
  }
  return out;
}

}  // namespace ombudsman::cascade
