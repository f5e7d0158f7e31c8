#include "ombudsman/cascade/rule_backends.hpp"

#include <algorithm>
#include <set>

#include <nlohmann/json.hpp>

#include "ombudsman/cascade/response_parser.hpp"
#include "ombudsman/error.hpp"
#include "ombudsman/masking/mask.hpp"
#include "ombudsman/text.hpp"

using nlohmann::json;

namespace ombudsman::cascade {

namespace {

std::set<std::string> word_tokens(std::string_view s) {
  std::set<std::string> out;
  std::string folded = text::casefold(s);
  std::string cur;
  for (char c : folded) {
    if (std::isalnum(static_cast<unsigned char>(c))) {
      cur.push_back(c);
    } else if (!cur.empty()) {
      out.insert(std::move(cur));
      cur.clear();
    }
  }
  if (!cur.empty()) out.insert(std::move(cur));
  return out;
}

// JSON value following the first line that starts with `marker`.
std::optional<json> section_after(std::string_view prompt, std::string_view marker) {
  std::string needle = "\n" + std::string(marker);
  auto pos = prompt.find(needle);
  if (pos == std::string_view::npos) {
    if (prompt.substr(0, marker.size()) != marker) return std::nullopt;
    pos = 0;
  }
  try {
    return extract_first_json(prompt.substr(pos + needle.size() - 1));
  } catch (const Error&) {
    return std::nullopt;
  }
}

}  // namespace

const std::vector<std::string>& RuleNliBackend::cue_stems() {
  static const std::vector<std::string> kStems = {
      "bridge", "overpass", "tunnel",  "railway", "derail", "crack",          "crumbl", "rust",
      "injur",  "collaps",  "unsafe",  "danger",  "worried", "infrastructure", "fail",
  };
  return kStems;
}

NliScores RuleNliBackend::infer(std::string_view premise, std::string_view /*hypothesis*/) {
  if (premise.find(kErrorSentinel) != std::string_view::npos) {
    throw Error(ErrorCode::kBackend, "rule-nli: forced failure");
  }
  auto folded = text::casefold(premise);
  int hits = 0;
  for (const auto& stem : cue_stems()) {
    if (folded.find(stem) != std::string::npos) ++hits;
  }
  NliScores s;
  s.entailment = std::min(0.95, 0.25 * hits);
  s.contradiction = (1.0 - s.entailment) / 2.0;
  s.neutral = 1.0 - s.entailment - s.contradiction;
  return s;
}

RuleGenerativeBackend::RuleGenerativeBackend() : ner_(std::make_shared<masking::GazetteerNer>()) {}

bool RuleGenerativeBackend::has_future_cue(std::string_view t) {
  auto tokens = word_tokens(t);
  for (const char* w : {"will", "gonna", "soon"}) {
    if (tokens.contains(w)) return true;
  }
  auto folded = text::casefold(t);
  for (const char* p : {"going to", "about to", "waiting to happen", "is next", "won't", "won\u2019t"}) {
    if (folded.find(p) != std::string::npos) return true;
  }
  return false;
}

std::string RuleGenerativeBackend::leaning(std::string_view t) {
  auto tokens = word_tokens(t);
  auto any = [&](std::initializer_list<const char*> ws) {
    return std::any_of(ws.begin(), ws.end(), [&](const char* w) { return tokens.contains(w); });
  };
  bool lib = any({"liberal", "liberals", "democrat", "democrats"});
  bool con = any({"conservative", "conservatives", "republican", "republicans"});
  if (lib && !con) return "liberal";
  if (con && !lib) return "conservative";
  return "bipartisan";
}

std::string RuleGenerativeBackend::generate(std::string_view prompt) {
  auto judge = [&](const std::string& body, std::vector<std::string>& locations) {
    for (auto& span : masking::extract_locations(body, *ner_)) locations.push_back(span.surface);
    return !locations.empty() && has_future_cue(body);
  };

  if (auto comments = section_after(prompt, "Comments:"); comments && comments->is_array()) {
    json out = json::array();
    for (const auto& c : *comments) {
      if (!c.is_object() || !c.contains("id")) continue;
      auto body = c.value("text", std::string{});
      if (body.find(kOmitSentinel) != std::string::npos) continue;
      std::vector<std::string> locations;
      bool concern = judge(body, locations);
      out.push_back({{"id", c["id"]}, {"concern", concern}, {"locations", locations}, {"leaning", leaning(body)}});
    }
    return "Sure, here is the JSON you asked for:\n```json\n" + out.dump(2) +
           "\n```\nLet me know if you need anything else.";
  }
  if (auto input = section_after(prompt, "Input:"); input && input->is_object()) {
    auto body = input->value("text", std::string{});
    std::vector<std::string> locations;
    json out = {{"id", input->value("id", json())}, {"rating", judge(body, locations) ? 1 : 0}};
    return "Rating:\n" + out.dump() + "\n(Assessment based on the content provided.)";
  }
  return "I cannot help with that.";
}

}  // namespace ombudsman::cascade
