#include "ombudsman/masking/ner.hpp"

#include <algorithm>
#include <optional>
#include <set>

#include <unicode/uchar.h>
#include <unicode/utf8.h>

#include <httplib.h>

#include "gazetteer_data.hpp"
#include "ombudsman/error.hpp"
#include "ombudsman/text.hpp"

using nlohmann::json;

namespace ombudsman::masking {

std::string_view to_string(EntityCategory c) {
  switch (c) {
    case EntityCategory::kLocation: return "location";
    case EntityCategory::kGeopolitical: return "geopolitical";
    case EntityCategory::kOther: return "other";
  }
  return "other";
}

void to_json(json& j, const EntitySpan& s) {
  j = json{{"start", s.start}, {"end", s.end}, {"surface", s.surface}, {"category", to_string(s.category)}};
}

void from_json(const json& j, EntitySpan& s) {
  s.start = j.at("start").get<std::size_t>();
  s.end = j.at("end").get<std::size_t>();
  s.surface = j.value("surface", std::string{});
  auto c = j.value("category", std::string{"location"});
  s.category = c == "geopolitical" ? EntityCategory::kGeopolitical
               : c == "location"   ? EntityCategory::kLocation
                                   : EntityCategory::kOther;
}

namespace {

struct Token {
  std::size_t begin;  // bytes
  std::size_t end;
  std::string_view text;
};

// Letters, digits and combining marks form words; all else separates.
bool is_word_char(UChar32 c) {
  if (c < 0x80) return (c >= 'A' && c <= 'Z') || (c >= 'a' && c <= 'z') || (c >= '0' && c <= '9');
  return u_isalnum(c) || (U_GET_GC_MASK(c) & U_GC_M_MASK) != 0;
}

std::vector<Token> tokenize(std::string_view s) {
  std::vector<Token> out;
  const auto* bytes = reinterpret_cast<const uint8_t*>(s.data());
  const auto n = static_cast<int32_t>(s.size());
  int32_t i = 0;
  std::optional<int32_t> start;
  while (i < n) {
    int32_t at = i;
    UChar32 c = 0;
    U8_NEXT(bytes, i, n, c);
    bool word = c >= 0 && is_word_char(c);
    if (word && !start) start = at;
    if (!word && start) {
      out.push_back({std::size_t(*start), std::size_t(at), s.substr(*start, at - *start)});
      start.reset();
    }
  }
  if (start) out.push_back({std::size_t(*start), s.size(), s.substr(*start)});
  return out;
}

// Separators allowed between the words of a multi-word name: white space,
// optionally preceded by '.', or a single '-' or '.'.
bool is_name_separator(std::string_view gap) {
  if (gap == "-" || gap == ".") return true;
  if (gap.empty()) return false;
  std::size_t i = gap.front() == '.' ? 1 : 0;
  if (i == gap.size()) return false;
  for (; i < gap.size(); ++i) {
    if (!text::is_ascii_space(gap[i])) return false;
  }
  return true;
}

bool is_whitespace_gap(std::string_view gap) {
  if (gap.empty()) return false;
  return std::all_of(gap.begin(), gap.end(), [](char c) { return text::is_ascii_space(c); });
}

std::string ascii_upper(std::string_view s) {
  std::string out(s);
  for (auto& c : out) {
    if (c >= 'a' && c <= 'z') c = static_cast<char>(c - 'a' + 'A');
  }
  return out;
}

bool token_matches(std::string_view actual, const std::string& expected) {
  return actual == expected || (actual.size() > 1 && actual == ascii_upper(expected));
}

bool is_capitalized(std::string_view t) { return !t.empty() && t.front() >= 'A' && t.front() <= 'Z'; }

bool is_non_name(std::string_view t) {
  for (auto w : gazetteer::kNonNameWords) {
    if (t == w || t == ascii_upper(w)) return true;
  }
  return false;
}

bool is_water_word(std::string_view t) {
  auto lower = text::ascii_lower(t);
  for (auto w : gazetteer::kWaterWords) {
    if (lower == w) return true;
  }
  return false;
}

// Maps byte offsets on code-point boundaries to code-point offsets.
class OffsetMap {
 public:
  explicit OffsetMap(std::string_view s) : cp_(s.size() + 1, 0) {
    std::size_t cp = 0;
    for (std::size_t i = 0; i < s.size(); ++i) {
      cp_[i] = cp;
      if ((static_cast<unsigned char>(s[i]) & 0xC0) != 0x80) ++cp;
    }
    cp_[s.size()] = cp;
  }
  std::size_t operator()(std::size_t byte) const { return cp_[byte]; }

 private:
  std::vector<std::size_t> cp_;
};

}  // namespace

GazetteerNer::GazetteerNer() {
  std::set<std::string> seen;
  auto add = [&](std::string_view name, EntityCategory cat) {
    if (!seen.insert(std::string(name)).second) return;
    Phrase p{{}, cat};
    for (const auto& t : tokenize(name)) p.tokens.emplace_back(t.text);
    if (!p.tokens.empty()) phrases_.push_back(std::move(p));
  };
  for (auto s : gazetteer::kStates) add(s, EntityCategory::kGeopolitical);
  for (auto s : gazetteer::kStateCodes) add(s, EntityCategory::kGeopolitical);
  for (auto s : gazetteer::kOtherGeopolitical) add(s, EntityCategory::kGeopolitical);
  for (auto s : gazetteer::kCities) add(s, EntityCategory::kGeopolitical);
  for (auto s : gazetteer::kRegions) add(s, EntityCategory::kLocation);
  for (auto s : gazetteer::kRivers) add(s, EntityCategory::kLocation);
  std::stable_sort(phrases_.begin(), phrases_.end(),
                   [](const Phrase& a, const Phrase& b) { return a.tokens.size() > b.tokens.size(); });
}

std::string GazetteerNer::identifier() const { return std::string(kName) + "@" + std::string(kVersion); }

std::vector<EntitySpan> GazetteerNer::detect(std::string_view text) {
  auto tokens = tokenize(text);
  OffsetMap cp(text);
  std::vector<EntitySpan> out;
  auto emit = [&](std::size_t byte_begin, std::size_t byte_end, EntityCategory cat) {
    EntitySpan s;
    s.start = cp(byte_begin);
    s.end = cp(byte_end);
    s.surface = std::string(text.substr(byte_begin, byte_end - byte_begin));
    s.category = cat;
    out.push_back(std::move(s));
  };
  auto gap = [&](std::size_t a, std::size_t b) {
    return text.substr(tokens[a].end, tokens[b].begin - tokens[a].end);
  };

  // Gazetteer phrases, longest match at each token.
  for (std::size_t i = 0; i < tokens.size();) {
    std::size_t consumed = 0;
    for (const auto& p : phrases_) {
      if (i + p.tokens.size() > tokens.size()) continue;
      bool ok = true;
      for (std::size_t k = 0; k < p.tokens.size() && ok; ++k) {
        ok = token_matches(tokens[i + k].text, p.tokens[k]) && (k == 0 || is_name_separator(gap(i + k - 1, i + k)));
      }
      if (ok) {
        emit(tokens[i].begin, tokens[i + p.tokens.size() - 1].end, p.category);
        consumed = p.tokens.size();
        break;
      }
    }
    i += consumed > 0 ? consumed : 1;
  }

  // "<Name> river" / "<Name> River" and "Lake <Name>".
  for (std::size_t k = 0; k < tokens.size(); ++k) {
    if (is_water_word(tokens[k].text)) {
      std::size_t first = k;
      while (first > 0 && k - first < 3 && is_capitalized(tokens[first - 1].text) &&
             !is_non_name(tokens[first - 1].text) && is_whitespace_gap(gap(first - 1, first))) {
        --first;
      }
      if (first < k) {
        bool proper = is_capitalized(tokens[k].text);
        emit(tokens[first].begin, proper ? tokens[k].end : tokens[k - 1].end, EntityCategory::kLocation);
      }
    }
    if (tokens[k].text == "Lake" && k + 1 < tokens.size() && is_capitalized(tokens[k + 1].text) &&
        !is_non_name(tokens[k + 1].text) && is_whitespace_gap(gap(k, k + 1))) {
      emit(tokens[k].begin, tokens[k + 1].end, EntityCategory::kLocation);
    }
  }

  std::sort(out.begin(), out.end(), [](const EntitySpan& a, const EntitySpan& b) {
    return a.start != b.start ? a.start < b.start : a.end < b.end;
  });
  return out;
}

HttpNerBackend::HttpNerBackend(std::string endpoint, std::string model_identifier, int timeout_seconds)
    : endpoint_(std::move(endpoint)), model_(std::move(model_identifier)), timeout_seconds_(timeout_seconds) {}

std::vector<EntitySpan> HttpNerBackend::detect(std::string_view text) {
  auto scheme_end = endpoint_.find("://");
  auto path_start = endpoint_.find('/', scheme_end == std::string::npos ? 0 : scheme_end + 3);
  std::string origin = endpoint_.substr(0, path_start);
  std::string path = path_start == std::string::npos ? "/" : endpoint_.substr(path_start);
  httplib::Client client(origin);
  client.set_read_timeout(timeout_seconds_);
  auto res = client.Post(path, json{{"text", text}, {"model", model_}}.dump(), "application/json");
  if (!res) throw Error(ErrorCode::kRetriable, "NER endpoint unreachable: " + httplib::to_string(res.error()));
  if (res->status != 200) throw Error(ErrorCode::kBackend, "NER endpoint returned HTTP " + std::to_string(res->status));
  std::vector<EntitySpan> out;
  try {
    auto body = json::parse(res->body);
    auto length = text::codepoint_length(text);
    for (const auto& e : body.at("entities")) {
      EntitySpan s;
      s.start = e.at("start").get<std::size_t>();
      s.end = e.at("end").get<std::size_t>();
      if (s.start >= s.end || s.end > length) throw Error(ErrorCode::kBackend, "NER span out of range");
      auto label = e.value("label", std::string{});
      s.category = label == "GPE" ? EntityCategory::kGeopolitical
                   : label == "LOC" ? EntityCategory::kLocation
                                    : EntityCategory::kOther;
      s.surface = text::slice(text, s.start, s.end);
      out.push_back(std::move(s));
    }
  } catch (const json::exception& ex) {
    throw Error(ErrorCode::kBackend, std::string("malformed NER response: ") + ex.what());
  }
  return out;
}

std::vector<std::string> ner_section_violations(const json& section) {
  std::vector<std::string> out;
  if (!section.is_object()) return {"masking.ner must be an object"};
  auto type = section.value("type", std::string{});
  std::set<std::string> keys{"type"};
  if (type == "gazetteer") {
    keys.insert("version");
    auto v = section.value("version", std::string(GazetteerNer::kVersion));
    if (v != GazetteerNer::kVersion) {
      out.push_back("masking.ner.version '" + v + "' does not match built-in gazetteer version " +
                    std::string(GazetteerNer::kVersion));
    }
  } else if (type == "http") {
    keys.insert({"endpoint", "model_identifier", "timeout_seconds"});
    if (section.value("endpoint", std::string{}).empty()) out.emplace_back("masking.ner.endpoint is required");
    if (section.value("model_identifier", std::string{}).empty()) {
      out.emplace_back("masking.ner.model_identifier is required (pin name@version)");
    }
  } else {
    out.push_back("masking.ner.type '" + type + "' is not supported");
  }
  for (const auto& [k, _] : section.items()) {
    if (!keys.contains(k)) out.push_back("unknown key 'masking.ner." + k + "'");
  }
  return out;
}

std::shared_ptr<NerBackend> make_ner_backend(const json& section) {
  auto problems = ner_section_violations(section);
  if (!problems.empty()) throw Error(ErrorCode::kConfig, problems.front(), problems);
  if (section["type"] == "gazetteer") return std::make_shared<GazetteerNer>();
  return std::make_shared<HttpNerBackend>(section["endpoint"].get<std::string>(),
                                          section["model_identifier"].get<std::string>(),
                                          section.value("timeout_seconds", 60));
}

}  // namespace ombudsman::masking
