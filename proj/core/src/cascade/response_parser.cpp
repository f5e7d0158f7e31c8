#include "ombudsman/cascade/response_parser.hpp"

#include <set>

#include <spdlog/spdlog.h>

#include "ombudsman/error.hpp"

using nlohmann::json;

namespace ombudsman::cascade {

namespace {

// End offset (one past the closing bracket) of the balanced value opening
// at `start`, or npos if the text ends first.
std::size_t balanced_end(std::string_view s, std::size_t start) {
  std::vector<char> stack;
  bool in_string = false;
  bool escaped = false;
  for (std::size_t i = start; i < s.size(); ++i) {
    char c = s[i];
    if (in_string) {
      if (escaped) {
        escaped = false;
      } else if (c == '\\') {
        escaped = true;
      } else if (c == '"') {
        in_string = false;
      }
      continue;
    }
    switch (c) {
      case '"': in_string = true; break;
      case '{': stack.push_back('}'); break;
      case '[': stack.push_back(']'); break;
      case '}':
      case ']':
        if (stack.empty() || stack.back() != c) return std::string_view::npos;
        stack.pop_back();
        if (stack.empty()) return i + 1;
        break;
      default: break;
    }
  }
  return std::string_view::npos;
}

std::string id_string(const json& v) {
  if (v.is_string()) return v.get<std::string>();
  if (v.is_number_integer()) return std::to_string(v.get<long long>());
  return v.dump();
}

bool looks_like_records(const json& arr) {
  if (!arr.is_array() || arr.empty()) return false;
  for (const auto& e : arr) {
    if (!e.is_object() || !e.contains("id")) return false;
  }
  return true;
}

std::vector<json> records_of(const json& value, const std::vector<std::string>& expected_ids) {
  if (looks_like_records(value)) return {value.begin(), value.end()};
  if (value.is_object()) {
    if (value.contains("id")) return {value};
    for (const auto& [_, v] : value.items()) {
      if (looks_like_records(v)) return {v.begin(), v.end()};
    }
    // {"<id>": {...}, ...}
    std::vector<json> out;
    std::set<std::string> expected(expected_ids.begin(), expected_ids.end());
    for (const auto& [k, v] : value.items()) {
      if (v.is_object() && expected.contains(k)) {
        json rec = v;
        rec["id"] = k;
        out.push_back(rec);
      }
    }
    if (!out.empty()) return out;
  }
  if (value.is_array() && value.empty() && expected_ids.empty()) return {};
  throw Error(ErrorCode::kParse, "response JSON has no per-item records");
}

ParsedResponse collect(std::string_view raw, const std::vector<std::string>& expected_ids,
                       std::vector<std::string>& missing) {
  json value = extract_first_json(raw);
  ParsedResponse out;
  std::set<std::string> expected(expected_ids.begin(), expected_ids.end());
  for (auto& rec : records_of(value, expected_ids)) {
    std::string id = id_string(rec["id"]);
    if (!expected.contains(id)) {
      out.warnings.push_back("unexpected id '" + id + "' ignored");
      spdlog::warn("LLM response contained unexpected id '{}'", id);
      continue;
    }
    out.items.emplace(id, std::move(rec));
  }
  missing.clear();
  for (const auto& id : expected_ids) {
    if (!out.items.contains(id)) missing.push_back(id);
  }
  return out;
}

}  // namespace

json extract_first_json(std::string_view raw) {
  for (std::size_t i = 0; i < raw.size(); ++i) {
    if (raw[i] != '{' && raw[i] != '[') continue;
    auto end = balanced_end(raw, i);
    if (end == std::string_view::npos) continue;
    try {
      return json::parse(raw.substr(i, end - i));
    } catch (const json::exception&) {
      // Balanced but not JSON; keep scanning.
    }
  }
  throw Error(ErrorCode::kParse, "no balanced JSON value found in response");
}

ParsedResponse parse_llm_response(std::string_view raw, const std::vector<std::string>& expected_ids) {
  std::vector<std::string> missing;
  auto out = collect(raw, expected_ids, missing);
  if (!missing.empty()) {
    throw Error(ErrorCode::kPartialResult,
                "response is missing " + std::to_string(missing.size()) + " expected id(s)", missing);
  }
  return out;
}

ParsedResponse parse_llm_response_lenient(std::string_view raw, const std::vector<std::string>& expected_ids,
                                          std::vector<std::string>& missing) {
  return collect(raw, expected_ids, missing);
}

}  // namespace ombudsman::cascade
