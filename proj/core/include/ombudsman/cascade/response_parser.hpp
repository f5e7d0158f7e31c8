#pragma once

#include <map>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

namespace ombudsman::cascade {

// Returns the first balanced JSON value ('{...}' or '[...]') embedded in
// free text. Brackets inside string literals (with escapes) do not count.
// A balanced span that fails to parse (prose such as "[see above]") is
// skipped and scanning resumes after its opening bracket.
// Throws Error(kParse) when nothing parses.
nlohmann::json extract_first_json(std::string_view raw);

struct ParsedResponse {
  std::map<std::string, nlohmann::json> items;  // by id
  std::vector<std::string> warnings;            // e.g. unexpected ids
};

// Extracts per-id records from an LLM reply. Accepted shapes: an array of
// objects with "id"; an object holding such an array under any key; an
// object keyed by id; a single object with "id".
//
// Throws Error(kParse) when no JSON is found or the shape has no records,
// and Error(kPartialResult) listing missing ids in details(). Unexpected
// ids are ignored with a warning.
ParsedResponse parse_llm_response(std::string_view raw, const std::vector<std::string>& expected_ids);

// Like parse_llm_response, but returns whatever expected ids were present
// instead of throwing on missing ones; `missing` receives the rest.
ParsedResponse parse_llm_response_lenient(std::string_view raw, const std::vector<std::string>& expected_ids,
                                          std::vector<std::string>& missing);

}  // namespace ombudsman::cascade
