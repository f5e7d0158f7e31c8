#pragma once

#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "ombudsman/masking/ner.hpp"

namespace ombudsman::masking {

inline constexpr std::string_view kDefaultMaskToken = "<LOCATION>";

struct MaskedText {
  std::string text;
  std::string mask_token{kDefaultMaskToken};
  std::size_t span_count = 0;  // merged regions replaced
};

void to_json(nlohmann::json& j, const MaskedText& m);

// Sorts spans and merges those that overlap or are separated only by white
// space. The merged surface is re-read from `text`. Throws
// Error(kInvalidArgument) for spans outside the text.
std::vector<EntitySpan> merge_spans(std::string_view text, std::vector<EntitySpan> spans);

// Location and geopolitical spans from the backend, merged, never touching
// an occurrence of `mask_token`.
std::vector<EntitySpan> extract_locations(std::string_view text, NerBackend& ner,
                                          std::string_view mask_token = kDefaultMaskToken);

// Replaces each merged span with one mask token; all other bytes are kept.
MaskedText mask_locations(std::string_view text, const std::vector<EntitySpan>& spans,
                          std::string_view mask_token = kDefaultMaskToken);

// extract_locations followed by mask_locations.
MaskedText mask_text(std::string_view text, NerBackend& ner, std::string_view mask_token = kDefaultMaskToken);

// Literal occurrences of the mask token in user text are rewritten
// ("<LOCATION>" -> "&lt;LOCATION&gt;") before masking so that every token in
// masked output was produced by the masker.
std::string escape_mask_literals(std::string_view text, std::string_view mask_token = kDefaultMaskToken);

}  // namespace ombudsman::masking
