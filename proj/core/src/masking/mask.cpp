#include "ombudsman/masking/mask.hpp"

#include <algorithm>

#include "ombudsman/error.hpp"
#include "ombudsman/text.hpp"

namespace ombudsman::masking {

void to_json(nlohmann::json& j, const MaskedText& m) {
  j = nlohmann::json{{"text", m.text}, {"mask_token", m.mask_token}, {"span_count", m.span_count}};
}

namespace {

bool whitespace_only(std::string_view s) {
  return std::all_of(s.begin(), s.end(), [](char c) { return text::is_ascii_space(c); });
}

}  // namespace

std::vector<EntitySpan> merge_spans(std::string_view text, std::vector<EntitySpan> spans) {
  const std::size_t length = text::codepoint_length(text);
  for (const auto& s : spans) {
    if (s.start >= s.end || s.end > length) {
      throw Error(ErrorCode::kInvalidArgument, "span [" + std::to_string(s.start) + "," + std::to_string(s.end) +
                                                   ") out of range for text of length " + std::to_string(length));
    }
  }
  std::sort(spans.begin(), spans.end(), [](const EntitySpan& a, const EntitySpan& b) {
    return a.start != b.start ? a.start < b.start : a.end > b.end;
  });

  std::vector<EntitySpan> merged;
  for (auto& s : spans) {
    if (!merged.empty()) {
      auto& last = merged.back();
      bool joinable = s.start <= last.end;
      if (!joinable) {
        auto b = text::byte_offset(text, last.end);
        auto e = text::byte_offset(text, s.start);
        joinable = whitespace_only(text.substr(b, e - b));
      }
      if (joinable) {
        last.end = std::max(last.end, s.end);
        continue;
      }
    }
    merged.push_back(std::move(s));
  }
  for (auto& m : merged) m.surface = text::slice(text, m.start, m.end);
  return merged;
}

std::vector<EntitySpan> extract_locations(std::string_view text, NerBackend& ner, std::string_view mask_token) {
  // Code-point ranges of literal mask tokens, which detections must not touch.
  std::vector<std::pair<std::size_t, std::size_t>> tokens;
  if (!mask_token.empty()) {
    const auto token_len = text::codepoint_length(mask_token);
    for (auto pos = text.find(mask_token); pos != std::string_view::npos; pos = text.find(mask_token, pos + 1)) {
      auto start = text::codepoint_offset(text, pos);
      tokens.emplace_back(start, start + token_len);
    }
  }
  std::vector<EntitySpan> kept;
  for (auto& s : ner.detect(text)) {
    if (s.category == EntityCategory::kOther) continue;
    bool touches = std::any_of(tokens.begin(), tokens.end(),
                               [&](const auto& t) { return s.start < t.second && t.first < s.end; });
    if (!touches) kept.push_back(std::move(s));
  }
  auto merged = merge_spans(text, std::move(kept));
  // A whitespace-bridged merge could in principle swallow a mask token that
  // sits between two detections; split such regions back out.
  std::vector<EntitySpan> out;
  for (auto& m : merged) {
    bool covers = std::any_of(tokens.begin(), tokens.end(),
                              [&](const auto& t) { return m.start < t.second && t.first < m.end; });
    if (!covers) out.push_back(std::move(m));
  }
  return out;
}

MaskedText mask_locations(std::string_view text, const std::vector<EntitySpan>& spans, std::string_view mask_token) {
  auto merged = merge_spans(text, spans);
  MaskedText out;
  out.mask_token = std::string(mask_token);
  out.span_count = merged.size();
  std::size_t cursor = 0;  // bytes
  for (const auto& s : merged) {
    auto b = text::byte_offset(text, s.start);
    auto e = text::byte_offset(text, s.end);
    out.text.append(text.substr(cursor, b - cursor));
    out.text.append(mask_token);
    cursor = e;
  }
  out.text.append(text.substr(cursor));
  return out;
}

MaskedText mask_text(std::string_view text, NerBackend& ner, std::string_view mask_token) {
  return mask_locations(text, extract_locations(text, ner, mask_token), mask_token);
}

std::string escape_mask_literals(std::string_view text, std::string_view mask_token) {
  if (mask_token.empty()) return std::string(text);
  std::string escaped;
  for (char c : mask_token) {
    if (c == '<') escaped += "&lt;";
    else if (c == '>') escaped += "&gt;";
    else escaped.push_back(c);
  }
  if (escaped == mask_token) escaped = "\\" + std::string(mask_token);
  std::string out;
  std::size_t cursor = 0;
  for (auto pos = text.find(mask_token); pos != std::string_view::npos; pos = text.find(mask_token, cursor)) {
    out.append(text.substr(cursor, pos - cursor));
    out.append(escaped);
    cursor = pos + mask_token.size();
  }
  out.append(text.substr(cursor));
  return out;
}

}  // namespace ombudsman::masking
