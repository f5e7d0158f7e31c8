#include "ombudsman/text.hpp"

#include <unicode/normalizer2.h>
#include <unicode/uchar.h>
#include <unicode/unistr.h>
#include <unicode/utf8.h>

#include "ombudsman/error.hpp"

namespace ombudsman::text {

namespace {

std::string to_utf8(const icu::UnicodeString& u) {
  std::string out;
  u.toUTF8String(out);
  return out;
}

// Decodes one code point at byte offset i, advancing i. Invalid bytes decode
// as a negative value and advance by one.
UChar32 next_codepoint(std::string_view s, std::size_t& i) {
  UChar32 c = 0;
  auto idx = static_cast<int32_t>(i);
  U8_NEXT(reinterpret_cast<const uint8_t*>(s.data()), idx, static_cast<int32_t>(s.size()), c);
  i = static_cast<std::size_t>(idx);
  return c;
}

}  // namespace

std::string nfc(std::string_view s) {
  UErrorCode status = U_ZERO_ERROR;
  const icu::Normalizer2* norm = icu::Normalizer2::getNFCInstance(status);
  if (U_FAILURE(status)) throw Error(ErrorCode::kIo, "ICU NFC unavailable");
  auto src = icu::UnicodeString::fromUTF8(icu::StringPiece(s.data(), static_cast<int32_t>(s.size())));
  icu::UnicodeString dst = norm->normalize(src, status);
  if (U_FAILURE(status)) throw Error(ErrorCode::kInvalidArgument, "NFC normalization failed");
  return to_utf8(dst);
}

std::string casefold(std::string_view s) {
  auto u = icu::UnicodeString::fromUTF8(icu::StringPiece(s.data(), static_cast<int32_t>(s.size())));
  u.foldCase(U_FOLD_CASE_DEFAULT);
  return to_utf8(u);
}

std::string collapse_whitespace(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  bool pending_space = false;
  std::size_t i = 0;
  while (i < s.size()) {
    std::size_t start = i;
    UChar32 c = next_codepoint(s, i);
    if (c >= 0 && u_isUWhiteSpace(c)) {
      pending_space = !out.empty();
      continue;
    }
    if (pending_space) {
      out.push_back(' ');
      pending_space = false;
    }
    out.append(s.substr(start, i - start));
  }
  return out;
}

std::string strip_controls(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  std::size_t i = 0;
  while (i < s.size()) {
    std::size_t start = i;
    UChar32 c = next_codepoint(s, i);
    if (c == '\r') {
      out.push_back('\n');
      if (i < s.size() && s[i] == '\n') ++i;
      continue;
    }
    if (c == '\n' || c == '\t') {
      out.push_back(static_cast<char>(c));
      continue;
    }
    if (c >= 0 && u_charType(c) == U_CONTROL_CHAR) continue;
    out.append(s.substr(start, i - start));
  }
  return out;
}

bool is_blank(std::string_view s) {
  std::size_t i = 0;
  while (i < s.size()) {
    UChar32 c = next_codepoint(s, i);
    if (c < 0 || !u_isUWhiteSpace(c)) return false;
  }
  return true;
}

std::size_t codepoint_length(std::string_view s) {
  std::size_t n = 0;
  std::size_t i = 0;
  while (i < s.size()) {
    next_codepoint(s, i);
    ++n;
  }
  return n;
}

std::size_t byte_offset(std::string_view s, std::size_t cp) {
  std::size_t i = 0;
  for (std::size_t k = 0; k < cp; ++k) {
    if (i >= s.size()) throw Error(ErrorCode::kInvalidArgument, "code point offset out of range");
    next_codepoint(s, i);
  }
  return i;
}

std::size_t codepoint_offset(std::string_view s, std::size_t byte) {
  std::size_t n = 0;
  std::size_t i = 0;
  while (i < byte && i < s.size()) {
    next_codepoint(s, i);
    ++n;
  }
  if (i != byte) throw Error(ErrorCode::kInvalidArgument, "byte offset not on a code point boundary");
  return n;
}

std::string slice(std::string_view s, std::size_t start, std::size_t end) {
  auto b = byte_offset(s, start);
  auto e = byte_offset(s, end);
  return std::string(s.substr(b, e - b));
}

std::string ascii_lower(std::string_view s) {
  std::string out(s);
  for (auto& c : out) {
    if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
  }
  return out;
}

}  // namespace ombudsman::text
