#pragma once

#include <cstddef>
#include <string>
#include <string_view>

// UTF-8 text helpers. All strings in the library are UTF-8; offsets exposed
// in domain types are code-point offsets, converted here.
namespace ombudsman::text {

// Unicode NFC normalization. Invalid UTF-8 sequences become U+FFFD.
std::string nfc(std::string_view s);

// Full Unicode case folding (so "STRASSE" and "straße" compare equal).
std::string casefold(std::string_view s);

// Collapse every run of Unicode white space to one ASCII space and trim.
std::string collapse_whitespace(std::string_view s);

// CRLF and lone CR become LF; other control characters except LF and TAB
// are removed.
std::string strip_controls(std::string_view s);

// True if s has no non-whitespace code point.
bool is_blank(std::string_view s);

std::size_t codepoint_length(std::string_view s);

// Byte offset of code point index `cp` (cp == length gives s.size()).
std::size_t byte_offset(std::string_view s, std::size_t cp);

// Code point index of a byte offset that sits on a code point boundary.
std::size_t codepoint_offset(std::string_view s, std::size_t byte);

// Substring by code point range [start, end).
std::string slice(std::string_view s, std::size_t start, std::size_t end);

std::string ascii_lower(std::string_view s);

inline bool is_ascii_space(char c) {
  return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v';
}

}  // namespace ombudsman::text
