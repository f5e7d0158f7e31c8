#pragma once

#include <chrono>
#include <string>
#include <string_view>

namespace ombudsman {

using UtcSeconds = std::chrono::sys_seconds;

// Accepts epoch seconds ("1643366340") or ISO-8601 date-times with optional
// fractional seconds and a Z / +HH:MM / -HH:MM offset (no offset means UTC).
// Fractional seconds are truncated. Throws Error(kParse).
UtcSeconds parse_timestamp(std::string_view s);

// "YYYY-MM-DDTHH:MM:SSZ"
std::string format_utc(UtcSeconds t);

inline UtcSeconds now_utc() {
  return std::chrono::time_point_cast<std::chrono::seconds>(std::chrono::system_clock::now());
}

}  // namespace ombudsman
