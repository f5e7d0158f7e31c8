#include "ombudsman/timestamp.hpp"

#include <charconv>
#include <cstdio>

#include "ombudsman/error.hpp"

namespace ombudsman {

namespace {

// Days since 1970-01-01 for a proleptic Gregorian date (H. Hinnant).
long long days_from_civil(long long y, unsigned m, unsigned d) {
  y -= m <= 2;
  const long long era = (y >= 0 ? y : y - 399) / 400;
  const unsigned yoe = static_cast<unsigned>(y - era * 400);
  const unsigned doy = (153 * (m + (m > 2 ? -3 : 9)) + 2) / 5 + d - 1;
  const unsigned doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
  return era * 146097 + static_cast<long long>(doe) - 719468;
}

void civil_from_days(long long z, long long& y, unsigned& m, unsigned& d) {
  z += 719468;
  const long long era = (z >= 0 ? z : z - 146096) / 146097;
  const unsigned doe = static_cast<unsigned>(z - era * 146097);
  const unsigned yoe = (doe - doe / 1460 + doe / 36524 - doe / 146096) / 365;
  y = static_cast<long long>(yoe) + era * 400;
  const unsigned doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
  const unsigned mp = (5 * doy + 2) / 153;
  d = doy - (153 * mp + 2) / 5 + 1;
  m = mp < 10 ? mp + 3 : mp - 9;
  y += m <= 2;
}

[[noreturn]] void bad(std::string_view s) {
  throw Error(ErrorCode::kParse, "unparseable timestamp: " + std::string(s));
}

int digits(std::string_view s, std::size_t pos, std::size_t n) {
  if (pos + n > s.size()) bad(s);
  int v = 0;
  auto [p, ec] = std::from_chars(s.data() + pos, s.data() + pos + n, v);
  if (ec != std::errc{} || p != s.data() + pos + n) bad(s);
  return v;
}

}  // namespace

UtcSeconds parse_timestamp(std::string_view s) {
  if (s.empty()) bad(s);
  bool numeric = true;
  for (std::size_t i = 0; i < s.size(); ++i) {
    char c = s[i];
    if (!((c >= '0' && c <= '9') || (i == 0 && c == '-') || c == '.')) numeric = false;
  }
  if (numeric) {
    long long v = 0;
    auto dot = s.find('.');
    auto int_part = s.substr(0, dot);
    auto [p, ec] = std::from_chars(int_part.data(), int_part.data() + int_part.size(), v);
    if (ec != std::errc{} || p != int_part.data() + int_part.size()) bad(s);
    return UtcSeconds{std::chrono::seconds{v}};
  }

  // YYYY-MM-DD[T| ]HH:MM:SS
  if (s.size() < 19 || s[4] != '-' || s[7] != '-' || (s[10] != 'T' && s[10] != ' ') ||
      s[13] != ':' || s[16] != ':') {
    bad(s);
  }
  int year = digits(s, 0, 4);
  int month = digits(s, 5, 2);
  int day = digits(s, 8, 2);
  int hour = digits(s, 11, 2);
  int minute = digits(s, 14, 2);
  int second = digits(s, 17, 2);
  if (month < 1 || month > 12 || day < 1 || day > 31 || hour > 23 || minute > 59 || second > 60) bad(s);

  std::size_t pos = 19;
  if (pos < s.size() && s[pos] == '.') {
    ++pos;
    while (pos < s.size() && s[pos] >= '0' && s[pos] <= '9') ++pos;
  }
  long long offset = 0;
  if (pos < s.size()) {
    char c = s[pos];
    if (c == 'Z' || c == 'z') {
      ++pos;
    } else if (c == '+' || c == '-') {
      int oh = digits(s, pos + 1, 2);
      std::size_t mpos = pos + 3;
      if (mpos < s.size() && s[mpos] == ':') ++mpos;
      int om = digits(s, mpos, 2);
      offset = (oh * 3600LL + om * 60LL) * (c == '+' ? 1 : -1);
      pos = mpos + 2;
    }
  }
  if (pos != s.size()) bad(s);

  long long days = days_from_civil(year, static_cast<unsigned>(month), static_cast<unsigned>(day));
  long long secs = days * 86400 + hour * 3600LL + minute * 60LL + second - offset;
  return UtcSeconds{std::chrono::seconds{secs}};
}

std::string format_utc(UtcSeconds t) {
  long long secs = t.time_since_epoch().count();
  long long days = secs >= 0 ? secs / 86400 : (secs - 86399) / 86400;
  long long rem = secs - days * 86400;
  long long y = 0;
  unsigned m = 0;
  unsigned d = 0;
  civil_from_days(days, y, m, d);
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%04lld-%02u-%02uT%02lld:%02lld:%02lldZ", y, m, d, rem / 3600,
                (rem % 3600) / 60, rem % 60);
  return buf;
}

}  // namespace ombudsman
