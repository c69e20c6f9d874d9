#pragma once

#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <optional>
#include <string>
#include <string_view>

namespace lfm {

// All instants are UTC at millisecond resolution. The canonical text form is
// ISO 8601 with exactly three fractional digits and a 'Z' suffix:
// "2021-01-01T00:00:00.000Z".
using UtcInstant = std::chrono::sys_time<std::chrono::milliseconds>;

inline UtcInstant utc_from_millis(std::int64_t ms) {
  return UtcInstant(std::chrono::milliseconds(ms));
}

inline std::int64_t to_millis(UtcInstant t) { return t.time_since_epoch().count(); }

// Seconds from `from` to `to`, carrying the millisecond fraction.
inline double seconds_between(UtcInstant from, UtcInstant to) {
  return static_cast<double>((to - from).count()) / 1000.0;
}

// Shift by a (possibly fractional) number of seconds, rounded to milliseconds.
inline UtcInstant add_seconds(UtcInstant t, double seconds) {
  return t + std::chrono::milliseconds(std::llround(seconds * 1000.0));
}

namespace detail {

// Civil <-> serial day conversions (proleptic Gregorian), after the classic
// public-domain chrono-compatible algorithms.
constexpr std::int64_t days_from_civil(std::int64_t y, unsigned m, unsigned d) {
  y -= m <= 2;
  const std::int64_t era = (y >= 0 ? y : y - 399) / 400;
  const unsigned yoe = static_cast<unsigned>(y - era * 400);              // [0, 399]
  const unsigned doy = (153 * (m + (m > 2 ? -3 : 9)) + 2) / 5 + d - 1;    // [0, 365]
  const unsigned doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;             // [0, 146096]
  return era * 146097 + static_cast<std::int64_t>(doe) - 719468;
}

struct CivilDate {
  std::int64_t year;
  unsigned month;
  unsigned day;
};

constexpr CivilDate civil_from_days(std::int64_t z) {
  z += 719468;
  const std::int64_t era = (z >= 0 ? z : z - 146096) / 146097;
  const unsigned doe = static_cast<unsigned>(z - era * 146097);                 // [0, 146096]
  const unsigned yoe = (doe - doe / 1460 + doe / 36524 - doe / 146096) / 365;   // [0, 399]
  const std::int64_t y = static_cast<std::int64_t>(yoe) + era * 400;
  const unsigned doy = doe - (365 * yoe + yoe / 4 - yoe / 100);                 // [0, 365]
  const unsigned mp = (5 * doy + 2) / 153;                                      // [0, 11]
  const unsigned d = doy - (153 * mp + 2) / 5 + 1;                              // [1, 31]
  const unsigned m = mp + (mp < 10 ? 3 : -9);                                   // [1, 12]
  return {y + (m <= 2), m, d};
}

constexpr bool is_leap_year(std::int64_t y) {
  return y % 4 == 0 && (y % 100 != 0 || y % 400 == 0);
}

constexpr unsigned days_in_month(std::int64_t y, unsigned m) {
  constexpr unsigned lengths[12] = {31, 28, 31, 30, 31, 30, 31, 31, 30, 31, 30, 31};
  if (m == 2 && is_leap_year(y)) return 29;
  return lengths[m - 1];
}

inline bool parse_digits(std::string_view s, std::size_t pos, std::size_t n, std::int64_t& out) {
  if (pos + n > s.size()) return false;
  std::int64_t value = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const char c = s[pos + i];
    if (c < '0' || c > '9') return false;
    value = value * 10 + (c - '0');
  }
  out = value;
  return true;
}

}  // namespace detail

// Parses "YYYY-MM-DDTHH:MM:SS[.f..fff]Z" (1 to 3 fractional digits, or none).
// Anything else, including non-UTC offsets, is rejected.
inline std::optional<UtcInstant> parse_utc(std::string_view text) {
  using detail::parse_digits;
  std::int64_t year, month, day, hour, minute, second;
  if (!parse_digits(text, 0, 4, year)) return std::nullopt;
  if (text.size() < 19) return std::nullopt;
  if (text[4] != '-' || text[7] != '-' || text[10] != 'T' || text[13] != ':' ||
      text[16] != ':') {
    return std::nullopt;
  }
  if (!parse_digits(text, 5, 2, month) || !parse_digits(text, 8, 2, day) ||
      !parse_digits(text, 11, 2, hour) || !parse_digits(text, 14, 2, minute) ||
      !parse_digits(text, 17, 2, second)) {
    return std::nullopt;
  }
  std::size_t pos = 19;
  std::int64_t millis = 0;
  if (pos < text.size() && text[pos] == '.') {
    ++pos;
    std::size_t digits = 0;
    while (pos + digits < text.size() && text[pos + digits] >= '0' && text[pos + digits] <= '9') {
      ++digits;
    }
    if (digits < 1 || digits > 3) return std::nullopt;
    parse_digits(text, pos, digits, millis);
    for (std::size_t i = digits; i < 3; ++i) millis *= 10;  // pad to milliseconds
    pos += digits;
  }
  if (pos + 1 != text.size() || text[pos] != 'Z') return std::nullopt;

  if (month < 1 || month > 12) return std::nullopt;
  if (day < 1 || day > detail::days_in_month(year, static_cast<unsigned>(month))) {
    return std::nullopt;
  }
  if (hour > 23 || minute > 59 || second > 59) return std::nullopt;

  const std::int64_t days =
      detail::days_from_civil(year, static_cast<unsigned>(month), static_cast<unsigned>(day));
  const std::int64_t ms =
      ((days * 24 + hour) * 60 + minute) * 60000 + second * 1000 + millis;
  return utc_from_millis(ms);
}

inline std::string format_utc(UtcInstant t) {
  std::int64_t ms = to_millis(t);
  std::int64_t days = ms / 86400000;
  std::int64_t rem = ms % 86400000;
  if (rem < 0) {
    rem += 86400000;
    --days;
  }
  const auto date = detail::civil_from_days(days);
  const int hour = static_cast<int>(rem / 3600000);
  const int minute = static_cast<int>(rem / 60000 % 60);
  const int second = static_cast<int>(rem / 1000 % 60);
  const int milli = static_cast<int>(rem % 1000);
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%04lld-%02u-%02uT%02d:%02d:%02d.%03dZ",
                static_cast<long long>(date.year), date.month, date.day, hour, minute,
                second, milli);
  return buf;
}

}  // namespace lfm
