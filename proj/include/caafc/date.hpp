#pragma once

#include <compare>
#include <optional>
#include <string>
#include <string_view>

namespace caafc {

// Calendar date. (gcc 11's <chrono> lacks parse/format for calendar types,
// so we keep a small explicit struct.)
struct Date {
  int year = 0;
  int month = 0;  // 1..12
  int day = 0;    // 1..31, validated against the month

  auto operator<=>(const Date&) const = default;

  // "YYYY-MM-DD", zero-padded.
  std::string to_string() const;
};

// True when y-m-d names a real calendar day (proleptic Gregorian).
bool valid_date(int year, int month, int day);

// Parses "YYYY-MM-DD" (also accepts single-digit month/day as in
// "2021/7/27" when slash=true callers pre-split). Returns nullopt on
// malformed or out-of-range input.
std::optional<Date> parse_date(std::string_view text);

// Scans free text (URLs, prose) for the first date-like token:
// YYYY-MM-DD, YYYY/MM/DD, or YYYY/MM/DD split across path segments.
// Only years 1900..2100 qualify, to avoid matching ids.
std::optional<Date> find_date(std::string_view text);

}  // namespace caafc
