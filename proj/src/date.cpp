#include "caafc/date.hpp"

#include <cctype>
#include <cstdio>

namespace caafc {

namespace {

bool leap(int y) { return (y % 4 == 0 && y % 100 != 0) || y % 400 == 0; }

int days_in_month(int y, int m) {
  static const int d[] = {31, 28, 31, 30, 31, 30, 31, 31, 30, 31, 30, 31};
  if (m < 1 || m > 12) return 0;
  if (m == 2 && leap(y)) return 29;
  return d[m - 1];
}

// Parses up to `max_digits` decimal digits starting at pos; advances pos.
std::optional<int> take_int(std::string_view s, std::size_t& pos,
                            std::size_t min_digits, std::size_t max_digits) {
  std::size_t start = pos;
  int value = 0;
  while (pos < s.size() && pos - start < max_digits &&
         std::isdigit(static_cast<unsigned char>(s[pos]))) {
    value = value * 10 + (s[pos] - '0');
    ++pos;
  }
  if (pos - start < min_digits) return std::nullopt;
  return value;
}

}  // namespace

bool valid_date(int year, int month, int day) {
  return month >= 1 && month <= 12 && day >= 1 &&
         day <= days_in_month(year, month);
}

std::string Date::to_string() const {
  char buf[16];
  std::snprintf(buf, sizeof(buf), "%04d-%02d-%02d", year, month, day);
  return buf;
}

std::optional<Date> parse_date(std::string_view text) {
  std::size_t pos = 0;
  auto y = take_int(text, pos, 4, 4);
  if (!y || pos >= text.size() || text[pos] != '-') return std::nullopt;
  ++pos;
  auto m = take_int(text, pos, 1, 2);
  if (!m || pos >= text.size() || text[pos] != '-') return std::nullopt;
  ++pos;
  auto d = take_int(text, pos, 1, 2);
  if (!d || pos != text.size()) return std::nullopt;
  if (!valid_date(*y, *m, *d)) return std::nullopt;
  return Date{*y, *m, *d};
}

std::optional<Date> find_date(std::string_view text) {
  for (std::size_t i = 0; i + 4 <= text.size(); ++i) {
    if (!std::isdigit(static_cast<unsigned char>(text[i]))) continue;
    // Don't start in the middle of a digit run.
    if (i > 0 && std::isdigit(static_cast<unsigned char>(text[i - 1])))
      continue;
    std::size_t pos = i;
    auto y = take_int(text, pos, 4, 4);
    if (!y || *y < 1900 || *y > 2100) continue;
    if (pos >= text.size() || (text[pos] != '-' && text[pos] != '/')) continue;
    char sep = text[pos];
    ++pos;
    auto m = take_int(text, pos, 1, 2);
    if (!m) continue;
    if (pos >= text.size() || text[pos] != sep) continue;
    ++pos;
    auto d = take_int(text, pos, 1, 2);
    if (!d) continue;
    // Reject if the day run continues (e.g. part of a longer id).
    if (pos < text.size() && std::isdigit(static_cast<unsigned char>(text[pos])))
      continue;
    if (valid_date(*y, *m, *d)) return Date{*y, *m, *d};
  }
  return std::nullopt;
}

}  // namespace caafc
