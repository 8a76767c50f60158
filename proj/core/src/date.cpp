#include "engage/date.hpp"

#include <charconv>
#include <cstdio>

#include "engage/error.hpp"

namespace engage {

namespace {

int parse_fixed(std::string_view text, std::size_t pos, std::size_t len) {
  if (pos + len > text.size()) throw MalformedInput("truncated date: " + std::string(text));
  int value = 0;
  auto first = text.data() + pos;
  auto [ptr, ec] = std::from_chars(first, first + len, value);
  if (ec != std::errc() || ptr != first + len) {
    throw MalformedInput("bad date field in: " + std::string(text));
  }
  return value;
}

void expect_char(std::string_view text, std::size_t pos, char c) {
  if (pos >= text.size() || text[pos] != c) {
    throw MalformedInput("bad date format: " + std::string(text));
  }
}

}  // namespace

Date parse_date(std::string_view text) {
  expect_char(text, 4, '-');
  expect_char(text, 7, '-');
  if (text.size() > 10 && text[10] != 'T' && text[10] != ' ') {
    throw MalformedInput("bad date format: " + std::string(text));
  }
  Date d{std::chrono::year{parse_fixed(text, 0, 4)},
         std::chrono::month{static_cast<unsigned>(parse_fixed(text, 5, 2))},
         std::chrono::day{static_cast<unsigned>(parse_fixed(text, 8, 2))}};
  if (!d.ok()) throw MalformedInput("invalid calendar date: " + std::string(text));
  return d;
}

std::string format_date(const Date& d) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "%04d-%02u-%02u", static_cast<int>(d.year()),
                static_cast<unsigned>(d.month()), static_cast<unsigned>(d.day()));
  return buf;
}

Timestamp parse_timestamp(std::string_view text) {
  Date d = parse_date(text.substr(0, 10));
  expect_char(text, 10, 'T');
  expect_char(text, 13, ':');
  expect_char(text, 16, ':');
  expect_char(text, 19, 'Z');
  auto h = parse_fixed(text, 11, 2);
  auto m = parse_fixed(text, 14, 2);
  auto s = parse_fixed(text, 17, 2);
  if (h > 23 || m > 59 || s > 60) throw MalformedInput("bad time: " + std::string(text));
  return start_of_day(d) + std::chrono::hours{h} + std::chrono::minutes{m} +
         std::chrono::seconds{s};
}

std::string format_timestamp(Timestamp t) {
  auto day = std::chrono::floor<std::chrono::days>(t);
  std::chrono::hh_mm_ss hms{t - day};
  char buf[32];
  std::snprintf(buf, sizeof buf, "%sT%02d:%02d:%02dZ", format_date(Date{day}).c_str(),
                static_cast<int>(hms.hours().count()),
                static_cast<int>(hms.minutes().count()),
                static_cast<int>(hms.seconds().count()));
  return buf;
}

Date today_utc() {
  return Date{std::chrono::floor<std::chrono::days>(std::chrono::system_clock::now())};
}

Timestamp start_of_day(const Date& d) {
  return std::chrono::time_point_cast<std::chrono::seconds>(std::chrono::sys_days{d});
}

}  // namespace engage
