#pragma once

#include <chrono>
#include <string>
#include <string_view>

namespace engage {

using Date = std::chrono::year_month_day;
using Timestamp = std::chrono::sys_seconds;

/// Parses "YYYY-MM-DD". A trailing time part ("T00:00:00Z") is accepted and
/// ignored, which is how journal search APIs render publication dates.
Date parse_date(std::string_view text);
std::string format_date(const Date& d);

/// Parses "YYYY-MM-DDTHH:MM:SSZ".
Timestamp parse_timestamp(std::string_view text);
std::string format_timestamp(Timestamp t);

Date today_utc();
Timestamp start_of_day(const Date& d);

struct DateRange {
  Date from;
  Date to;

  bool contains(const Date& d) const { return from <= d && d <= to; }
};

}  // namespace engage
