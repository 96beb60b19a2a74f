// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <chrono>
#include <cstdint>
#include <cstdio>
#include <stdexcept>
#include <string>
#include <string_view>

namespace homeres {

// Civil datetime at second resolution, stored as seconds since the Unix
// epoch. No timezone handling: all timestamps are naive local time.
class DateTime {
 public:
  DateTime() = default;
  explicit DateTime(std::int64_t epoch_seconds) : secs_(epoch_seconds) {}

  static DateTime from_civil(int year, unsigned month, unsigned day, unsigned hour = 0,
                             unsigned minute = 0, unsigned second = 0) {
    using namespace std::chrono;
    const sys_days d = year_month_day{std::chrono::year{year}, std::chrono::month{month},
                                      std::chrono::day{day}};
    const auto s = d.time_since_epoch().count() * std::int64_t{86400} + hour * 3600 +
                   minute * 60 + second;
    return DateTime{s};
  }

  // Accepts "YYYY-MM-DD[T ]HH:MM[:SS]", a bare "YYYY-MM-DD", or an integer
  // epoch-seconds value.
  static DateTime parse(std::string_view text);

  std::int64_t epoch_seconds() const { return secs_; }

  DateTime plus_hours(double hours) const {
    return DateTime{secs_ + static_cast<std::int64_t>(hours * 3600.0 + (hours >= 0 ? 0.5 : -0.5))};
  }
  DateTime plus_seconds(std::int64_t s) const { return DateTime{secs_ + s}; }

  // 1-based ordinal day within the calendar year (Feb 29 -> 60 in leap years).
  int day_of_year() const {
    using namespace std::chrono;
    const sys_days d{days{floor_div(secs_, 86400)}};
    const year_month_day ymd{d};
    const sys_days jan1 = sys_days{ymd.year() / January / 1};
    return static_cast<int>((d - jan1).count()) + 1;
  }

  int year() const {
    using namespace std::chrono;
    const year_month_day ymd{sys_days{days{floor_div(secs_, 86400)}}};
    return static_cast<int>(ymd.year());
  }

  // Days since epoch; usable as a calendar-day identity for midnight resets.
  std::int64_t day_index() const { return floor_div(secs_, 86400); }

  double hour_of_day() const {
    const std::int64_t s = secs_ - day_index() * 86400;
    return static_cast<double>(s) / 3600.0;
  }

  std::string to_string() const {
    using namespace std::chrono;
    const std::int64_t di = day_index();
    const year_month_day ymd{sys_days{days{di}}};
    const std::int64_t rem = secs_ - di * 86400;
    char buf[32];
    std::snprintf(buf, sizeof buf, "%04d-%02u-%02uT%02d:%02d:%02d", static_cast<int>(ymd.year()),
                  static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()),
                  static_cast<int>(rem / 3600), static_cast<int>(rem % 3600 / 60),
                  static_cast<int>(rem % 60));
    return buf;
  }

  friend bool operator==(const DateTime& a, const DateTime& b) { return a.secs_ == b.secs_; }
  friend auto operator<=>(const DateTime& a, const DateTime& b) { return a.secs_ <=> b.secs_; }

 private:
  static std::int64_t floor_div(std::int64_t a, std::int64_t b) {
    std::int64_t q = a / b;
    if (a % b != 0 && ((a < 0) != (b < 0))) --q;
    return q;
  }
  std::int64_t secs_ = 0;
};

inline DateTime DateTime::parse(std::string_view text) {
  std::string s{text};
  int y = 0, mo = 0, d = 0, h = 0, mi = 0;
  double sec = 0;
  if (std::sscanf(s.c_str(), "%d-%d-%dT%d:%d:%lf", &y, &mo, &d, &h, &mi, &sec) >= 5 ||
      std::sscanf(s.c_str(), "%d-%d-%d %d:%d:%lf", &y, &mo, &d, &h, &mi, &sec) >= 5) {
    return from_civil(y, static_cast<unsigned>(mo), static_cast<unsigned>(d),
                      static_cast<unsigned>(h), static_cast<unsigned>(mi),
                      static_cast<unsigned>(sec));
  }
  if (std::sscanf(s.c_str(), "%d-%d-%d", &y, &mo, &d) == 3 && s.find(':') == std::string::npos) {
    return from_civil(y, static_cast<unsigned>(mo), static_cast<unsigned>(d));
  }
  char* end = nullptr;
  const long long epoch = std::strtoll(s.c_str(), &end, 10);
  if (end != s.c_str() && *end == '\0') return DateTime{epoch};
  throw std::invalid_argument("unparseable timestamp: \"" + s + "\"");
}

}  // namespace homeres
