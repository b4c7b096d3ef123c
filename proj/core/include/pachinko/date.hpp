#pragma once

#include <compare>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace pachinko {

// Proleptic-Gregorian calendar date, stored as days since 1970-01-01.
// Cheap to copy and totally ordered, so it doubles as a map key.
class Date {
 public:
  Date() = default;
  Date(int year, unsigned month, unsigned day);  // throws ValidationError if invalid

  static std::optional<Date> parse_iso(std::string_view text);  // "YYYY-MM-DD"
  static Date from_days(std::int32_t days) {
    Date d;
    d.days_ = days;
    return d;
  }
  static bool valid_ymd(int year, unsigned month, unsigned day);

  std::int32_t days_since_epoch() const { return days_; }
  int year() const;
  unsigned month() const;  // 1..12
  unsigned day() const;    // 1..31
  unsigned weekday_mon0() const;  // 0 = Monday .. 6 = Sunday

  Date plus_days(int n) const { return from_days(days_ + n); }
  std::string to_string() const;  // ISO-8601

  auto operator<=>(const Date&) const = default;

 private:
  std::int32_t days_ = 0;
};

inline int operator-(Date a, Date b) { return a.days_since_epoch() - b.days_since_epoch(); }

// Point in time with an explicit UTC offset, as carried by tweet timestamps.
// The calendar fields are the *local* ones written in the source text; no
// timezone inference happens beyond the offset itself.
struct Timestamp {
  Date local_date;
  int hour = 0;
  int minute = 0;
  int second = 0;
  int offset_minutes = 0;  // e.g. +11:00 -> 660
  std::string raw;         // original text, preserved for round-trips

  // Accepts "YYYY-MM-DDTHH:MM:SS(.fff...)?(Z|±HH:MM)".
  static std::optional<Timestamp> parse_iso(std::string_view text);
};

// Three-letter English month name, m in 1..12 ("Jan".."Dec").
std::string_view month_name(unsigned m);
// Full lowercase weekday name, wd in 0..6 starting Monday.
std::string_view weekday_name(unsigned wd);

}  // namespace pachinko
