#include "pachinko/date.hpp"

#include <charconv>
#include <chrono>

#include "pachinko/error.hpp"

namespace pachinko {

namespace {

namespace chr = std::chrono;

chr::year_month_day to_ymd(std::int32_t days) {
  return chr::year_month_day{chr::sys_days{chr::days{days}}};
}

bool parse_int(std::string_view s, int& out) {
  if (s.empty()) return false;
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc{} && p == s.data() + s.size();
}

}  // namespace

bool Date::valid_ymd(int year, unsigned month, unsigned day) {
  chr::year_month_day ymd{chr::year{year}, chr::month{month}, chr::day{day}};
  return ymd.ok();
}

Date::Date(int year, unsigned month, unsigned day) {
  chr::year_month_day ymd{chr::year{year}, chr::month{month}, chr::day{day}};
  if (!ymd.ok()) {
    throw ValidationError("invalid calendar date " + std::to_string(year) + "-" +
                          std::to_string(month) + "-" + std::to_string(day));
  }
  days_ = static_cast<std::int32_t>(chr::sys_days{ymd}.time_since_epoch().count());
}

std::optional<Date> Date::parse_iso(std::string_view text) {
  if (text.size() != 10 || text[4] != '-' || text[7] != '-') return std::nullopt;
  int y = 0, m = 0, d = 0;
  if (!parse_int(text.substr(0, 4), y) || !parse_int(text.substr(5, 2), m) ||
      !parse_int(text.substr(8, 2), d)) {
    return std::nullopt;
  }
  if (m < 1 || m > 12 || d < 1 || !valid_ymd(y, static_cast<unsigned>(m), static_cast<unsigned>(d)))
    return std::nullopt;
  return Date(y, static_cast<unsigned>(m), static_cast<unsigned>(d));
}

int Date::year() const { return static_cast<int>(to_ymd(days_).year()); }
unsigned Date::month() const { return static_cast<unsigned>(to_ymd(days_).month()); }
unsigned Date::day() const { return static_cast<unsigned>(to_ymd(days_).day()); }

unsigned Date::weekday_mon0() const {
  chr::weekday wd{chr::sys_days{chr::days{days_}}};
  return (wd.c_encoding() + 6u) % 7u;  // c_encoding: 0 = Sunday
}

std::string Date::to_string() const {
  char buf[16];
  std::snprintf(buf, sizeof buf, "%04d-%02u-%02u", year(), month(), day());
  return buf;
}

std::optional<Timestamp> Timestamp::parse_iso(std::string_view text) {
  // YYYY-MM-DDTHH:MM(:SS(.frac)?)?(Z|±HH:MM)
  if (text.size() < 17 || text[10] != 'T') return std::nullopt;
  auto date = Date::parse_iso(text.substr(0, 10));
  if (!date) return std::nullopt;

  Timestamp ts;
  ts.local_date = *date;
  ts.raw.assign(text);

  size_t pos = 11;
  auto take2 = [&](int& out) {
    if (pos + 2 > text.size()) return false;
    int v = 0;
    if (!parse_int(text.substr(pos, 2), v)) return false;
    out = v;
    pos += 2;
    return true;
  };
  if (!take2(ts.hour) || ts.hour > 23) return std::nullopt;
  if (pos >= text.size() || text[pos] != ':') return std::nullopt;
  ++pos;
  if (!take2(ts.minute) || ts.minute > 59) return std::nullopt;
  if (pos < text.size() && text[pos] == ':') {
    ++pos;
    if (!take2(ts.second) || ts.second > 60) return std::nullopt;
    if (pos < text.size() && text[pos] == '.') {
      ++pos;
      size_t digits = 0;
      while (pos < text.size() && std::isdigit(static_cast<unsigned char>(text[pos]))) {
        ++pos;
        ++digits;
      }
      if (digits == 0) return std::nullopt;
    }
  }
  if (pos >= text.size()) return std::nullopt;
  if (text[pos] == 'Z') {
    ts.offset_minutes = 0;
    return pos + 1 == text.size() ? std::optional<Timestamp>(ts) : std::nullopt;
  }
  if (text[pos] != '+' && text[pos] != '-') return std::nullopt;
  const int sign = text[pos] == '+' ? 1 : -1;
  ++pos;
  int oh = 0, om = 0;
  if (!take2(oh)) return std::nullopt;
  if (pos < text.size() && text[pos] == ':') ++pos;
  if (!take2(om)) return std::nullopt;
  if (pos != text.size() || oh > 18 || om > 59) return std::nullopt;
  ts.offset_minutes = sign * (oh * 60 + om);
  return ts;
}

std::string_view month_name(unsigned m) {
  static constexpr std::string_view kNames[] = {"Jan", "Feb", "Mar", "Apr", "May", "Jun",
                                                "Jul", "Aug", "Sep", "Oct", "Nov", "Dec"};
  return kNames[(m - 1) % 12];
}

std::string_view weekday_name(unsigned wd) {
  static constexpr std::string_view kNames[] = {"monday", "tuesday",  "wednesday", "thursday",
                                                "friday", "saturday", "sunday"};
  return kNames[wd % 7];
}

}  // namespace pachinko
