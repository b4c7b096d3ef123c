#include "fixtures.hpp"

#include <unistd.h>

#include <algorithm>
#include <atomic>
#include <map>
#include <set>
#include <stdexcept>

namespace pachinko::testing {

namespace {

struct CitySpec {
  const char* name;
  int events;
  int missing_lead_days;  // days dropped from the start of the window
};

// Table-2 margins. Day counts follow from the 209-day window minus the
// missing lead days (206..209).
constexpr CitySpec kCities[] = {
    {"Adelaide", 12, 3}, {"Brisbane", 37, 0}, {"Canberra", 27, 3}, {"Darwin", 5, 1},
    {"Hobart", 11, 2},   {"Melbourne", 57, 0}, {"Perth", 30, 0},   {"Sydney", 47, 0},
};

const std::map<std::string, int> kMonthEvents = {{"Jul", 14}, {"Aug", 41}, {"Sep", 41},
                                                 {"Oct", 40}, {"Nov", 47}, {"Dec", 20},
                                                 {"Jan", 18}, {"Feb", 5}};

const char* kMonthOrder[] = {"Jul", "Aug", "Sep", "Oct", "Nov", "Dec", "Jan", "Feb"};

}  // namespace

std::vector<GsrRecord> table2_gsr() {
  const Date window_start(2017, 7, 21);
  const Date window_end(2018, 2, 14);

  // Days present per city, and capacity per (city, month).
  std::map<std::string, std::vector<Date>> days_by_city;
  std::map<std::pair<std::string, std::string>, std::vector<Date>> cell_days;
  for (const auto& spec : kCities) {
    std::vector<Date> days;
    for (Date d = window_start.plus_days(spec.missing_lead_days); d <= window_end;
         d = d.plus_days(1)) {
      days.push_back(d);
      cell_days[{spec.name, std::string(month_name(d.month()))}].push_back(d);
    }
    days_by_city[spec.name] = std::move(days);
  }

  // Distribute each month's events to the city with the largest remaining
  // need that still has free days in that month (ties: listed city order).
  std::map<std::string, int> remaining;
  for (const auto& spec : kCities) remaining[spec.name] = spec.events;
  std::map<std::pair<std::string, std::string>, int> assigned;
  for (const char* month : kMonthOrder) {
    for (int e = 0; e < kMonthEvents.at(month); ++e) {
      const CitySpec* best = nullptr;
      for (const auto& spec : kCities) {
        const auto cell = std::make_pair(std::string(spec.name), std::string(month));
        const auto cap_it = cell_days.find(cell);
        const int capacity = cap_it == cell_days.end() ? 0 : static_cast<int>(cap_it->second.size());
        if (remaining[spec.name] <= 0 || assigned[cell] >= capacity) continue;
        if (!best || remaining[spec.name] > remaining[best->name]) best = &spec;
      }
      if (!best) throw std::logic_error("table2_gsr: infeasible event assignment");
      ++assigned[{best->name, month}];
      --remaining[best->name];
    }
  }

  // Events occupy the earliest days of their (city, month) cell.
  std::set<std::pair<Date, std::string>> event_days;
  for (const auto& [cell, count] : assigned) {
    const auto& days = cell_days.at(cell);
    for (int i = 0; i < count; ++i) event_days.emplace(days[static_cast<std::size_t>(i)], cell.first);
  }

  std::vector<GsrRecord> gsr;
  for (const auto& spec : kCities) {
    for (const Date& d : days_by_city.at(spec.name)) {
      GsrRecord rec;
      rec.date = d;
      rec.city = spec.name;
      rec.event = event_days.count({d, spec.name}) > 0;
      gsr.push_back(rec);
    }
  }
  return gsr;
}

TempDir::TempDir(const std::string& tag) {
  static std::atomic<int> counter{0};
  path_ = std::filesystem::temp_directory_path() /
          ("pachinko-test-" + tag + "-" + std::to_string(::getpid()) + "-" +
           std::to_string(counter.fetch_add(1)));
  std::filesystem::create_directories(path_);
}

TempDir::~TempDir() {
  std::error_code ec;
  std::filesystem::remove_all(path_, ec);
}

}  // namespace pachinko::testing
