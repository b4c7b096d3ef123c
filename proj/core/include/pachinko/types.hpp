#pragma once

#include <compare>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "pachinko/date.hpp"

namespace pachinko {

struct GeoPoint {
  double lat = 0.0;  // degrees, [-90, 90]
  double lon = 0.0;  // degrees, [-180, 180]
};

// One row of the gold-standard record: did city j see an event on day i.
struct GsrRecord {
  Date date;
  std::string city;
  bool event = false;
  std::string headline;          // optional, may be empty
  std::optional<bool> violent;   // optional
};

// Pipeline annotations attached to a tweet as it passes the filters and the
// relevance classifier. Absent fields mean the corresponding stage has not
// run; they are never invented.
struct TweetAnnotations {
  std::vector<Date> resolved_target_dates;  // sorted, unique
  std::optional<std::string> matched_city;
  bool city_ambiguous = false;
  std::optional<bool> relevant;
};

struct TweetRecord {
  std::string id;
  std::string text;
  Timestamp authored_at;
  std::optional<GeoPoint> geo;
  std::optional<std::string> bio_location;
  TweetAnnotations annotations;
};

// Index of one jar: day i, location j.
struct JarKey {
  Date date;
  std::string city;
  auto operator<=>(const JarKey&) const = default;
};

// The (day, city) bin. indicative_count always equals evidence.size(); the
// evidence ids are the audit trail behind the count.
struct Jar {
  JarKey key;
  std::int64_t indicative_count = 0;
  std::vector<std::string> evidence;
  bool event = false;

  bool operator==(const Jar&) const = default;
};

// Ordered by key so that every iteration (and therefore every emitted file)
// is deterministic.
using JarGrid = std::map<JarKey, Jar>;

struct City {
  std::string name;
  std::vector<std::string> aliases;
  GeoPoint centre;
};

struct CityGazetteer {
  std::vector<City> cities;
  double radius_miles = 25.0;

  bool contains(const std::string& name) const {
    for (const auto& c : cities) {
      if (c.name == name) return true;
    }
    return false;
  }
};

}  // namespace pachinko
