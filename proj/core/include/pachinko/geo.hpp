#pragma once

#include <optional>
#include <string>
#include <string_view>

#include "pachinko/types.hpp"

namespace pachinko {

inline constexpr double kEarthRadiusMiles = 3958.8;

// Great-circle distance between two (lat, lon) points in degrees.
double haversine_miles(GeoPoint a, GeoPoint b);

// Which of the three location-filter criteria matched, in the fixed order
// they are checked.
enum class CityMatchCriterion { bio_location, geo_radius, body_mention };

struct CityMatch {
  std::string city;
  CityMatchCriterion criterion;
  // More than one gazetteer city satisfied the winning criterion; the first
  // in gazetteer order was kept.
  bool ambiguous = false;
};

// Location filter: bio substring, then geo radius, then body mention.
// Matching is case-insensitive on word boundaries for text criteria.
std::optional<CityMatch> match_city(const TweetRecord& tweet, const CityGazetteer& gazetteer);

// True if `needle` occurs in `haystack` delimited by non-alphanumerics
// (ASCII case-insensitive). Exposed for tests.
bool contains_word(std::string_view haystack, std::string_view needle);

}  // namespace pachinko
