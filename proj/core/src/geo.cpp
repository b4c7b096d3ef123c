#include "pachinko/geo.hpp"

#include <cctype>
#include <cmath>

namespace pachinko {

namespace {

inline double to_radians(double deg) { return deg * M_PI / 180.0; }

inline char lower(char c) { return static_cast<char>(std::tolower(static_cast<unsigned char>(c))); }

inline bool is_word_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) != 0; }

}  // namespace

double haversine_miles(GeoPoint a, GeoPoint b) {
  const double phi1 = to_radians(a.lat);
  const double phi2 = to_radians(b.lat);
  const double dphi = to_radians(b.lat - a.lat);
  const double dlambda = to_radians(b.lon - a.lon);

  const double s1 = std::sin(dphi / 2.0);
  const double s2 = std::sin(dlambda / 2.0);
  double h = s1 * s1 + std::cos(phi1) * std::cos(phi2) * s2 * s2;
  if (h > 1.0) h = 1.0;  // guard asin against rounding
  return 2.0 * kEarthRadiusMiles * std::asin(std::sqrt(h));
}

bool contains_word(std::string_view haystack, std::string_view needle) {
  if (needle.empty() || haystack.size() < needle.size()) return false;
  for (std::size_t i = 0; i + needle.size() <= haystack.size(); ++i) {
    bool match = true;
    for (std::size_t j = 0; j < needle.size(); ++j) {
      if (lower(haystack[i + j]) != lower(needle[j])) {
        match = false;
        break;
      }
    }
    if (!match) continue;
    const bool left_ok = i == 0 || !is_word_char(haystack[i - 1]);
    const std::size_t end = i + needle.size();
    const bool right_ok = end == haystack.size() || !is_word_char(haystack[end]);
    if (left_ok && right_ok) return true;
  }
  return false;
}

namespace {

bool city_named_in(std::string_view text, const City& city) {
  if (contains_word(text, city.name)) return true;
  for (const auto& alias : city.aliases) {
    if (contains_word(text, alias)) return true;
  }
  return false;
}

std::optional<CityMatch> first_match(const CityGazetteer& gaz, CityMatchCriterion criterion,
                                     auto&& pred) {
  std::optional<CityMatch> found;
  for (const auto& city : gaz.cities) {
    if (!pred(city)) continue;
    if (!found) {
      found = CityMatch{city.name, criterion, false};
    } else {
      found->ambiguous = true;
      break;
    }
  }
  return found;
}

}  // namespace

std::optional<CityMatch> match_city(const TweetRecord& tweet, const CityGazetteer& gazetteer) {
  if (tweet.bio_location) {
    auto m = first_match(gazetteer, CityMatchCriterion::bio_location,
                         [&](const City& c) { return city_named_in(*tweet.bio_location, c); });
    if (m) return m;
  }
  if (tweet.geo) {
    auto m = first_match(gazetteer, CityMatchCriterion::geo_radius, [&](const City& c) {
      return haversine_miles(*tweet.geo, c.centre) <= gazetteer.radius_miles;
    });
    if (m) return m;
  }
  return first_match(gazetteer, CityMatchCriterion::body_mention,
                     [&](const City& c) { return city_named_in(tweet.text, c); });
}

}  // namespace pachinko
