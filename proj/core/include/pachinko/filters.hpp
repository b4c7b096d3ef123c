#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "pachinko/types.hpp"

namespace pachinko {

struct FilterReport {
  std::int64_t input = 0;
  std::int64_t city_matched = 0;
  std::int64_t future_referencing = 0;
  std::int64_t survivors = 0;
  std::int64_t ambiguous_city = 0;
};

// Location and temporal filters applied together: a tweet survives when it
// matches a gazetteer city AND carries at least one resolvable future date.
// Survivors come back annotated (matched_city, resolved_target_dates); no
// annotation is ever invented for an absent criterion.
std::vector<TweetRecord> apply_filters(std::vector<TweetRecord> tweets,
                                       const CityGazetteer& gazetteer,
                                       FilterReport* report = nullptr);

}  // namespace pachinko
