#include "pachinko/filters.hpp"

#include <algorithm>

#include "pachinko/geo.hpp"
#include "pachinko/temporal.hpp"

namespace pachinko {

std::vector<TweetRecord> apply_filters(std::vector<TweetRecord> tweets,
                                       const CityGazetteer& gazetteer, FilterReport* report) {
  FilterReport local;
  std::vector<TweetRecord> survivors;
  local.input = static_cast<std::int64_t>(tweets.size());

  for (auto& tweet : tweets) {
    const auto city = match_city(tweet, gazetteer);
    if (city) ++local.city_matched;

    const auto mentions = resolve_temporal(tweet.text, tweet.authored_at);
    std::vector<Date> dates;
    dates.reserve(mentions.size());
    for (const auto& m : mentions) dates.push_back(m.resolved);
    std::sort(dates.begin(), dates.end());
    dates.erase(std::unique(dates.begin(), dates.end()), dates.end());
    if (!dates.empty()) ++local.future_referencing;

    if (!city || dates.empty()) continue;

    tweet.annotations.matched_city = city->city;
    tweet.annotations.city_ambiguous = city->ambiguous;
    tweet.annotations.resolved_target_dates = std::move(dates);
    if (city->ambiguous) ++local.ambiguous_city;
    ++local.survivors;
    survivors.push_back(std::move(tweet));
  }
  if (report) *report = local;
  return survivors;
}

}  // namespace pachinko
