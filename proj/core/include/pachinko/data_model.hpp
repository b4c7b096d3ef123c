#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "pachinko/types.hpp"

namespace pachinko {

// GSR CSV, header: date,city,event[,headline[,violent]].
// Rejects malformed rows (with line numbers) and duplicate (date, city) keys.
std::vector<GsrRecord> load_gsr(const std::string& path);
void save_gsr(const std::string& path, const std::vector<GsrRecord>& records);

// Tweets as JSON-Lines: {"id","text","authored_at",["geo"],["bio_location"]}
// plus any annotation fields a previous stage wrote back. Duplicate ids are
// rejected; input order is preserved.
std::vector<TweetRecord> load_tweets(const std::string& path);
void save_tweets(const std::string& path, const std::vector<TweetRecord>& tweets);

// Gazetteer JSON: {"radius_miles": 25, "cities": [{"name","aliases","lat","lon"}]}.
CityGazetteer load_gazetteer(const std::string& path);
void save_gazetteer(const std::string& path, const CityGazetteer& gaz);
// The eight study cities with their canonical centres.
CityGazetteer default_gazetteer();

// One empty jar per GSR row. The grid deliberately follows GSR coverage, not
// the full date-by-city cross product: a missing GSR row means "no data",
// never "no event".
JarGrid build_jar_grid(const std::vector<GsrRecord>& gsr);

struct DropReport {
  std::int64_t placed = 0;         // (tweet, target date) pairs landing in a jar
  std::int64_t dropped = 0;        // pairs with no matching jar
  std::int64_t tweets_placed = 0;  // distinct tweets contributing >= 1 pair
};

// Sorts annotated tweets into jars: every (tweet, resolved target date) pair
// whose (date, matched city) jar exists increments that jar and appends the
// tweet id. A tweet with m resolved dates contributes to up to m jars.
// Callers pass only the tweets they consider indicative.
DropReport drop_tweets_into_jars(const std::vector<TweetRecord>& tweets, JarGrid& jars);

// Jar grid CSV, header: date,city,event,indicative_count,evidence_ids
// (evidence ids semicolon-joined).
void save_jars(const std::string& path, const JarGrid& jars);
JarGrid load_jars(const std::string& path);

}  // namespace pachinko
