#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "pachinko/types.hpp"

namespace pachinko {

struct ScenarioCity {
  std::string name;
  double p_event = 0.1;
  std::optional<GeoPoint> centre;  // defaults: known capitals, else spaced synthetic coords
};

struct LeadSpec {
  enum class Kind { fixed, uniform };
  Kind kind = Kind::uniform;
  int value = 1;  // fixed
  int min = 1;    // uniform, inclusive
  int max = 7;
};

// Desk-scale generative scenario: Bernoulli events per (day, city), negative
// binomial indicative-tweet counts with separate means on event and
// non-event days, plus constant-rate distractor tweets and a separable
// labelled corpus for the relevance classifier.
struct SyntheticScenario {
  std::uint64_t seed = 0;
  Date start;
  Date end;  // inclusive
  std::vector<ScenarioCity> cities;
  double mu_event = 40.0;
  double mu_nonevent = 2.0;
  double r = 5.0;
  LeadSpec lead;
  int green_per_jar = 2;
  int corpus_positives = 200;
  int corpus_negatives = 200;
  std::map<std::string, double> month_multipliers;  // e.g. {"Dec": 0.5}
};

SyntheticScenario load_scenario(const std::string& path);
void save_scenario(const std::string& path, const SyntheticScenario& scenario);

struct SyntheticData {
  std::vector<GsrRecord> gsr;
  std::vector<TweetRecord> tweets;
  std::vector<std::string> corpus_texts;
  std::vector<bool> corpus_labels;
  CityGazetteer gazetteer;
};

// Deterministic in the scenario seed. Every generated tweet names its city
// in the body and carries an explicit future date, so it passes the
// location and temporal filters by construction.
SyntheticData generate_synthetic(const SyntheticScenario& scenario);

// Writes gsr.csv, tweets.jsonl, corpus.csv, gazetteer.json into out_dir.
void write_synthetic(const std::string& out_dir, const SyntheticData& data);

}  // namespace pachinko
