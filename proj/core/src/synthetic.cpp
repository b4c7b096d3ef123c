#include "pachinko/synthetic.hpp"

#include <algorithm>
#include <filesystem>

#include <nlohmann/json.hpp>

#include "pachinko/csv.hpp"
#include "pachinko/data_model.hpp"
#include "pachinko/error.hpp"
#include "pachinko/file_io.hpp"
#include "pachinko/rng.hpp"

namespace pachinko {

namespace {

using nlohmann::json;

// Text templates. Their vocabulary deliberately avoids month, weekday and
// relative-day words so the only temporal mention in a generated tweet is
// the planted date.
constexpr const char* kRedTemplates[] = {
    "Join the rally in %CITY% on %DATE%",
    "Protest against the cuts in %CITY% on %DATE%",
    "Strike action planned for %DATE% in %CITY%",
    "Workers unite in %CITY% on %DATE% bring your placards",
    "Demonstration outside parliament in %CITY% on %DATE%",
};

constexpr const char* kGreenTemplates[] = {
    "Coffee festival coming to %CITY% on %DATE%",
    "Great weather expected in %CITY% on %DATE%",
    "Footy highlights from %CITY% airing %DATE%",
    "New brunch spot opening in %CITY% on %DATE%",
    "Traffic update for %CITY% expected %DATE%",
};

constexpr const char* kPositivePool[] = {
    "protest", "rally",      "strike",  "demonstration", "workers", "unite",
    "placards", "action",    "cuts",    "parliament",    "picket",  "solidarity",
    "union",   "megaphone",  "banners", "wages",         "rights",  "demands",
};

constexpr const char* kNegativePool[] = {
    "coffee",  "festival", "weather", "footy",   "highlights", "brunch",
    "traffic", "update",   "sunny",   "concert", "tickets",    "beach",
    "recipe",  "score",    "cafe",    "holiday", "markets",    "cricket",
};

constexpr const char* kFillerPool[] = {"the", "in", "and", "for", "big", "new", "local", "city"};

std::string render_date(const Date& date, bool iso_style) {
  if (iso_style) return date.to_string();
  static constexpr const char* kMonths[] = {"January",   "February", "March",    "April",
                                            "May",       "June",     "July",     "August",
                                            "September", "October",  "November", "December"};
  return std::to_string(date.day()) + " " + kMonths[date.month() - 1] + " " +
         std::to_string(date.year());
}

std::string render_template(const char* tmpl, const std::string& city, const std::string& date) {
  std::string out = tmpl;
  const auto replace = [&out](const std::string& token, const std::string& value) {
    const auto pos = out.find(token);
    if (pos != std::string::npos) out.replace(pos, token.size(), value);
  };
  replace("%CITY%", city);
  replace("%DATE%", date);
  return out;
}

int sample_lead(const LeadSpec& lead, Rng& rng) {
  if (lead.kind == LeadSpec::Kind::fixed) return lead.value;
  return lead.min + static_cast<int>(rng.below(static_cast<std::uint64_t>(lead.max - lead.min + 1)));
}

template <std::size_t N>
const char* pick(const char* const (&pool)[N], Rng& rng) {
  return pool[rng.below(N)];
}

std::string corpus_text(Rng& rng, bool positive) {
  const int content_words = 5 + static_cast<int>(rng.below(5));
  const int fillers = 1 + static_cast<int>(rng.below(3));
  std::string text;
  for (int w = 0; w < content_words; ++w) {
    if (!text.empty()) text += ' ';
    text += positive ? pick(kPositivePool, rng) : pick(kNegativePool, rng);
  }
  for (int w = 0; w < fillers; ++w) {
    text += ' ';
    text += pick(kFillerPool, rng);
  }
  return text;
}

void validate(const SyntheticScenario& s) {
  if (s.cities.empty()) throw ValidationError("scenario: at least one city required");
  if (s.end < s.start) throw ValidationError("scenario: end before start");
  if (!(s.mu_event > s.mu_nonevent) || !(s.mu_nonevent > 0)) {
    throw ValidationError("scenario: require mu_event > mu_nonevent > 0");
  }
  if (!(s.r > 0)) throw ValidationError("scenario: r must be > 0");
  for (const auto& c : s.cities) {
    if (c.p_event < 0.0 || c.p_event > 1.0) {
      throw ValidationError("scenario: p_event out of [0,1] for " + c.name);
    }
  }
  if (s.green_per_jar < 0) throw ValidationError("scenario: green_per_jar must be >= 0");
  if (s.lead.kind == LeadSpec::Kind::fixed) {
    if (s.lead.value < 0) throw ValidationError("scenario: lead value must be >= 0");
  } else if (s.lead.min < 0 || s.lead.max < s.lead.min) {
    throw ValidationError("scenario: lead range must satisfy 0 <= min <= max");
  }
}

GeoPoint synthetic_centre(std::size_t index) {
  // Spread far enough apart that radius filters never overlap.
  return GeoPoint{-20.0 - 2.5 * static_cast<double>(index),
                  115.0 + 4.0 * static_cast<double>(index)};
}

}  // namespace

SyntheticData generate_synthetic(const SyntheticScenario& scenario) {
  validate(scenario);
  const Rng root(scenario.seed);
  Rng rng_events = root.fork("events");
  Rng rng_counts = root.fork("counts");
  Rng rng_leads = root.fork("leads");
  Rng rng_text = root.fork("texts");
  Rng rng_corpus = root.fork("corpus");

  SyntheticData data;

  // Gazetteer: known capitals keep their real centres.
  const CityGazetteer defaults = default_gazetteer();
  for (std::size_t i = 0; i < scenario.cities.size(); ++i) {
    const auto& sc = scenario.cities[i];
    City city;
    city.name = sc.name;
    if (sc.centre) {
      city.centre = *sc.centre;
    } else {
      city.centre = synthetic_centre(i);
      for (const auto& known : defaults.cities) {
        if (known.name == sc.name) {
          city.centre = known.centre;
          city.aliases = known.aliases;
          break;
        }
      }
    }
    data.gazetteer.cities.push_back(std::move(city));
  }

  std::int64_t tweet_counter = 0;
  auto make_tweet = [&](const std::string& city, Date target, const char* tmpl, Rng& text_rng) {
    const int lead = sample_lead(scenario.lead, rng_leads);
    const Date authored = target.plus_days(-lead);
    TweetRecord t;
    char id[24];
    std::snprintf(id, sizeof id, "t%08lld", static_cast<long long>(++tweet_counter));
    t.id = id;
    const bool iso_style = text_rng.below(2) == 0;
    t.text = render_template(tmpl, city, render_date(target, iso_style));
    t.authored_at = *Timestamp::parse_iso(authored.to_string() + "T09:30:00+10:00");
    return t;
  };

  for (const auto& sc : scenario.cities) {
    for (Date d = scenario.start; d <= scenario.end; d = d.plus_days(1)) {
      double p = sc.p_event;
      const auto mult = scenario.month_multipliers.find(std::string(month_name(d.month())));
      if (mult != scenario.month_multipliers.end()) p = std::clamp(p * mult->second, 0.0, 1.0);

      GsrRecord rec;
      rec.date = d;
      rec.city = sc.name;
      rec.event = rng_events.uniform() < p;
      data.gsr.push_back(rec);

      const double mu = rec.event ? scenario.mu_event : scenario.mu_nonevent;
      const std::int64_t reds = rng_counts.negative_binomial(mu, scenario.r);
      for (std::int64_t k = 0; k < reds; ++k) {
        data.tweets.push_back(
            make_tweet(sc.name, d, kRedTemplates[rng_text.below(std::size(kRedTemplates))],
                       rng_text));
      }
      for (int g = 0; g < scenario.green_per_jar; ++g) {
        data.tweets.push_back(
            make_tweet(sc.name, d, kGreenTemplates[rng_text.below(std::size(kGreenTemplates))],
                       rng_text));
      }
    }
  }

  for (int i = 0; i < scenario.corpus_positives; ++i) {
    data.corpus_texts.push_back(corpus_text(rng_corpus, true));
    data.corpus_labels.push_back(true);
  }
  for (int i = 0; i < scenario.corpus_negatives; ++i) {
    data.corpus_texts.push_back(corpus_text(rng_corpus, false));
    data.corpus_labels.push_back(false);
  }
  return data;
}

SyntheticScenario load_scenario(const std::string& path) {
  json j;
  try {
    j = json::parse(read_text_file(path));
  } catch (const json::parse_error& e) {
    throw ParseError(path + ": invalid JSON: " + std::string(e.what()));
  }
  SyntheticScenario s;
  s.seed = j.value("seed", 0ULL);
  const auto start = Date::parse_iso(j.at("start").get<std::string>());
  if (!start) throw ValidationError(path + ": bad start date");
  s.start = *start;
  if (j.contains("end")) {
    const auto end = Date::parse_iso(j["end"].get<std::string>());
    if (!end) throw ValidationError(path + ": bad end date");
    s.end = *end;
  } else if (j.contains("days")) {
    s.end = s.start.plus_days(j["days"].get<int>() - 1);
  } else {
    throw ValidationError(path + ": need 'end' or 'days'");
  }
  for (const auto& jc : j.at("cities")) {
    ScenarioCity c;
    c.name = jc.at("name").get<std::string>();
    c.p_event = jc.at("p_event").get<double>();
    if (jc.contains("lat") && jc.contains("lon")) {
      c.centre = GeoPoint{jc["lat"].get<double>(), jc["lon"].get<double>()};
    }
    s.cities.push_back(std::move(c));
  }
  s.mu_event = j.value("mu_event", s.mu_event);
  s.mu_nonevent = j.value("mu_nonevent", s.mu_nonevent);
  s.r = j.value("r", s.r);
  if (j.contains("lead")) {
    const auto& jl = j["lead"];
    const std::string kind = jl.value("kind", "uniform");
    if (kind == "fixed") {
      s.lead.kind = LeadSpec::Kind::fixed;
      s.lead.value = jl.at("value").get<int>();
    } else if (kind == "uniform") {
      s.lead.kind = LeadSpec::Kind::uniform;
      s.lead.min = jl.value("min", s.lead.min);
      s.lead.max = jl.value("max", s.lead.max);
    } else {
      throw ValidationError(path + ": lead.kind must be fixed or uniform");
    }
  }
  s.green_per_jar = j.value("green_per_jar", s.green_per_jar);
  s.corpus_positives = j.value("corpus_positives", s.corpus_positives);
  s.corpus_negatives = j.value("corpus_negatives", s.corpus_negatives);
  if (j.contains("month_multipliers")) {
    s.month_multipliers = j["month_multipliers"].get<std::map<std::string, double>>();
  }
  validate(s);
  return s;
}

void save_scenario(const std::string& path, const SyntheticScenario& s) {
  json j;
  j["seed"] = s.seed;
  j["start"] = s.start.to_string();
  j["end"] = s.end.to_string();
  j["cities"] = json::array();
  for (const auto& c : s.cities) {
    json jc;
    jc["name"] = c.name;
    jc["p_event"] = c.p_event;
    if (c.centre) {
      jc["lat"] = c.centre->lat;
      jc["lon"] = c.centre->lon;
    }
    j["cities"].push_back(jc);
  }
  j["mu_event"] = s.mu_event;
  j["mu_nonevent"] = s.mu_nonevent;
  j["r"] = s.r;
  if (s.lead.kind == LeadSpec::Kind::fixed) {
    j["lead"] = {{"kind", "fixed"}, {"value", s.lead.value}};
  } else {
    j["lead"] = {{"kind", "uniform"}, {"min", s.lead.min}, {"max", s.lead.max}};
  }
  j["green_per_jar"] = s.green_per_jar;
  j["corpus_positives"] = s.corpus_positives;
  j["corpus_negatives"] = s.corpus_negatives;
  if (!s.month_multipliers.empty()) j["month_multipliers"] = s.month_multipliers;
  write_text_file(path, j.dump(2) + "\n");
}

void write_synthetic(const std::string& out_dir, const SyntheticData& data) {
  namespace fs = std::filesystem;
  fs::create_directories(out_dir);
  const fs::path dir(out_dir);
  save_gsr((dir / "gsr.csv").string(), data.gsr);
  save_tweets((dir / "tweets.jsonl").string(), data.tweets);
  save_gazetteer((dir / "gazetteer.json").string(), data.gazetteer);

  std::string corpus = "text,label\n";
  for (std::size_t i = 0; i < data.corpus_texts.size(); ++i) {
    corpus += csv::join_row({data.corpus_texts[i], data.corpus_labels[i] ? "1" : "0"});
    corpus += '\n';
  }
  write_text_file((dir / "corpus.csv").string(), corpus);
}

}  // namespace pachinko
