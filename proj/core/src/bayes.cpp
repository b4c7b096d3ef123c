#include "pachinko/bayes.hpp"

#include <map>

#include "pachinko/csv.hpp"
#include "pachinko/error.hpp"
#include "pachinko/file_io.hpp"

namespace pachinko {

std::string_view to_string(StrataScheme scheme) {
  switch (scheme) {
    case StrataScheme::none: return "none";
    case StrataScheme::location: return "location";
    case StrataScheme::month: return "month";
    case StrataScheme::location_month: return "location-month";
  }
  return "?";
}

std::optional<StrataScheme> strata_scheme_from_string(std::string_view name) {
  for (StrataScheme s : {StrataScheme::none, StrataScheme::location, StrataScheme::month,
                         StrataScheme::location_month}) {
    if (name == to_string(s)) return s;
  }
  return std::nullopt;
}

std::string_view to_string(CountMode mode) {
  return mode == CountMode::days ? "days" : "tweets";
}

std::optional<CountMode> count_mode_from_string(std::string_view name) {
  if (name == "days") return CountMode::days;
  if (name == "tweets") return CountMode::tweets;
  return std::nullopt;
}

std::string stratum_key(const JarKey& key, StrataScheme scheme) {
  switch (scheme) {
    case StrataScheme::none:
      return "all";
    case StrataScheme::location:
      return key.city;
    case StrataScheme::month:
      return std::string(month_name(key.date.month()));
    case StrataScheme::location_month:
      return key.city + "|" + std::string(month_name(key.date.month()));
  }
  return "all";
}

BetaParams prior_from_gsr(const std::vector<GsrRecord>& gsr) {
  if (gsr.empty()) throw ValidationError("prior_from_gsr: empty GSR");
  std::int64_t events = 0;
  for (const auto& rec : gsr) events += rec.event ? 1 : 0;
  const std::int64_t non_events = static_cast<std::int64_t>(gsr.size()) - events;
  if (events == 0 || non_events == 0) {
    throw ValidationError("prior_from_gsr: degenerate beta (events=" + std::to_string(events) +
                          ", non-events=" + std::to_string(non_events) + ")");
  }
  return BetaParams{static_cast<double>(events), static_cast<double>(non_events)};
}

std::vector<StrataCounts> strata_counts(const std::vector<GsrRecord>& gsr, const JarGrid& jars,
                                        StrataScheme scheme, CountMode mode) {
  std::map<std::string, StrataCounts> acc;
  auto slot = [&](const std::string& key) -> StrataCounts& {
    auto& s = acc[key];
    s.key = key;
    return s;
  };

  if (mode == CountMode::days) {
    for (const auto& rec : gsr) {
      auto& s = slot(stratum_key(JarKey{rec.date, rec.city}, scheme));
      s.trials += 1;
      if (rec.event) s.successes += 1;
    }
  } else {
    for (const auto& [key, jar] : jars) {
      auto& s = slot(stratum_key(key, scheme));
      s.trials += jar.indicative_count;
      if (jar.event) s.successes += jar.indicative_count;
    }
    // Strata present in the GSR but with no tweets still exist (empty).
    for (const auto& rec : gsr) slot(stratum_key(JarKey{rec.date, rec.city}, scheme));
  }

  std::vector<StrataCounts> out;
  out.reserve(acc.size());
  for (auto& [key, counts] : acc) out.push_back(std::move(counts));
  return out;
}

BetaParams strata_posterior(const BetaParams& prior, const StrataCounts& counts) {
  if (counts.successes < 0 || counts.successes > counts.trials) {
    throw ValidationError("strata_posterior: require 0 <= E_k <= N_k");
  }
  return BetaParams{prior.a + static_cast<double>(counts.successes),
                    prior.b + static_cast<double>(counts.trials - counts.successes)};
}

BetaParams day_posterior(const BetaParams& strata_post, std::int64_t y, double r) {
  if (y < 0) throw ValidationError("day_posterior: y must be >= 0");
  if (!(r >= 0)) throw ValidationError("day_posterior: r must be >= 0");
  return BetaParams{strata_post.a + static_cast<double>(y), strata_post.b + r};
}

std::vector<PredictionRecord> predict_with_strata(
    const JarGrid& jars, const BetaParams& prior,
    const std::map<std::string, BetaParams>& strata_posteriors, StrataScheme scheme, double r) {
  if (!(r > 0)) throw ValidationError("predict: r must be > 0");
  std::vector<PredictionRecord> out;
  out.reserve(jars.size());
  for (const auto& [key, jar] : jars) {
    const std::string stratum = stratum_key(key, scheme);
    const auto it = strata_posteriors.find(stratum);
    const BetaParams strata_post = it != strata_posteriors.end() ? it->second : prior;
    PredictionRecord rec;
    rec.key = key;
    rec.stratum = stratum;
    rec.y = jar.indicative_count;
    rec.evidence = jar.evidence;
    rec.posterior = day_posterior(strata_post, jar.indicative_count, r);
    rec.posterior_mean = rec.posterior.mean();
    out.push_back(std::move(rec));
  }
  return out;
}

std::vector<PredictionRecord> predict_all(const std::vector<GsrRecord>& gsr, const JarGrid& jars,
                                          StrataScheme scheme, CountMode mode, double r) {
  const BetaParams prior = prior_from_gsr(gsr);
  std::map<std::string, BetaParams> posterior_by_stratum;
  for (const auto& counts : strata_counts(gsr, jars, scheme, mode)) {
    posterior_by_stratum[counts.key] = strata_posterior(prior, counts);
  }
  return predict_with_strata(jars, prior, posterior_by_stratum, scheme, r);
}

std::vector<PredictionRecord> baseline_predictions(const JarGrid& jars,
                                                   const BetaParams& prior) {
  std::vector<PredictionRecord> out;
  out.reserve(jars.size());
  for (const auto& [key, jar] : jars) {
    PredictionRecord rec;
    rec.key = key;
    rec.stratum = "all";
    rec.y = 0;
    rec.posterior = prior;
    rec.posterior_mean = prior.mean();
    out.push_back(std::move(rec));
  }
  return out;
}

void save_predictions(const std::string& path,
                      const std::vector<PredictionRecord>& predictions) {
  std::string out = "date,city,stratum,y,alpha_post,beta_post,posterior_mean,evidence_ids\n";
  for (const auto& rec : predictions) {
    std::string evidence;
    for (std::size_t i = 0; i < rec.evidence.size(); ++i) {
      if (i) evidence += ';';
      evidence += rec.evidence[i];
    }
    out += csv::join_row({rec.key.date.to_string(), rec.key.city, rec.stratum,
                          csv::format_int(rec.y), csv::format_double(rec.posterior.a),
                          csv::format_double(rec.posterior.b),
                          csv::format_double(rec.posterior_mean), evidence});
    out += '\n';
  }
  write_text_file(path, out);
}

std::vector<PredictionRecord> load_predictions(const std::string& path) {
  const auto rows = csv::read_file(path);
  if (rows.empty()) throw ParseError(path + ": missing header row");
  const std::vector<std::string> want = {"date",       "city",      "stratum",
                                         "y",          "alpha_post", "beta_post",
                                         "posterior_mean", "evidence_ids"};
  if (rows.front().fields != want) {
    throw ParseError(path + ": unexpected predictions header");
  }
  std::vector<PredictionRecord> out;
  for (std::size_t r = 1; r < rows.size(); ++r) {
    const auto& row = rows[r];
    if (row.fields.size() == 1 && row.fields[0].empty()) continue;
    if (row.fields.size() != want.size()) {
      throw ParseError(path + ":" + std::to_string(row.line) + ": expected " +
                       std::to_string(want.size()) + " fields");
    }
    PredictionRecord rec;
    const auto date = Date::parse_iso(row.fields[0]);
    if (!date) throw ParseError(path + ":" + std::to_string(row.line) + ": bad date");
    rec.key = JarKey{*date, row.fields[1]};
    rec.stratum = row.fields[2];
    try {
      rec.y = std::stoll(row.fields[3]);
      rec.posterior.a = std::stod(row.fields[4]);
      rec.posterior.b = std::stod(row.fields[5]);
      rec.posterior_mean = std::stod(row.fields[6]);
    } catch (const std::exception&) {
      throw ParseError(path + ":" + std::to_string(row.line) + ": bad numeric field");
    }
    if (!row.fields[7].empty()) {
      std::size_t start = 0;
      const std::string& ids = row.fields[7];
      while (start <= ids.size()) {
        const std::size_t semi = ids.find(';', start);
        if (semi == std::string::npos) {
          rec.evidence.push_back(ids.substr(start));
          break;
        }
        rec.evidence.push_back(ids.substr(start, semi - start));
        start = semi + 1;
      }
    }
    out.push_back(std::move(rec));
  }
  return out;
}

}  // namespace pachinko
