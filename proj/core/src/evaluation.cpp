#include "pachinko/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>

#include "pachinko/csv.hpp"
#include "pachinko/data_model.hpp"
#include "pachinko/error.hpp"
#include "pachinko/file_io.hpp"
#include "pachinko/rng.hpp"

namespace pachinko {

RocCurve roc_curve(const std::vector<double>& scores, const std::vector<bool>& labels) {
  if (scores.size() != labels.size()) throw ValidationError("roc_curve: size mismatch");
  if (scores.empty()) throw ValidationError("roc_curve: empty input");
  std::int64_t positives = 0;
  for (bool l : labels) positives += l ? 1 : 0;
  const std::int64_t negatives = static_cast<std::int64_t>(labels.size()) - positives;
  if (positives == 0 || negatives == 0) {
    throw ValidationError("roc_curve: both classes must be present");
  }

  std::vector<std::size_t> order(scores.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return scores[a] > scores[b];
  });

  RocCurve curve;
  curve.points.push_back({0.0, 0.0, std::numeric_limits<double>::infinity()});
  std::int64_t tp = 0, fp = 0;
  std::size_t i = 0;
  // Equal scores form a single step: the curve moves diagonally across the
  // whole tie group (half-credit Mann-Whitney semantics).
  while (i < order.size()) {
    const double threshold = scores[order[i]];
    std::size_t j = i;
    while (j < order.size() && scores[order[j]] == threshold) {
      if (labels[order[j]]) {
        ++tp;
      } else {
        ++fp;
      }
      ++j;
    }
    curve.points.push_back({static_cast<double>(fp) / static_cast<double>(negatives),
                            static_cast<double>(tp) / static_cast<double>(positives),
                            threshold});
    i = j;
  }
  return curve;
}

double auc(const RocCurve& curve) {
  double area = 0.0;
  for (std::size_t i = 1; i < curve.points.size(); ++i) {
    const auto& prev = curve.points[i - 1];
    const auto& next = curve.points[i];
    area += (next.fpr - prev.fpr) * (next.tpr + prev.tpr) / 2.0;
  }
  return area;
}

std::map<JarKey, bool> events_by_key(const std::vector<GsrRecord>& gsr) {
  std::map<JarKey, bool> events;
  for (const auto& rec : gsr) events[JarKey{rec.date, rec.city}] = rec.event;
  return events;
}

ModelEval evaluate_predictions(const std::string& name,
                               const std::vector<PredictionRecord>& predictions,
                               const std::map<JarKey, bool>& events) {
  ModelEval eval;
  eval.model = name;

  std::vector<double> scores;
  std::vector<bool> labels;
  std::map<std::string, std::pair<std::vector<double>, std::vector<bool>>> by_city;
  scores.reserve(predictions.size());
  labels.reserve(predictions.size());
  for (const auto& rec : predictions) {
    const auto it = events.find(rec.key);
    if (it == events.end()) {
      throw ValidationError("evaluate: prediction for " + rec.key.date.to_string() + "/" +
                            rec.key.city + " has no GSR row");
    }
    scores.push_back(rec.posterior_mean);
    labels.push_back(it->second);
    auto& slot = by_city[rec.key.city];
    slot.first.push_back(rec.posterior_mean);
    slot.second.push_back(it->second);
  }

  eval.curve = roc_curve(scores, labels);
  eval.auc_value = auc(eval.curve);
  for (const auto& [city, slice] : by_city) {
    try {
      eval.per_city_auc[city] = auc(roc_curve(slice.first, slice.second));
    } catch (const ValidationError&) {
      eval.warnings.push_back("city slice '" + city + "' skipped: single-class labels");
    }
  }
  return eval;
}

StandardEvalResult evaluate_standard_models(const std::vector<GsrRecord>& gsr,
                                            const JarGrid& jars,
                                            const StandardEvalOptions& options) {
  StandardEvalResult result;
  result.split = options.split;
  result.seed = options.seed;

  // Partition: everything is both train and eval unless a split is asked for.
  std::vector<GsrRecord> train_gsr;
  JarGrid train_jars;
  JarGrid eval_jars;
  if (options.split) {
    const double fraction = *options.split;
    if (!(fraction > 0.0 && fraction < 1.0)) {
      throw ValidationError("evaluate: split must be in (0,1)");
    }
    std::vector<JarKey> keys;
    keys.reserve(jars.size());
    for (const auto& [key, jar] : jars) keys.push_back(key);
    Rng rng = Rng(options.seed).fork("train-test-split");
    rng.shuffle(keys);
    const auto n_train = static_cast<std::size_t>(
        std::llround(fraction * static_cast<double>(keys.size())));
    std::set<JarKey> train_keys(keys.begin(), keys.begin() + static_cast<std::ptrdiff_t>(n_train));
    for (const auto& [key, jar] : jars) {
      (train_keys.count(key) ? train_jars : eval_jars).emplace(key, jar);
    }
    for (const auto& rec : gsr) {
      if (train_keys.count(JarKey{rec.date, rec.city})) train_gsr.push_back(rec);
    }
    if (eval_jars.empty() || train_gsr.empty()) {
      throw ValidationError("evaluate: split left an empty partition");
    }
  } else {
    train_gsr = gsr;
    train_jars = jars;
    eval_jars = jars;
  }

  const BetaParams prior = prior_from_gsr(train_gsr);
  const auto events = events_by_key(gsr);

  auto stratified = [&](StrataScheme scheme) {
    std::map<std::string, BetaParams> posteriors;
    for (const auto& counts : strata_counts(train_gsr, train_jars, scheme, options.mode)) {
      posteriors[counts.key] = strata_posterior(prior, counts);
    }
    return predict_with_strata(eval_jars, prior, posteriors, scheme, options.r);
  };

  const std::vector<std::pair<std::string, std::vector<PredictionRecord>>> model_predictions = {
      {"overall", baseline_predictions(eval_jars, prior)},
      {"tweets-only", stratified(StrataScheme::none)},
      {"location+tweets", stratified(StrataScheme::location)},
      {"month+tweets", stratified(StrataScheme::month)},
      {"location-month+tweets", stratified(StrataScheme::location_month)},
  };

  for (const auto& [name, predictions] : model_predictions) {
    result.models.push_back(evaluate_predictions(name, predictions, events));
    if (name == options.per_city_curves_for) {
      std::map<std::string, std::pair<std::vector<double>, std::vector<bool>>> by_city;
      for (const auto& rec : predictions) {
        auto& slot = by_city[rec.key.city];
        slot.first.push_back(rec.posterior_mean);
        slot.second.push_back(events.at(rec.key));
      }
      for (const auto& [city, slice] : by_city) {
        try {
          result.per_city_curves[city] = roc_curve(slice.first, slice.second);
        } catch (const ValidationError&) {
          // warning already recorded by evaluate_predictions
        }
      }
    }
  }
  return result;
}

std::vector<LeadTimeResult> lead_time_auc(const std::vector<GsrRecord>& gsr,
                                          const std::vector<TweetRecord>& relevant_tweets,
                                          StrataScheme scheme, CountMode mode, double r,
                                          int n_max) {
  if (n_max < 0) throw ValidationError("lead_time_auc: n_max must be >= 0");
  const auto events = events_by_key(gsr);

  std::vector<LeadTimeResult> results;
  results.reserve(static_cast<std::size_t>(n_max) + 1);
  for (int n = 0; n <= n_max; ++n) {
    // Keep only target dates authored at least n days ahead.
    std::vector<TweetRecord> pruned;
    pruned.reserve(relevant_tweets.size());
    for (const auto& tweet : relevant_tweets) {
      TweetRecord copy = tweet;
      std::vector<Date> kept;
      for (const Date& target : tweet.annotations.resolved_target_dates) {
        if (target - tweet.authored_at.local_date >= n) kept.push_back(target);
      }
      copy.annotations.resolved_target_dates = std::move(kept);
      pruned.push_back(std::move(copy));
    }

    JarGrid grid = build_jar_grid(gsr);
    const DropReport report = drop_tweets_into_jars(pruned, grid);
    const auto predictions = predict_all(gsr, grid, scheme, mode, r);

    std::vector<double> scores;
    std::vector<bool> labels;
    for (const auto& rec : predictions) {
      scores.push_back(rec.posterior_mean);
      labels.push_back(events.at(rec.key));
    }
    LeadTimeResult lt;
    lt.n = n;
    lt.tweets_used = report.tweets_placed;
    lt.auc_value = auc(roc_curve(scores, labels));
    results.push_back(lt);
  }
  return results;
}

void write_tile_csv(const std::string& path, const std::vector<TileRow>& rows) {
  std::string out = "date,city,value\n";
  for (const auto& row : rows) {
    out += csv::join_row({row.date.to_string(), row.city, csv::format_double(row.value)});
    out += '\n';
  }
  write_text_file(path, out);
}

std::vector<TileRow> read_tile_csv(const std::string& path) {
  const auto rows = csv::read_file(path);
  if (rows.empty() || rows.front().fields != std::vector<std::string>{"date", "city", "value"}) {
    throw ParseError(path + ": expected header date,city,value");
  }
  std::vector<TileRow> out;
  for (std::size_t r = 1; r < rows.size(); ++r) {
    const auto& row = rows[r];
    if (row.fields.size() == 1 && row.fields[0].empty()) continue;
    const auto date = Date::parse_iso(row.fields.at(0));
    if (!date) throw ParseError(path + ":" + std::to_string(row.line) + ": bad date");
    out.push_back({*date, row.fields.at(1), std::stod(row.fields.at(2))});
  }
  return out;
}

void write_roc_csv(const std::string& path,
                   const std::vector<std::pair<std::string, RocCurve>>& curves) {
  std::string out = "model,fpr,tpr,threshold\n";
  for (const auto& [name, curve] : curves) {
    for (const auto& p : curve.points) {
      out += csv::join_row({name, csv::format_double(p.fpr), csv::format_double(p.tpr),
                            csv::format_double(p.threshold)});
      out += '\n';
    }
  }
  write_text_file(path, out);
}

std::vector<std::pair<std::string, RocCurve>> read_roc_csv(const std::string& path) {
  const auto rows = csv::read_file(path);
  if (rows.empty() ||
      rows.front().fields != std::vector<std::string>{"model", "fpr", "tpr", "threshold"}) {
    throw ParseError(path + ": expected header model,fpr,tpr,threshold");
  }
  std::vector<std::pair<std::string, RocCurve>> out;
  for (std::size_t r = 1; r < rows.size(); ++r) {
    const auto& row = rows[r];
    if (row.fields.size() == 1 && row.fields[0].empty()) continue;
    const std::string& name = row.fields.at(0);
    if (out.empty() || out.back().first != name) out.push_back({name, RocCurve{}});
    out.back().second.points.push_back({std::stod(row.fields.at(1)), std::stod(row.fields.at(2)),
                                        std::stod(row.fields.at(3))});
  }
  return out;
}

void write_leadtime_csv(const std::string& path, const std::vector<LeadTimeResult>& results) {
  std::string out = "n,auc,tweets_used\n";
  for (const auto& r : results) {
    out += csv::join_row({csv::format_int(r.n), csv::format_double(r.auc_value),
                          csv::format_int(r.tweets_used)});
    out += '\n';
  }
  write_text_file(path, out);
}

std::vector<LeadTimeResult> read_leadtime_csv(const std::string& path) {
  const auto rows = csv::read_file(path);
  if (rows.empty() ||
      rows.front().fields != std::vector<std::string>{"n", "auc", "tweets_used"}) {
    throw ParseError(path + ": expected header n,auc,tweets_used");
  }
  std::vector<LeadTimeResult> out;
  for (std::size_t r = 1; r < rows.size(); ++r) {
    const auto& row = rows[r];
    if (row.fields.size() == 1 && row.fields[0].empty()) continue;
    LeadTimeResult lt;
    lt.n = std::stoi(row.fields.at(0));
    lt.auc_value = std::stod(row.fields.at(1));
    lt.tweets_used = std::stoll(row.fields.at(2));
    out.push_back(lt);
  }
  return out;
}

std::vector<TileRow> truth_tiles(const std::vector<GsrRecord>& gsr) {
  std::vector<TileRow> rows;
  rows.reserve(gsr.size());
  for (const auto& rec : gsr) rows.push_back({rec.date, rec.city, rec.event ? 1.0 : 0.0});
  return rows;
}

std::vector<TileRow> prediction_tiles(const std::vector<PredictionRecord>& predictions) {
  std::vector<TileRow> rows;
  rows.reserve(predictions.size());
  for (const auto& rec : predictions) {
    rows.push_back({rec.key.date, rec.key.city, rec.posterior_mean});
  }
  return rows;
}

}  // namespace pachinko
