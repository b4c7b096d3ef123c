#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "pachinko/bayes.hpp"
#include "pachinko/types.hpp"

namespace pachinko {

struct RocPoint {
  double fpr = 0.0;
  double tpr = 0.0;
  double threshold = 0.0;  // score >= threshold classified positive
};

// Monotone staircase from (0,0) to (1,1); one point per distinct score, with
// tied scores collapsed into a single (diagonal) step.
struct RocCurve {
  std::vector<RocPoint> points;
};

// Thresholds are the distinct scores in decreasing order. Throws
// ValidationError when labels are single-class.
RocCurve roc_curve(const std::vector<double>& scores, const std::vector<bool>& labels);

// Trapezoidal area; equal to the Mann-Whitney pair statistic with half
// credit for ties.
double auc(const RocCurve& curve);

struct ModelEval {
  std::string model;
  RocCurve curve;
  double auc_value = 0.0;
  std::map<std::string, double> per_city_auc;
  std::vector<std::string> warnings;  // skipped slices etc.
};

std::map<JarKey, bool> events_by_key(const std::vector<GsrRecord>& gsr);

// Scores one named prediction set against GSR events, overall and per city.
// City slices with a single class are skipped with a warning.
ModelEval evaluate_predictions(const std::string& name,
                               const std::vector<PredictionRecord>& predictions,
                               const std::map<JarKey, bool>& events);

struct StandardEvalOptions {
  double r = 1.0;
  CountMode mode = CountMode::days;
  std::optional<double> split;  // e.g. 0.7: train strata on 70%, score the rest
  std::uint64_t seed = 0;
  // Model whose per-city curves are kept (Fig.-8 style); empty keeps none.
  std::string per_city_curves_for = "location-month+tweets";
};

struct StandardEvalResult {
  std::vector<ModelEval> models;
  std::map<std::string, RocCurve> per_city_curves;
  std::optional<double> split;
  std::uint64_t seed = 0;
};

// The five benchmark models: the constant-prior baseline, tweets only, and
// the three stratified variants.
StandardEvalResult evaluate_standard_models(const std::vector<GsrRecord>& gsr,
                                            const JarGrid& jars,
                                            const StandardEvalOptions& options);

struct LeadTimeResult {
  int n = 0;
  double auc_value = 0.0;
  std::int64_t tweets_used = 0;
};

// For each n in 0..n_max: rebuild jars from only the (tweet, target) pairs
// authored at least n days ahead, re-run the predictor, and score it.
// n = 0 reproduces the standard pipeline evaluation bit-for-bit.
std::vector<LeadTimeResult> lead_time_auc(const std::vector<GsrRecord>& gsr,
                                          const std::vector<TweetRecord>& relevant_tweets,
                                          StrataScheme scheme, CountMode mode, double r,
                                          int n_max);

// Plot-data emission (all CSV, reparseable bit-exactly).
struct TileRow {
  Date date;
  std::string city;
  double value = 0.0;
};

void write_tile_csv(const std::string& path, const std::vector<TileRow>& rows);
std::vector<TileRow> read_tile_csv(const std::string& path);

void write_roc_csv(const std::string& path,
                   const std::vector<std::pair<std::string, RocCurve>>& curves);
std::vector<std::pair<std::string, RocCurve>> read_roc_csv(const std::string& path);

void write_leadtime_csv(const std::string& path, const std::vector<LeadTimeResult>& results);
std::vector<LeadTimeResult> read_leadtime_csv(const std::string& path);

std::vector<TileRow> truth_tiles(const std::vector<GsrRecord>& gsr);
std::vector<TileRow> prediction_tiles(const std::vector<PredictionRecord>& predictions);

}  // namespace pachinko
