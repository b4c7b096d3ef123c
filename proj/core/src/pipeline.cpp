#include "pachinko/pipeline.hpp"

#include <cstdlib>
#include <filesystem>
#include <set>

#include <nlohmann/json.hpp>

#include "pachinko/classifier.hpp"
#include "pachinko/count_models.hpp"
#include "pachinko/csv.hpp"
#include "pachinko/data_model.hpp"
#include "pachinko/error.hpp"
#include "pachinko/evaluation.hpp"
#include "pachinko/file_io.hpp"
#include "pachinko/filters.hpp"
#include "pachinko/rng.hpp"
#include "pachinko/sha256.hpp"

namespace pachinko {

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

std::string resolve_path(const fs::path& base, const std::string& p) {
  if (p.empty()) return p;
  fs::path candidate(p);
  if (candidate.is_absolute()) return candidate.string();
  return (base / candidate).lexically_normal().string();
}

}  // namespace

void apply_seed_env(PipelineConfig& config) {
  const char* env = std::getenv("PACHINKO_SEED");
  if (!env || !*env) return;
  char* end = nullptr;
  const unsigned long long value = std::strtoull(env, &end, 10);
  if (end == nullptr || *end != '\0') {
    throw ValidationError("PACHINKO_SEED must be an unsigned integer, got '" + std::string(env) +
                          "'");
  }
  config.seed = value;
}

PipelineConfig load_config(const std::string& path) {
  json j;
  try {
    j = json::parse(read_text_file(path));
  } catch (const json::parse_error& e) {
    throw ParseError(path + ": invalid JSON: " + std::string(e.what()));
  }
  const fs::path base = fs::path(path).parent_path();

  PipelineConfig config;
  config.gsr_path = resolve_path(base, j.value("gsr", ""));
  config.tweets_path = resolve_path(base, j.value("tweets", ""));
  config.corpus_path = resolve_path(base, j.value("corpus", ""));
  config.gazetteer_path = resolve_path(base, j.value("gazetteer", ""));
  config.out_dir = resolve_path(base, j.value("out_dir", "out"));

  if (j.contains("strata")) {
    const auto scheme = strata_scheme_from_string(j["strata"].get<std::string>());
    if (!scheme) throw ValidationError(path + ": unknown strata scheme");
    config.strata = *scheme;
  }
  if (j.contains("mode")) {
    const auto mode = count_mode_from_string(j["mode"].get<std::string>());
    if (!mode) throw ValidationError(path + ": mode must be days or tweets");
    config.mode = *mode;
  }
  config.classifier = j.value("classifier", "auto");
  config.seed = j.value("seed", 0ULL);
  config.leadtime_max = j.value("leadtime_max", 0);
  if (j.contains("ci")) {
    const auto ci = ci_method_from_string(j["ci"].get<std::string>());
    if (!ci) throw ValidationError(path + ": ci must be wilson or wald");
    config.ci = *ci;
  }
  if (j.contains("r") && !j["r"].is_null()) config.r_override = j["r"].get<double>();
  if (j.contains("split") && !j["split"].is_null()) config.split = j["split"].get<double>();

  apply_seed_env(config);
  return config;
}

namespace {

// Tracks artifacts written by run() so a failing stage can remove them.
class ArtifactSink {
 public:
  explicit ArtifactSink(fs::path dir) : dir_(std::move(dir)) {}

  std::string path_for(const std::string& name) {
    names_.push_back(name);
    return (dir_ / name).string();
  }

  void remove_all() noexcept {
    for (const auto& name : names_) {
      std::error_code ec;
      fs::remove(dir_ / name, ec);
    }
  }

  const std::vector<std::string>& names() const { return names_; }
  const fs::path& dir() const { return dir_; }

 private:
  fs::path dir_;
  std::vector<std::string> names_;
};

void validate_config(const PipelineConfig& config) {
  const auto require = [](const std::string& what, const std::string& path) {
    if (path.empty()) throw ValidationError("config: missing " + what + " path");
    if (!fs::exists(path)) throw ValidationError("config: " + what + " path does not exist: " + path);
  };
  require("gsr", config.gsr_path);
  require("tweets", config.tweets_path);
  require("corpus", config.corpus_path);
  if (!config.gazetteer_path.empty()) require("gazetteer", config.gazetteer_path);
  if (config.out_dir.empty()) throw ValidationError("config: missing out_dir");
  if (config.leadtime_max < 0 || config.leadtime_max > 365) {
    throw ValidationError("config: leadtime_max out of range");
  }
  if (config.classifier != "auto" && !classifier_kind_from_string(config.classifier)) {
    throw ValidationError("config: unknown classifier '" + config.classifier + "'");
  }
  if (config.split && !(*config.split > 0.0 && *config.split < 1.0)) {
    throw ValidationError("config: split must be in (0,1)");
  }
  if (config.r_override && !(*config.r_override > 0.0)) {
    throw ValidationError("config: r must be > 0");
  }
}

json model_eval_json(const ModelEval& eval) {
  json j;
  j["auc"] = eval.auc_value;
  j["per_city"] = eval.per_city_auc;
  j["warnings"] = eval.warnings;
  return j;
}

}  // namespace

RunResult run(const PipelineConfig& config) {
  validate_config(config);
  fs::create_directories(config.out_dir);
  ArtifactSink sink{fs::path(config.out_dir)};
  RunResult result;
  result.out_dir = config.out_dir;

  auto stage = [&](const char* name, auto&& body) {
    try {
      body();
    } catch (const std::exception& e) {
      sink.remove_all();
      throw StageError(name, e.what());
    }
  };

  // Inputs.
  std::vector<GsrRecord> gsr;
  std::vector<TweetRecord> tweets;
  CityGazetteer gazetteer;
  std::vector<std::string> corpus_texts;
  std::vector<bool> corpus_labels;
  stage("load", [&] {
    gsr = load_gsr(config.gsr_path);
    tweets = load_tweets(config.tweets_path);
    gazetteer = config.gazetteer_path.empty() ? default_gazetteer()
                                              : load_gazetteer(config.gazetteer_path);
    std::tie(corpus_texts, corpus_labels) = load_labelled_corpus(config.corpus_path);
    for (const auto& rec : gsr) {
      if (!gazetteer.contains(rec.city)) {
        throw ValidationError("GSR city '" + rec.city + "' not in gazetteer");
      }
    }
  });

  std::vector<TweetRecord> filtered;
  stage("filter", [&] {
    FilterReport report;
    filtered = apply_filters(std::move(tweets), gazetteer, &report);
    save_tweets(sink.path_for("filtered_tweets.jsonl"), filtered);
    json j;
    j["input"] = report.input;
    j["city_matched"] = report.city_matched;
    j["future_referencing"] = report.future_referencing;
    j["survivors"] = report.survivors;
    j["ambiguous_city"] = report.ambiguous_city;
    write_text_file(sink.path_for("filter_report.json"), j.dump(2) + "\n");
  });

  stage("classify", [&] {
    const std::uint64_t train_seed = Rng(config.seed).fork("classifier").next_u64();
    TrainedClassifier model;
    if (config.classifier == "auto") {
      CvReport cv;
      model = select_model(corpus_texts, corpus_labels,
                           {kAllClassifierKinds.begin(), kAllClassifierKinds.end()}, 5,
                           train_seed, &cv);
      result.classifier_kind = cv.selected;
    } else {
      const auto kind = classifier_kind_from_string(config.classifier);
      TrainOptions options;
      options.seed = train_seed;
      model = train(*kind, corpus_texts, corpus_labels, options);
      result.classifier_kind = config.classifier;
    }
    save_classifier(sink.path_for("classifier.json"), model);
    classify(model, filtered);
    save_tweets(sink.path_for("classified_tweets.jsonl"), filtered);
  });

  JarGrid jars;
  std::vector<TweetRecord> relevant;
  stage("jars", [&] {
    for (const auto& t : filtered) {
      if (t.annotations.relevant && *t.annotations.relevant) relevant.push_back(t);
    }
    jars = build_jar_grid(gsr);
    const DropReport report = drop_tweets_into_jars(relevant, jars);
    save_jars(sink.path_for("jars.csv"), jars);
    json j;
    j["jars"] = jars.size();
    j["relevant_tweets"] = relevant.size();
    j["placed"] = report.placed;
    j["dropped"] = report.dropped;
    j["tweets_placed"] = report.tweets_placed;
    write_text_file(sink.path_for("jar_report.json"), j.dump(2) + "\n");
  });

  double r_used = 0.0;
  stage("fit-counts", [&] {
    const auto counts = daily_counts_from_jars(jars);
    if (config.r_override) {
      r_used = *config.r_override;
      try {
        save_count_fit_report(sink.path_for("counts_fit.json"), fit_count_models(counts));
      } catch (const Error& e) {
        // Override supplied, so a degenerate series is only worth a note.
        json j;
        j["error"] = e.what();
        j["r_override"] = r_used;
        write_text_file(sink.path_for("counts_fit.json"), j.dump(2) + "\n");
        result.warnings.push_back(std::string("count fit skipped: ") + e.what());
      }
    } else {
      const auto report = fit_count_models(counts);
      save_count_fit_report(sink.path_for("counts_fit.json"), report);
      r_used = *report.negbinom.r;
      if (report.negbinom.underdispersed) {
        result.warnings.push_back("count series underdispersed; r capped");
      }
    }
  });
  result.r_used = r_used;

  std::vector<PredictionRecord> predictions;
  stage("predict", [&] {
    predictions = predict_all(gsr, jars, config.strata, config.mode, r_used);
    save_predictions(sink.path_for("predictions.csv"), predictions);
  });

  stage("evaluate", [&] {
    StandardEvalOptions options;
    options.r = r_used;
    options.mode = config.mode;
    options.split = config.split;
    options.seed = config.seed;
    const StandardEvalResult eval = evaluate_standard_models(gsr, jars, options);

    std::vector<std::pair<std::string, RocCurve>> curves;
    json summary;
    summary["seed"] = config.seed;
    summary["split"] = config.split ? json(*config.split) : json(nullptr);
    for (const auto& m : eval.models) {
      curves.emplace_back(m.model, m.curve);
      summary["models"][m.model] = model_eval_json(m);
      for (const auto& w : m.warnings) result.warnings.push_back(m.model + ": " + w);
    }
    write_roc_csv(sink.path_for("roc_curves.csv"), curves);

    std::vector<std::pair<std::string, RocCurve>> city_curves(eval.per_city_curves.begin(),
                                                              eval.per_city_curves.end());
    write_roc_csv(sink.path_for("per_city_roc.csv"), city_curves);
    write_text_file(sink.path_for("auc_summary.json"), summary.dump(2) + "\n");
  });

  if (config.leadtime_max > 0) {
    stage("leadtime", [&] {
      // No stratification here, matching the published lead-time analysis.
      const auto results = lead_time_auc(gsr, relevant, StrataScheme::none, config.mode, r_used,
                                         config.leadtime_max);
      write_leadtime_csv(sink.path_for("leadtime.csv"), results);
    });
  }

  stage("report", [&] {
    const auto city_table = city_event_table(gsr);
    const auto month_table = month_event_table(gsr);
    save_association_report(sink.path_for("gsr_stats.json"),
                            {{"city", city_table},
                             {"month", month_table},
                             {"weekday", weekday_event_table(gsr)}});
    save_proportion_ci_csv(sink.path_for("ci_cities.csv"), city_table, 0.95, config.ci);
    save_proportion_ci_csv(sink.path_for("ci_months.csv"), month_table, 0.95, config.ci);

    write_tile_csv(sink.path_for("tiles_truth.csv"), truth_tiles(gsr));
    write_tile_csv(sink.path_for("tiles_predicted.csv"), prediction_tiles(predictions));

    // Low-tweet diagnostic: per-city logistic fits of event on jar count.
    const auto events = events_by_key(gsr);
    std::map<std::string, std::pair<std::vector<double>, std::vector<bool>>> by_city;
    std::string points = "city,count,event\n";
    for (const auto& [key, jar] : jars) {
      auto& slot = by_city[key.city];
      slot.first.push_back(static_cast<double>(jar.indicative_count));
      slot.second.push_back(jar.event);
      if (jar.indicative_count <= 25) {
        points += csv::join_row(
            {key.city, csv::format_int(jar.indicative_count), jar.event ? "1" : "0"});
        points += '\n';
      }
    }
    write_text_file(sink.path_for("lowtweet_points.csv"), points);

    json diag;
    for (const auto& [city, slice] : by_city) {
      try {
        const LogisticFit fit = fit_logistic(slice.first, slice.second);
        diag[city] = {{"intercept", fit.intercept},
                      {"slope", fit.slope},
                      {"converged", fit.converged},
                      {"iterations", fit.iterations}};
      } catch (const Error& e) {
        diag[city] = {{"skipped", e.what()}};
      }
    }
    write_text_file(sink.path_for("logistic_diagnostic.json"), diag.dump(2) + "\n");
  });

  stage("manifest", [&] {
    json manifest;
    manifest["format"] = "pachinko-manifest/1";
    manifest["rng"] = std::string(kRngVersion);
    manifest["seed"] = config.seed;
    manifest["parameters"] = {
        {"strata", std::string(to_string(config.strata))},
        {"mode", std::string(to_string(config.mode))},
        {"classifier", config.classifier},
        {"leadtime_max", config.leadtime_max},
        {"ci", std::string(to_string(config.ci))},
        {"r_override", config.r_override ? json(*config.r_override) : json(nullptr)},
        {"split", config.split ? json(*config.split) : json(nullptr)},
    };
    json artifacts;
    for (const auto& name : sink.names()) {
      const std::string digest = Sha256::hex_digest_file((sink.dir() / name).string());
      artifacts[name] = digest;
      result.artifacts[name] = digest;
    }
    manifest["artifacts"] = artifacts;
    result.manifest_path = (sink.dir() / "manifest.json").string();
    write_text_file(result.manifest_path, manifest.dump(2) + "\n");
  });

  return result;
}

}  // namespace pachinko
