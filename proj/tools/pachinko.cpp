// Command-line driver for the prediction pipeline. Stage outputs are plain
// files so every intermediate artifact can be inspected or re-used; `run`
// composes the stages end to end and writes a hashed manifest.

#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "pachinko/classifier.hpp"
#include "pachinko/count_models.hpp"
#include "pachinko/csv.hpp"
#include "pachinko/data_model.hpp"
#include "pachinko/error.hpp"
#include "pachinko/evaluation.hpp"
#include "pachinko/file_io.hpp"
#include "pachinko/filters.hpp"
#include "pachinko/pipeline.hpp"
#include "pachinko/stats.hpp"
#include "pachinko/synthetic.hpp"

namespace fs = std::filesystem;
using namespace pachinko;

namespace {

constexpr int kExitValidation = 2;
constexpr int kExitStageFailure = 3;

std::uint64_t seed_with_env(std::uint64_t seed) {
  PipelineConfig tmp;
  tmp.seed = seed;
  apply_seed_env(tmp);
  return tmp.seed;
}

StrataScheme parse_strata(const std::string& name) {
  const auto scheme = strata_scheme_from_string(name);
  if (!scheme) throw ValidationError("unknown strata scheme '" + name + "'");
  return *scheme;
}

CountMode parse_mode(const std::string& name) {
  const auto mode = count_mode_from_string(name);
  if (!mode) throw ValidationError("mode must be days or tweets");
  return *mode;
}

double resolve_r(const std::optional<double>& r_flag, const std::string& counts_fit_path) {
  if (r_flag) {
    if (!(*r_flag > 0.0)) throw ValidationError("--r must be > 0");
    return *r_flag;
  }
  if (!counts_fit_path.empty()) return load_r_from_report(counts_fit_path);
  throw ValidationError("no dispersion parameter: run fit-counts and pass --counts-fit, "
                        "or give an explicit --r");
}

std::vector<TweetRecord> relevant_only(std::vector<TweetRecord> tweets) {
  std::vector<TweetRecord> out;
  for (auto& t : tweets) {
    if (t.annotations.relevant && *t.annotations.relevant) out.push_back(std::move(t));
  }
  return out;
}

void cmd_filter(const std::string& gsr_path, const std::string& tweets_path,
                const std::string& gazetteer_path, const std::string& out_dir) {
  const CityGazetteer gazetteer =
      gazetteer_path.empty() ? default_gazetteer() : load_gazetteer(gazetteer_path);
  if (!gsr_path.empty()) {
    // Early validation only; the filter itself does not need the GSR.
    const auto gsr = load_gsr(gsr_path);
    for (const auto& rec : gsr) {
      if (!gazetteer.contains(rec.city)) {
        throw ValidationError("GSR city '" + rec.city + "' not in gazetteer");
      }
    }
  }
  auto tweets = load_tweets(tweets_path);
  FilterReport report;
  const auto survivors = apply_filters(std::move(tweets), gazetteer, &report);

  fs::create_directories(out_dir);
  save_tweets((fs::path(out_dir) / "filtered_tweets.jsonl").string(), survivors);
  std::string json_report = "{\n";
  json_report += "  \"input\": " + std::to_string(report.input) + ",\n";
  json_report += "  \"city_matched\": " + std::to_string(report.city_matched) + ",\n";
  json_report += "  \"future_referencing\": " + std::to_string(report.future_referencing) + ",\n";
  json_report += "  \"survivors\": " + std::to_string(report.survivors) + ",\n";
  json_report += "  \"ambiguous_city\": " + std::to_string(report.ambiguous_city) + "\n}\n";
  write_text_file((fs::path(out_dir) / "filter_report.json").string(), json_report);

  std::cout << "filter: " << report.input << " in, " << report.survivors << " kept ("
            << report.city_matched << " city-matched, " << report.future_referencing
            << " future-referencing, " << report.ambiguous_city << " ambiguous)\n";
}

void cmd_train_classifier(const std::string& corpus_path, int folds, std::uint64_t seed,
                          const std::string& kind_name, const std::string& out_path) {
  const auto [texts, labels] = load_labelled_corpus(corpus_path);
  TrainedClassifier model;
  if (kind_name == "auto") {
    CvReport cv;
    model = select_model(texts, labels, {kAllClassifierKinds.begin(), kAllClassifierKinds.end()},
                         folds, seed, &cv);
    std::cout << "selected " << cv.selected << " by " << folds << "-fold CV\n";
    for (const auto& [name, f1] : cv.mean_f1) {
      std::cout << "  " << name << ": mean F1 " << f1 << "\n";
    }
  } else {
    const auto kind = classifier_kind_from_string(kind_name);
    if (!kind) throw ValidationError("unknown classifier kind '" + kind_name + "'");
    TrainOptions options;
    options.seed = seed;
    model = train(*kind, texts, labels, options);
    std::cout << "trained " << kind_name << " on " << texts.size() << " documents\n";
  }
  save_classifier(out_path, model);
}

void cmd_classify(const std::string& model_path, const std::string& tweets_path,
                  const std::string& out_path) {
  const TrainedClassifier model = load_classifier(model_path);
  auto tweets = load_tweets(tweets_path);
  classify(model, tweets);
  save_tweets(out_path, tweets);
  std::int64_t relevant = 0;
  for (const auto& t : tweets) relevant += (t.annotations.relevant && *t.annotations.relevant);
  std::cout << "classify: " << relevant << "/" << tweets.size() << " relevant\n";
}

void cmd_build_jars(const std::string& gsr_path, const std::string& tweets_path,
                    const std::string& out_path) {
  const auto gsr = load_gsr(gsr_path);
  const auto relevant = relevant_only(load_tweets(tweets_path));
  JarGrid jars = build_jar_grid(gsr);
  const DropReport report = drop_tweets_into_jars(relevant, jars);
  save_jars(out_path, jars);
  std::cout << "build-jars: " << jars.size() << " jars, " << report.placed << " placed, "
            << report.dropped << " dropped\n";
}

void cmd_fit_counts(const std::string& jars_path, const std::string& out_path) {
  const JarGrid jars = load_jars(jars_path);
  const auto counts = daily_counts_from_jars(jars);
  const CountFitReport report = fit_count_models(counts);
  save_count_fit_report(out_path, report);
  std::cout << "fit-counts: lambda " << *report.poisson.lambda << ", mu " << *report.negbinom.mu
            << ", r " << *report.negbinom.r << " (variance/mean " << report.dispersion.ratio
            << ")\n";
}

void cmd_predict(const std::string& gsr_path, const std::string& jars_path,
                 const std::string& strata_name, const std::string& mode_name,
                 const std::optional<double>& r_flag, const std::string& counts_fit_path,
                 const std::string& out_path) {
  const double r = resolve_r(r_flag, counts_fit_path);
  const auto gsr = load_gsr(gsr_path);
  const JarGrid jars = load_jars(jars_path);
  const auto predictions =
      predict_all(gsr, jars, parse_strata(strata_name), parse_mode(mode_name), r);
  save_predictions(out_path, predictions);
  std::cout << "predict: " << predictions.size() << " records (strata " << strata_name
            << ", mode " << mode_name << ", r " << r << ")\n";
}

void cmd_evaluate(const std::string& gsr_path, const std::string& jars_path,
                  const std::optional<double>& r_flag, const std::string& counts_fit_path,
                  const std::string& mode_name, const std::optional<double>& split,
                  std::uint64_t seed, const std::string& out_dir) {
  const double r = resolve_r(r_flag, counts_fit_path);
  const auto gsr = load_gsr(gsr_path);
  const JarGrid jars = load_jars(jars_path);

  StandardEvalOptions options;
  options.r = r;
  options.mode = parse_mode(mode_name);
  options.split = split;
  options.seed = seed;
  const StandardEvalResult result = evaluate_standard_models(gsr, jars, options);

  fs::create_directories(out_dir);
  std::vector<std::pair<std::string, RocCurve>> curves;
  std::string summary = "model,auc\n";
  for (const auto& m : result.models) {
    curves.emplace_back(m.model, m.curve);
    summary += m.model + "," + csv::format_double(m.auc_value) + "\n";
    std::cout << "  " << m.model << ": AUC " << m.auc_value << "\n";
    for (const auto& w : m.warnings) std::cerr << "  warning: " << w << "\n";
  }
  write_roc_csv((fs::path(out_dir) / "roc_curves.csv").string(), curves);
  write_text_file((fs::path(out_dir) / "auc_summary.csv").string(), summary);
  std::vector<std::pair<std::string, RocCurve>> city_curves(result.per_city_curves.begin(),
                                                            result.per_city_curves.end());
  write_roc_csv((fs::path(out_dir) / "per_city_roc.csv").string(), city_curves);
}

void cmd_leadtime(const std::string& gsr_path, const std::string& tweets_path, int max_days,
                  const std::string& strata_name, const std::string& mode_name,
                  const std::optional<double>& r_flag, const std::string& counts_fit_path,
                  const std::string& out_path) {
  const double r = resolve_r(r_flag, counts_fit_path);
  const auto gsr = load_gsr(gsr_path);
  const auto relevant = relevant_only(load_tweets(tweets_path));
  const auto results =
      lead_time_auc(gsr, relevant, parse_strata(strata_name), parse_mode(mode_name), r, max_days);
  write_leadtime_csv(out_path, results);
  std::cout << "leadtime: n=0 AUC " << results.front().auc_value << ", n=" << max_days << " AUC "
            << results.back().auc_value << "\n";
}

void cmd_synth(const std::string& scenario_path, const std::string& out_dir) {
  SyntheticScenario scenario = load_scenario(scenario_path);
  scenario.seed = seed_with_env(scenario.seed);
  const SyntheticData data = generate_synthetic(scenario);
  write_synthetic(out_dir, data);
  std::int64_t events = 0;
  for (const auto& rec : data.gsr) events += rec.event;
  std::cout << "synth: " << data.gsr.size() << " GSR rows (" << events << " events), "
            << data.tweets.size() << " tweets, " << data.corpus_texts.size()
            << " corpus documents\n";
}

void cmd_report(const std::string& gsr_path, const std::string& predictions_path,
                const std::string& ci_name, const std::string& out_dir) {
  const auto ci = ci_method_from_string(ci_name);
  if (!ci) throw ValidationError("--ci must be wilson or wald");
  const auto gsr = load_gsr(gsr_path);
  const auto predictions = load_predictions(predictions_path);

  fs::create_directories(out_dir);
  const fs::path dir(out_dir);
  const auto city_table = city_event_table(gsr);
  const auto month_table = month_event_table(gsr);
  save_association_report((dir / "gsr_stats.json").string(),
                          {{"city", city_table},
                           {"month", month_table},
                           {"weekday", weekday_event_table(gsr)}});
  save_proportion_ci_csv((dir / "ci_cities.csv").string(), city_table, 0.95, *ci);
  save_proportion_ci_csv((dir / "ci_months.csv").string(), month_table, 0.95, *ci);
  write_tile_csv((dir / "tiles_truth.csv").string(), truth_tiles(gsr));
  write_tile_csv((dir / "tiles_predicted.csv").string(), prediction_tiles(predictions));

  // Low-tweet diagnostic from the per-jar counts carried by the predictions.
  const auto events = events_by_key(gsr);
  std::map<std::string, std::pair<std::vector<double>, std::vector<bool>>> by_city;
  std::string points = "city,count,event\n";
  for (const auto& rec : predictions) {
    const auto it = events.find(rec.key);
    if (it == events.end()) {
      throw ValidationError("prediction for " + rec.key.date.to_string() + "/" + rec.key.city +
                            " has no GSR row");
    }
    auto& slot = by_city[rec.key.city];
    slot.first.push_back(static_cast<double>(rec.y));
    slot.second.push_back(it->second);
    if (rec.y <= 25) {
      points += csv::join_row({rec.key.city, csv::format_int(rec.y), it->second ? "1" : "0"});
      points += '\n';
    }
  }
  write_text_file((dir / "lowtweet_points.csv").string(), points);

  std::string diag = "city,intercept,slope,converged,iterations\n";
  for (const auto& [city, slice] : by_city) {
    try {
      const LogisticFit fit = fit_logistic(slice.first, slice.second);
      diag += csv::join_row({city, csv::format_double(fit.intercept),
                             csv::format_double(fit.slope), fit.converged ? "1" : "0",
                             csv::format_int(fit.iterations)});
      diag += '\n';
    } catch (const Error&) {
      diag += csv::join_row({city, "", "", "", ""});
      diag += '\n';
    }
  }
  write_text_file((dir / "logistic_diagnostic.csv").string(), diag);
  std::cout << "report: wrote stats, CI tables, tiles and diagnostics to " << out_dir << "\n";
}

void cmd_run(const std::string& config_path, const std::string& out_override) {
  PipelineConfig config = load_config(config_path);
  if (!out_override.empty()) config.out_dir = out_override;
  const RunResult result = run(config);
  std::cout << "run: " << result.artifacts.size() << " artifacts in " << result.out_dir
            << " (classifier " << result.classifier_kind << ", r " << result.r_used << ")\n";
  for (const auto& w : result.warnings) std::cerr << "warning: " << w << "\n";
  std::cout << "manifest: " << result.manifest_path << "\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Bayesian civil-unrest forecasting from filtered social-media postings"};
  app.require_subcommand(1);

  // filter
  std::string gsr_path, tweets_path, gazetteer_path, out_dir, out_path;
  auto* filter = app.add_subcommand("filter", "Apply location and temporal filters");
  filter->add_option("--gsr", gsr_path, "GSR CSV (city sanity check)");
  filter->add_option("--tweets", tweets_path, "tweets JSONL")->required();
  filter->add_option("--gazetteer", gazetteer_path, "gazetteer JSON (default: built-in)");
  filter->add_option("--out", out_dir, "output directory")->required();
  filter->callback([&] { cmd_filter(gsr_path, tweets_path, gazetteer_path, out_dir); });

  // train-classifier
  std::string corpus_path, kind_name = "auto";
  int folds = 5;
  std::uint64_t seed = 0;
  auto* train_cmd = app.add_subcommand("train-classifier", "Select and train the relevance classifier");
  train_cmd->add_option("--corpus", corpus_path, "labelled corpus CSV (text,label)")->required();
  train_cmd->add_option("--folds", folds, "cross-validation folds")->default_val(5);
  train_cmd->add_option("--seed", seed, "fold/optimizer seed")->default_val(0);
  train_cmd->add_option("--kind", kind_name, "model kind or 'auto'")->default_val("auto");
  train_cmd->add_option("--out", out_path, "output model JSON")->required();
  train_cmd->callback([&] {
    cmd_train_classifier(corpus_path, folds, seed_with_env(seed), kind_name, out_path);
  });

  // classify
  std::string model_path;
  auto* classify_cmd = app.add_subcommand("classify", "Label tweets relevant/irrelevant");
  classify_cmd->add_option("--model", model_path, "trained model JSON")->required();
  classify_cmd->add_option("--tweets", tweets_path, "tweets JSONL")->required();
  classify_cmd->add_option("--out", out_path, "annotated tweets JSONL")->required();
  classify_cmd->callback([&] { cmd_classify(model_path, tweets_path, out_path); });

  // build-jars
  auto* jars_cmd = app.add_subcommand("build-jars", "Sort relevant tweets into (day, city) jars");
  jars_cmd->add_option("--gsr", gsr_path, "GSR CSV")->required();
  jars_cmd->add_option("--tweets", tweets_path, "classified tweets JSONL")->required();
  jars_cmd->add_option("--out", out_path, "jar grid CSV")->required();
  jars_cmd->callback([&] { cmd_build_jars(gsr_path, tweets_path, out_path); });

  // fit-counts
  std::string jars_path;
  auto* fit_cmd = app.add_subcommand("fit-counts", "Fit Poisson and negative-binomial count models");
  fit_cmd->add_option("--jars", jars_path, "jar grid CSV")->required();
  fit_cmd->add_option("--out", out_path, "fit report JSON")->required();
  fit_cmd->callback([&] { cmd_fit_counts(jars_path, out_path); });

  // predict
  std::string strata_name = "none", mode_name = "days", counts_fit_path;
  std::optional<double> r_flag;
  auto* predict_cmd = app.add_subcommand("predict", "Posterior event probabilities per jar");
  predict_cmd->add_option("--gsr", gsr_path, "GSR CSV")->required();
  predict_cmd->add_option("--jars", jars_path, "jar grid CSV")->required();
  predict_cmd->add_option("--strata", strata_name, "none|location|month|location-month")
      ->default_val("none");
  predict_cmd->add_option("--mode", mode_name, "days|tweets")->default_val("days");
  predict_cmd->add_option("--r", r_flag, "dispersion override");
  predict_cmd->add_option("--counts-fit", counts_fit_path, "fit-counts report JSON (source of r)");
  predict_cmd->add_option("--out", out_path, "predictions CSV")->required();
  predict_cmd->callback([&] {
    cmd_predict(gsr_path, jars_path, strata_name, mode_name, r_flag, counts_fit_path, out_path);
  });

  // evaluate
  std::optional<double> split;
  auto* eval_cmd = app.add_subcommand("evaluate", "ROC/AUC for the five benchmark models");
  eval_cmd->add_option("--gsr", gsr_path, "GSR CSV")->required();
  eval_cmd->add_option("--jars", jars_path, "jar grid CSV")->required();
  eval_cmd->add_option("--r", r_flag, "dispersion override");
  eval_cmd->add_option("--counts-fit", counts_fit_path, "fit-counts report JSON (source of r)");
  eval_cmd->add_option("--mode", mode_name, "days|tweets")->default_val("days");
  eval_cmd->add_option("--split", split, "train/test fraction, e.g. 0.7");
  eval_cmd->add_option("--seed", seed, "split seed")->default_val(0);
  eval_cmd->add_option("--out", out_dir, "output directory")->required();
  eval_cmd->callback([&] {
    cmd_evaluate(gsr_path, jars_path, r_flag, counts_fit_path, mode_name, split,
                 seed_with_env(seed), out_dir);
  });

  // leadtime
  int max_days = 30;
  auto* lead_cmd = app.add_subcommand("leadtime", "AUC decay for n-days-ahead prediction");
  lead_cmd->add_option("--gsr", gsr_path, "GSR CSV")->required();
  lead_cmd->add_option("--tweets", tweets_path, "classified tweets JSONL")->required();
  lead_cmd->add_option("--max", max_days, "largest lead time n")->default_val(30);
  lead_cmd->add_option("--strata", strata_name, "none|location|month|location-month")
      ->default_val("none");
  lead_cmd->add_option("--mode", mode_name, "days|tweets")->default_val("days");
  lead_cmd->add_option("--r", r_flag, "dispersion override");
  lead_cmd->add_option("--counts-fit", counts_fit_path, "fit-counts report JSON (source of r)");
  lead_cmd->add_option("--out", out_path, "lead-time CSV")->required();
  lead_cmd->callback([&] {
    cmd_leadtime(gsr_path, tweets_path, max_days, strata_name, mode_name, r_flag,
                 counts_fit_path, out_path);
  });

  // synth
  std::string scenario_path;
  auto* synth_cmd = app.add_subcommand("synth", "Generate a synthetic desk-scale dataset");
  synth_cmd->add_option("--scenario", scenario_path, "scenario JSON")->required();
  synth_cmd->add_option("--out", out_dir, "output directory")->required();
  synth_cmd->callback([&] { cmd_synth(scenario_path, out_dir); });

  // report
  std::string predictions_path, ci_name = "wilson";
  auto* report_cmd = app.add_subcommand("report", "Association tests, CI tables and plot data");
  report_cmd->add_option("--gsr", gsr_path, "GSR CSV")->required();
  report_cmd->add_option("--predictions", predictions_path, "predictions CSV")->required();
  report_cmd->add_option("--ci", ci_name, "wilson|wald")->default_val("wilson");
  report_cmd->add_option("--out", out_dir, "output directory")->required();
  report_cmd->callback([&] { cmd_report(gsr_path, predictions_path, ci_name, out_dir); });

  // run
  std::string config_path, out_override;
  auto* run_cmd = app.add_subcommand("run", "Full pipeline from a JSON config");
  run_cmd->add_option("--config", config_path, "pipeline config JSON")->required();
  run_cmd->add_option("--out", out_override, "override out_dir");
  run_cmd->callback([&] { cmd_run(config_path, out_override); });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  } catch (const StageError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitStageFailure;
  } catch (const ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitValidation;
  } catch (const ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitValidation;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitStageFailure;
  }
  return 0;
}
