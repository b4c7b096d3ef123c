#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "pachinko/bayes.hpp"
#include "pachinko/stats.hpp"

namespace pachinko {

struct PipelineConfig {
  std::string gsr_path;
  std::string tweets_path;
  std::string corpus_path;
  std::string gazetteer_path;  // empty: built-in default gazetteer
  std::string out_dir;

  StrataScheme strata = StrataScheme::location_month;
  CountMode mode = CountMode::days;
  std::string classifier = "auto";  // or a specific kind name
  std::uint64_t seed = 0;
  int leadtime_max = 0;  // 0 disables the lead-time stage
  CiMethod ci = CiMethod::wilson;
  std::optional<double> r_override;
  std::optional<double> split;  // evaluation train/test split fraction
};

// JSON config; relative paths resolve against the config file's directory.
// The PACHINKO_SEED environment variable, when set, overrides the seed.
PipelineConfig load_config(const std::string& path);

// Applies PACHINKO_SEED to an in-memory config (used by CLI flag handling).
void apply_seed_env(PipelineConfig& config);

struct RunResult {
  std::string out_dir;
  std::string manifest_path;
  std::map<std::string, std::string> artifacts;  // name -> sha256
  double r_used = 0.0;
  std::string classifier_kind;
  std::vector<std::string> warnings;
};

// Full pipeline: filter -> classify -> jar fill -> count fit -> predict ->
// evaluate -> lead time -> reports -> manifest. Configuration problems throw
// ValidationError before any stage runs; a failing stage removes the
// artifacts written so far and rethrows as StageError.
RunResult run(const PipelineConfig& config);

}  // namespace pachinko
