#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "pachinko/types.hpp"

namespace pachinko {

// How jars are grouped into strata sharing one prior/posterior.
enum class StrataScheme { none, location, month, location_month };

std::string_view to_string(StrataScheme scheme);
std::optional<StrataScheme> strata_scheme_from_string(std::string_view name);

// Whether strata trials/successes are counted in day-rows (reproduces the
// published per-strata tables) or in indicative tweets (the likelihood as
// written). Both are supported; days is the default.
enum class CountMode { days, tweets };

std::string_view to_string(CountMode mode);
std::optional<CountMode> count_mode_from_string(std::string_view name);

// Stratum key for a jar: "all", the city, the month-of-year name, or
// "city|month".
std::string stratum_key(const JarKey& key, StrataScheme scheme);

struct BetaParams {
  double a = 1.0;
  double b = 1.0;
  double mean() const { return a / (a + b); }
};

struct StrataCounts {
  std::string key;
  std::int64_t trials = 0;     // N_k
  std::int64_t successes = 0;  // E_k
};

struct PredictionRecord {
  JarKey key;
  BetaParams posterior;
  double posterior_mean = 0.0;
  std::string stratum;
  std::int64_t y = 0;                 // indicative count used
  std::vector<std::string> evidence;  // audit trail, copied from the jar
};

// Empirical-Bayes hyperparameters: a = event day-rows, b = non-event
// day-rows across the whole GSR. Errors when either side is zero.
BetaParams prior_from_gsr(const std::vector<GsrRecord>& gsr);

// Per-stratum (N_k, E_k). days mode counts day-rows / event day-rows from
// the GSR; tweets mode counts indicative tweets / those landing on event
// days from the jars. Strata are returned in key order; empty strata are
// allowed (posterior falls back to the prior).
std::vector<StrataCounts> strata_counts(const std::vector<GsrRecord>& gsr, const JarGrid& jars,
                                        StrataScheme scheme, CountMode mode);

// Beta(E_k + a, N_k - E_k + b).
BetaParams strata_posterior(const BetaParams& prior, const StrataCounts& counts);

// Beta(a + y, b + r): the negative-binomial likelihood in theta-power form
// adds y to the success exponent and the dispersion r to the failure one.
BetaParams day_posterior(const BetaParams& strata_post, std::int64_t y, double r);

// One record per jar: stratum posterior + day-level update from the jar's
// indicative count. r is the global dispersion estimate.
std::vector<PredictionRecord> predict_all(const std::vector<GsrRecord>& gsr, const JarGrid& jars,
                                          StrataScheme scheme, CountMode mode, double r);

// Same, but with pre-computed strata posteriors (used by split evaluation,
// where strata are aggregated from a training portion while predictions run
// on held-out jars). Jars whose stratum is missing fall back to the prior.
std::vector<PredictionRecord> predict_with_strata(
    const JarGrid& jars, const BetaParams& prior,
    const std::map<std::string, BetaParams>& strata_posteriors, StrataScheme scheme, double r);

// The non-predictive baseline: prior mean everywhere, no strata, no tweets.
std::vector<PredictionRecord> baseline_predictions(const JarGrid& jars, const BetaParams& prior);

// Predictions CSV, header:
// date,city,stratum,y,alpha_post,beta_post,posterior_mean,evidence_ids
void save_predictions(const std::string& path, const std::vector<PredictionRecord>& predictions);
std::vector<PredictionRecord> load_predictions(const std::string& path);

}  // namespace pachinko
