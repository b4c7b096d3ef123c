#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "pachinko/types.hpp"

namespace pachinko {

// Tweets referencing day i, aggregated over cities (or over whatever slice
// the caller pre-filtered).
struct DailyCount {
  Date date;
  std::int64_t count = 0;
};

enum class CountFamily { poisson, negbinom };

struct CountModelFit {
  CountFamily family = CountFamily::poisson;
  std::optional<double> lambda;  // Poisson rate
  std::optional<double> mu;      // NB mean
  std::optional<double> r;       // NB dispersion
  double log_likelihood = 0.0;
  // Set when the data show variance <= mean; the NB fit then degenerates
  // toward Poisson and r is capped at kDispersionCap.
  bool underdispersed = false;
};

inline constexpr double kDispersionCap = 1e6;

struct DispersionStats {
  double mean = 0.0;
  double variance = 0.0;  // unbiased (n-1)
  double ratio = 0.0;     // variance / mean
};

std::vector<DailyCount> daily_counts_from_jars(const JarGrid& jars);

// CSV with header date,count.
std::vector<DailyCount> load_daily_counts(const std::string& path);
void save_daily_counts(const std::string& path, const std::vector<DailyCount>& counts);

double poisson_log_pmf(std::int64_t k, double lambda);
// P(Y = k) = Gamma(r+k)/(k! Gamma(r)) (mu/(r+mu))^k (r/(r+mu))^r, in logs.
double nb_log_pmf(std::int64_t k, double mu, double r);

// lambda-hat = sample mean (closed form). Errors on empty or all-zero data.
CountModelFit fit_poisson(const std::vector<DailyCount>& counts);

// mu-hat = sample mean; r-hat maximizes the profile log-likelihood, searched
// on log r over [1e-6, 1e6] by golden section and polished with Newton steps
// on the digamma-based gradient.
CountModelFit fit_negbinom(const std::vector<DailyCount>& counts);

DispersionStats dispersion_stats(const std::vector<DailyCount>& counts);

// Right-continuous ECDF as (distinct value, cumulative fraction) pairs;
// the final fraction is exactly 1.
std::vector<std::pair<std::int64_t, double>> empirical_cdf(const std::vector<DailyCount>& counts);

struct CountFitReport {
  CountModelFit poisson;
  CountModelFit negbinom;
  DispersionStats dispersion;
  // Plot-ready CDF table rows: value, ecdf, fitted Poisson CDF, fitted NB CDF.
  struct CdfRow {
    std::int64_t value;
    double ecdf;
    double poisson_cdf;
    double negbinom_cdf;
  };
  std::vector<CdfRow> cdf_table;
};

CountFitReport fit_count_models(const std::vector<DailyCount>& counts);
void save_count_fit_report(const std::string& path, const CountFitReport& report);
// Reads back the dispersion parameter r from a saved report.
double load_r_from_report(const std::string& path);

}  // namespace pachinko
