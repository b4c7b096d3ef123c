#include "pachinko/count_models.hpp"

#include <algorithm>
#include <cmath>

#include <nlohmann/json.hpp>

#include "pachinko/csv.hpp"
#include "pachinko/error.hpp"
#include "pachinko/file_io.hpp"
#include "pachinko/special.hpp"

namespace pachinko {

namespace {

using nlohmann::json;

void require_counts(const std::vector<DailyCount>& counts, const char* fn) {
  if (counts.empty()) throw ValidationError(std::string(fn) + ": empty count series");
  for (const auto& c : counts) {
    if (c.count < 0) throw ValidationError(std::string(fn) + ": negative count");
  }
}

double sample_mean(const std::vector<DailyCount>& counts) {
  double sum = 0.0;
  for (const auto& c : counts) sum += static_cast<double>(c.count);
  return sum / static_cast<double>(counts.size());
}

// Profile log-likelihood of the NB model in r, with mu fixed at the sample
// mean (the MLE of mu for any r).
double nb_profile_loglik(const std::vector<DailyCount>& counts, double mu, double r) {
  const auto n = static_cast<double>(counts.size());
  double ll = n * (r * std::log(r / (r + mu)) - std::lgamma(r));
  const double log_ratio = std::log(mu / (r + mu));
  for (const auto& c : counts) {
    const auto k = static_cast<double>(c.count);
    ll += std::lgamma(r + k) - std::lgamma(k + 1.0) + k * log_ratio;
  }
  return ll;
}

double nb_profile_gradient(const std::vector<DailyCount>& counts, double mu, double r) {
  const auto n = static_cast<double>(counts.size());
  double g = n * (std::log(r / (r + mu)) - special::digamma(r));
  for (const auto& c : counts) g += special::digamma(r + static_cast<double>(c.count));
  return g;
}

double nb_profile_hessian(const std::vector<DailyCount>& counts, double mu, double r) {
  const auto n = static_cast<double>(counts.size());
  double h = n * (mu / (r * (r + mu)) - special::trigamma(r));
  for (const auto& c : counts) h += special::trigamma(r + static_cast<double>(c.count));
  return h;
}

}  // namespace

std::vector<DailyCount> daily_counts_from_jars(const JarGrid& jars) {
  std::map<Date, std::int64_t> by_date;
  for (const auto& [key, jar] : jars) by_date[key.date] += jar.indicative_count;
  std::vector<DailyCount> out;
  out.reserve(by_date.size());
  for (const auto& [date, count] : by_date) out.push_back({date, count});
  return out;
}

std::vector<DailyCount> load_daily_counts(const std::string& path) {
  const auto rows = csv::read_file(path);
  if (rows.empty()) throw ParseError(path + ": missing header row");
  if (rows.front().fields != std::vector<std::string>{"date", "count"}) {
    throw ParseError(path + ": expected header date,count");
  }
  std::vector<DailyCount> out;
  for (std::size_t r = 1; r < rows.size(); ++r) {
    const auto& row = rows[r];
    if (row.fields.size() == 1 && row.fields[0].empty()) continue;
    if (row.fields.size() != 2) {
      throw ParseError(path + ":" + std::to_string(row.line) + ": expected 2 fields");
    }
    const auto date = Date::parse_iso(row.fields[0]);
    if (!date) throw ParseError(path + ":" + std::to_string(row.line) + ": bad date");
    DailyCount dc;
    dc.date = *date;
    try {
      dc.count = std::stoll(row.fields[1]);
    } catch (const std::exception&) {
      throw ParseError(path + ":" + std::to_string(row.line) + ": bad count");
    }
    if (dc.count < 0) {
      throw ValidationError(path + ":" + std::to_string(row.line) + ": negative count");
    }
    out.push_back(dc);
  }
  return out;
}

void save_daily_counts(const std::string& path, const std::vector<DailyCount>& counts) {
  std::string out = "date,count\n";
  for (const auto& c : counts) {
    out += c.date.to_string();
    out += ',';
    out += csv::format_int(c.count);
    out += '\n';
  }
  write_text_file(path, out);
}

double poisson_log_pmf(std::int64_t k, double lambda) {
  if (k < 0) throw ValidationError("poisson_log_pmf: k < 0");
  if (!(lambda > 0)) throw ValidationError("poisson_log_pmf: lambda must be > 0");
  const auto kd = static_cast<double>(k);
  return -lambda + kd * std::log(lambda) - std::lgamma(kd + 1.0);
}

double nb_log_pmf(std::int64_t k, double mu, double r) {
  if (k < 0) throw ValidationError("nb_log_pmf: k < 0");
  if (!(mu > 0) || !(r > 0)) throw ValidationError("nb_log_pmf: mu and r must be > 0");
  const auto kd = static_cast<double>(k);
  return std::lgamma(r + kd) - std::lgamma(kd + 1.0) - std::lgamma(r) +
         kd * std::log(mu / (r + mu)) + r * std::log(r / (r + mu));
}

CountModelFit fit_poisson(const std::vector<DailyCount>& counts) {
  require_counts(counts, "fit_poisson");
  const double mean = sample_mean(counts);
  if (mean == 0.0) {
    throw ValidationError("fit_poisson: all counts are zero (degenerate lambda)");
  }
  CountModelFit fit;
  fit.family = CountFamily::poisson;
  fit.lambda = mean;
  double ll = 0.0;
  for (const auto& c : counts) ll += poisson_log_pmf(c.count, mean);
  fit.log_likelihood = ll;
  return fit;
}

CountModelFit fit_negbinom(const std::vector<DailyCount>& counts) {
  require_counts(counts, "fit_negbinom");
  const double mu = sample_mean(counts);
  if (mu == 0.0) throw ValidationError("fit_negbinom: all counts are zero");

  double var = 0.0;
  for (const auto& c : counts) {
    const double d = static_cast<double>(c.count) - mu;
    var += d * d;
  }
  var = counts.size() > 1 ? var / (static_cast<double>(counts.size()) - 1.0) : 0.0;

  CountModelFit fit;
  fit.family = CountFamily::negbinom;
  fit.mu = mu;

  if (var <= mu) {
    // Variance at or below the mean: the profile likelihood increases toward
    // r -> infinity (Poisson limit). Cap r and flag the fit.
    fit.underdispersed = true;
    fit.r = kDispersionCap;
    fit.log_likelihood = nb_profile_loglik(counts, mu, kDispersionCap);
    return fit;
  }

  // Golden-section search on log r.
  const double phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double lo = std::log(1e-6), hi = std::log(kDispersionCap);
  double x1 = hi - phi * (hi - lo);
  double x2 = lo + phi * (hi - lo);
  double f1 = nb_profile_loglik(counts, mu, std::exp(x1));
  double f2 = nb_profile_loglik(counts, mu, std::exp(x2));
  while (hi - lo > 1e-10) {
    if (f1 < f2) {
      lo = x1;
      x1 = x2;
      f1 = f2;
      x2 = lo + phi * (hi - lo);
      f2 = nb_profile_loglik(counts, mu, std::exp(x2));
    } else {
      hi = x2;
      x2 = x1;
      f2 = f1;
      x1 = hi - phi * (hi - lo);
      f1 = nb_profile_loglik(counts, mu, std::exp(x1));
    }
  }
  double r = std::exp((lo + hi) / 2.0);

  // Newton polish on the gradient, to relative tolerance 1e-8.
  for (int it = 0; it < 25; ++it) {
    const double g = nb_profile_gradient(counts, mu, r);
    const double h = nb_profile_hessian(counts, mu, r);
    if (h >= 0.0) break;  // not in the concave neighbourhood; keep golden-section result
    const double step = g / h;
    double next = r - step;
    if (!(next > 1e-6) || !(next < kDispersionCap)) break;
    const double rel = std::fabs(next - r) / r;
    r = next;
    if (rel < 1e-8) break;
  }

  fit.r = r;
  fit.log_likelihood = nb_profile_loglik(counts, mu, r);
  return fit;
}

DispersionStats dispersion_stats(const std::vector<DailyCount>& counts) {
  require_counts(counts, "dispersion_stats");
  if (counts.size() < 2) throw ValidationError("dispersion_stats: need n >= 2");
  DispersionStats s;
  s.mean = sample_mean(counts);
  double acc = 0.0;
  for (const auto& c : counts) {
    const double d = static_cast<double>(c.count) - s.mean;
    acc += d * d;
  }
  s.variance = acc / (static_cast<double>(counts.size()) - 1.0);
  s.ratio = s.mean > 0.0 ? s.variance / s.mean : 0.0;
  return s;
}

std::vector<std::pair<std::int64_t, double>> empirical_cdf(
    const std::vector<DailyCount>& counts) {
  require_counts(counts, "empirical_cdf");
  std::vector<std::int64_t> values;
  values.reserve(counts.size());
  for (const auto& c : counts) values.push_back(c.count);
  std::sort(values.begin(), values.end());

  std::vector<std::pair<std::int64_t, double>> out;
  const auto n = static_cast<double>(values.size());
  std::size_t i = 0;
  while (i < values.size()) {
    std::size_t j = i;
    while (j < values.size() && values[j] == values[i]) ++j;
    out.emplace_back(values[i], static_cast<double>(j) / n);
    i = j;
  }
  return out;
}

CountFitReport fit_count_models(const std::vector<DailyCount>& counts) {
  CountFitReport report;
  report.poisson = fit_poisson(counts);
  report.negbinom = fit_negbinom(counts);
  report.dispersion = dispersion_stats(counts);

  const auto ecdf = empirical_cdf(counts);
  const std::int64_t max_value = ecdf.back().first;
  const double lambda = *report.poisson.lambda;
  const double mu = *report.negbinom.mu;
  const double r = *report.negbinom.r;

  // Cumulative fitted CDFs over 0..max, sampled at the observed values.
  double pois_cdf = 0.0, nb_cdf = 0.0;
  std::size_t next_row = 0;
  for (std::int64_t k = 0; k <= max_value && next_row < ecdf.size(); ++k) {
    pois_cdf += std::exp(poisson_log_pmf(k, lambda));
    nb_cdf += std::exp(nb_log_pmf(k, mu, r));
    if (k == ecdf[next_row].first) {
      report.cdf_table.push_back({k, ecdf[next_row].second, std::min(pois_cdf, 1.0),
                                  std::min(nb_cdf, 1.0)});
      ++next_row;
    }
  }
  return report;
}

void save_count_fit_report(const std::string& path, const CountFitReport& report) {
  json j;
  j["format"] = "pachinko-counts/1";
  j["poisson"] = {{"lambda", *report.poisson.lambda},
                  {"log_likelihood", report.poisson.log_likelihood}};
  j["negbinom"] = {{"mu", *report.negbinom.mu},
                   {"r", *report.negbinom.r},
                   {"log_likelihood", report.negbinom.log_likelihood},
                   {"underdispersed", report.negbinom.underdispersed}};
  j["dispersion"] = {{"mean", report.dispersion.mean},
                     {"variance", report.dispersion.variance},
                     {"ratio", report.dispersion.ratio}};
  json table = json::array();
  for (const auto& row : report.cdf_table) {
    table.push_back({row.value, row.ecdf, row.poisson_cdf, row.negbinom_cdf});
  }
  j["cdf_table"] = table;
  write_text_file(path, j.dump(2) + "\n");
}

double load_r_from_report(const std::string& path) {
  json j;
  try {
    j = json::parse(read_text_file(path));
  } catch (const json::parse_error& e) {
    throw ParseError(path + ": invalid JSON: " + std::string(e.what()));
  }
  if (!j.contains("negbinom") || !j["negbinom"].contains("r")) {
    throw ValidationError(path + ": no negbinom.r in count-fit report");
  }
  return j["negbinom"]["r"].get<double>();
}

}  // namespace pachinko
