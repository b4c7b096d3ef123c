#include "pachinko/stats.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include <nlohmann/json.hpp>

#include "pachinko/csv.hpp"
#include "pachinko/error.hpp"
#include "pachinko/file_io.hpp"
#include "pachinko/special.hpp"

namespace pachinko {

namespace {

using nlohmann::json;

ContingencyTable table_from_groups(const std::map<std::string, std::array<std::int64_t, 2>>& acc,
                                   const std::vector<std::string>& order) {
  ContingencyTable t;
  for (const auto& label : order) {
    const auto it = acc.find(label);
    if (it == acc.end()) continue;
    t.rows.push_back(label);
    t.counts.push_back({it->second[0], it->second[1]});
  }
  return t;
}

}  // namespace

ContingencyTable city_event_table(const std::vector<GsrRecord>& gsr) {
  std::map<std::string, std::array<std::int64_t, 2>> acc;
  std::vector<std::string> order;
  for (const auto& rec : gsr) {
    if (!acc.count(rec.city)) order.push_back(rec.city);
    acc[rec.city][rec.event ? 0 : 1] += 1;
  }
  std::sort(order.begin(), order.end());
  return table_from_groups(acc, order);
}

ContingencyTable month_event_table(const std::vector<GsrRecord>& gsr) {
  std::map<std::string, std::array<std::int64_t, 2>> acc;
  std::vector<std::string> order;
  for (const auto& rec : gsr) {
    const std::string label{month_name(rec.date.month())};
    if (!acc.count(label)) order.push_back(label);
    acc[label][rec.event ? 0 : 1] += 1;
  }
  // Chronological by first appearance in the record, which is date-sorted in
  // practice; keep insertion order.
  return table_from_groups(acc, order);
}

ContingencyTable weekday_event_table(const std::vector<GsrRecord>& gsr) {
  std::map<std::string, std::array<std::int64_t, 2>> acc;
  std::vector<std::string> order;
  for (unsigned wd = 0; wd < 7; ++wd) order.emplace_back(weekday_name(wd));
  for (const auto& rec : gsr) {
    acc[std::string(weekday_name(rec.date.weekday_mon0()))][rec.event ? 0 : 1] += 1;
  }
  return table_from_groups(acc, order);
}

ChiSquaredResult chi_squared_test(const ContingencyTable& table) {
  const std::size_t rows = table.counts.size();
  if (rows < 2) throw ValidationError("chi_squared_test: need at least 2 rows");

  std::vector<double> row_totals(rows, 0.0);
  std::array<double, 2> col_totals{0.0, 0.0};
  double total = 0.0;
  for (std::size_t i = 0; i < rows; ++i) {
    for (int c = 0; c < 2; ++c) {
      if (table.counts[i][c] < 0) throw ValidationError("chi_squared_test: negative count");
      const auto v = static_cast<double>(table.counts[i][c]);
      row_totals[i] += v;
      col_totals[c] += v;
      total += v;
    }
  }
  for (std::size_t i = 0; i < rows; ++i) {
    if (row_totals[i] == 0.0) {
      throw ValidationError("chi_squared_test: zero marginal for row '" + table.rows[i] + "'");
    }
  }
  if (col_totals[0] == 0.0 || col_totals[1] == 0.0) {
    throw ValidationError("chi_squared_test: zero column marginal");
  }

  ChiSquaredResult result;
  for (std::size_t i = 0; i < rows; ++i) {
    for (int c = 0; c < 2; ++c) {
      const double expected = row_totals[i] * col_totals[c] / total;
      const double diff = static_cast<double>(table.counts[i][c]) - expected;
      result.statistic += diff * diff / expected;
    }
  }
  result.df = static_cast<int>(rows) - 1;  // (rows-1) * (cols-1), cols == 2
  result.p_value = special::chi_squared_sf(result.statistic, result.df);
  return result;
}

std::string_view to_string(CiMethod method) {
  return method == CiMethod::wilson ? "wilson" : "wald";
}

std::optional<CiMethod> ci_method_from_string(std::string_view name) {
  if (name == "wilson") return CiMethod::wilson;
  if (name == "wald") return CiMethod::wald;
  return std::nullopt;
}

Interval proportion_ci(std::int64_t successes, std::int64_t trials, double level,
                       CiMethod method) {
  if (trials < 1) throw ValidationError("proportion_ci: trials must be >= 1");
  if (successes < 0 || successes > trials) {
    throw ValidationError("proportion_ci: successes out of range");
  }
  if (!(level > 0.0 && level < 1.0)) throw ValidationError("proportion_ci: level in (0,1)");

  const double z = special::normal_quantile(0.5 + level / 2.0);
  const double n = static_cast<double>(trials);
  const double p = static_cast<double>(successes) / n;

  Interval ci;
  if (method == CiMethod::wald) {
    const double half = z * std::sqrt(p * (1.0 - p) / n);
    ci = {p - half, p + half};
  } else {
    const double z2 = z * z;
    const double denom = 1.0 + z2 / n;
    const double centre = (p + z2 / (2.0 * n)) / denom;
    const double half = z * std::sqrt(p * (1.0 - p) / n + z2 / (4.0 * n * n)) / denom;
    ci = {centre - half, centre + half};
  }
  ci.low = std::max(0.0, ci.low);
  ci.high = std::min(1.0, ci.high);
  return ci;
}

LogisticFit fit_logistic(const std::vector<double>& x, const std::vector<bool>& y) {
  const std::size_t n = x.size();
  if (n != y.size()) throw ValidationError("fit_logistic: size mismatch");
  if (n < 2) throw ValidationError("fit_logistic: need n >= 2");
  const auto positives = static_cast<std::size_t>(std::count(y.begin(), y.end(), true));
  if (positives == 0 || positives == n) {
    throw ValidationError("fit_logistic: both classes must be present");
  }

  constexpr double kTolerance = 1e-10;
  constexpr int kMaxIterations = 100;
  constexpr double kDivergenceBound = 1e4;

  auto log_likelihood = [&](double b0, double b1) {
    double ll = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double eta = b0 + b1 * x[i];
      // log sigma(eta) and log(1 - sigma(eta)) without overflow
      const double log1pe = eta > 0 ? eta + std::log1p(std::exp(-eta)) : std::log1p(std::exp(eta));
      ll += (y[i] ? eta : 0.0) - log1pe;
    }
    return ll;
  };

  LogisticFit fit;
  double b0 = 0.0, b1 = 0.0;
  double ll = log_likelihood(b0, b1);

  for (int it = 1; it <= kMaxIterations; ++it) {
    fit.iterations = it;
    // Gradient and Hessian of the log-likelihood.
    double g0 = 0.0, g1 = 0.0, h00 = 0.0, h01 = 0.0, h11 = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double eta = b0 + b1 * x[i];
      const double p = 1.0 / (1.0 + std::exp(-eta));
      const double w = p * (1.0 - p);
      const double resid = (y[i] ? 1.0 : 0.0) - p;
      g0 += resid;
      g1 += resid * x[i];
      h00 += w;
      h01 += w * x[i];
      h11 += w * x[i] * x[i];
    }
    const double det = h00 * h11 - h01 * h01;
    if (std::fabs(det) < 1e-300) break;  // weights collapsed: separation
    double step0 = (h11 * g0 - h01 * g1) / det;
    double step1 = (h00 * g1 - h01 * g0) / det;

    // Step-halving keeps the log-likelihood non-decreasing.
    double next_ll = log_likelihood(b0 + step0, b1 + step1);
    int halvings = 0;
    while (next_ll < ll && halvings < 50) {
      step0 /= 2.0;
      step1 /= 2.0;
      next_ll = log_likelihood(b0 + step0, b1 + step1);
      ++halvings;
    }
    b0 += step0;
    b1 += step1;
    ll = next_ll;

    if (std::fabs(b0) > kDivergenceBound || std::fabs(b1) > kDivergenceBound) break;
    if (std::fabs(step0) < kTolerance && std::fabs(step1) < kTolerance) {
      fit.converged = true;
      break;
    }
  }
  fit.intercept = b0;
  fit.slope = b1;
  return fit;
}

void save_association_report(
    const std::string& path,
    const std::vector<std::pair<std::string, ContingencyTable>>& tables) {
  json report = json::array();
  for (const auto& [factor, table] : tables) {
    const auto result = chi_squared_test(table);
    json jt;
    jt["factor"] = factor;
    jt["statistic"] = result.statistic;
    jt["df"] = result.df;
    jt["p_value"] = result.p_value;
    json rows = json::array();
    for (std::size_t i = 0; i < table.rows.size(); ++i) {
      rows.push_back({{"label", table.rows[i]},
                      {"events", table.counts[i][0]},
                      {"non_events", table.counts[i][1]}});
    }
    jt["table"] = rows;
    report.push_back(jt);
  }
  write_text_file(path, report.dump(2) + "\n");
}

void save_proportion_ci_csv(const std::string& path, const ContingencyTable& table,
                            double level, CiMethod method) {
  std::string out = "label,successes,trials,proportion,low,high\n";
  for (std::size_t i = 0; i < table.rows.size(); ++i) {
    const std::int64_t successes = table.counts[i][0];
    const std::int64_t trials = table.counts[i][0] + table.counts[i][1];
    const auto ci = proportion_ci(successes, trials, level, method);
    const double p = static_cast<double>(successes) / static_cast<double>(trials);
    out += csv::join_row({table.rows[i], csv::format_int(successes), csv::format_int(trials),
                          csv::format_double(p), csv::format_double(ci.low),
                          csv::format_double(ci.high)});
    out += '\n';
  }
  write_text_file(path, out);
}

}  // namespace pachinko
