#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "pachinko/types.hpp"

namespace pachinko {

// Factor level x {events, non-events} counts.
struct ContingencyTable {
  std::vector<std::string> rows;
  std::vector<std::array<std::int64_t, 2>> counts;  // {events, non_events} per row
};

ContingencyTable city_event_table(const std::vector<GsrRecord>& gsr);
ContingencyTable month_event_table(const std::vector<GsrRecord>& gsr);
ContingencyTable weekday_event_table(const std::vector<GsrRecord>& gsr);

struct ChiSquaredResult {
  double statistic = 0.0;
  int df = 0;
  double p_value = 1.0;
};

// Pearson chi-squared without continuity correction; p-value from the
// regularized upper incomplete gamma. Errors on zero marginals.
ChiSquaredResult chi_squared_test(const ContingencyTable& table);

enum class CiMethod { wilson, wald };

std::string_view to_string(CiMethod method);
std::optional<CiMethod> ci_method_from_string(std::string_view name);

struct Interval {
  double low = 0.0;
  double high = 0.0;
};

// Binomial proportion confidence interval; Wilson score by default, Wald
// behind the flag. Clipped to [0, 1].
Interval proportion_ci(std::int64_t successes, std::int64_t trials, double level = 0.95,
                       CiMethod method = CiMethod::wilson);

struct LogisticFit {
  double intercept = 0.0;
  double slope = 0.0;
  bool converged = false;
  int iterations = 0;
};

// One-predictor logistic regression by IRLS with step-halving, tolerance
// 1e-10, at most 100 iterations. Complete separation reports
// converged=false with the diverging coefficients as fitted so far.
LogisticFit fit_logistic(const std::vector<double>& x, const std::vector<bool>& y);

// Report JSON: one {factor, statistic, df, p_value, table} object per test.
void save_association_report(const std::string& path,
                             const std::vector<std::pair<std::string, ContingencyTable>>& tables);

// CI table CSV: label,successes,trials,proportion,low,high.
void save_proportion_ci_csv(const std::string& path, const ContingencyTable& table,
                            double level = 0.95, CiMethod method = CiMethod::wilson);

}  // namespace pachinko
