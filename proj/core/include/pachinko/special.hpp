#pragma once

namespace pachinko::special {

// Digamma and trigamma via recurrence + asymptotic series (|error| < 1e-12
// for x > 0; both throw ValidationError for x <= 0).
double digamma(double x);
double trigamma(double x);

// Regularized incomplete gamma functions.
//   lower_gamma_p(s, x) = P(s, x) = gamma(s, x) / Gamma(s)
//   upper_gamma_q(s, x) = Q(s, x) = 1 - P(s, x)
// Series expansion for x < s + 1, continued fraction otherwise; accurate into
// the far tail (Q ~ 1e-300).
double lower_gamma_p(double s, double x);
double upper_gamma_q(double s, double x);

// Upper tail of the chi-squared distribution with df degrees of freedom.
double chi_squared_sf(double x, int df);

// Inverse standard-normal CDF. Acklam's rational approximation polished with
// one Halley step against erfc; good to ~1e-15 over (0, 1).
double normal_quantile(double p);

}  // namespace pachinko::special
