#pragma once

namespace volfit::specfun {

// All functions require x > 0 (arguments outside the stated domain throw
// std::domain_error) and are accurate to near machine precision except where
// noted.

double lgamma(double x);
double digamma(double x);
double trigamma(double x);

// Regularized incomplete gamma Q(s, x) = Gamma(s, x) / Gamma(s) and its
// complement P = 1 - Q.  s > 0, x >= 0.  P is computed by direct series for
// x < s + 1, so small values carry full relative accuracy.
double reg_gamma_q(double s, double x);
double reg_gamma_p(double s, double x);
double log_reg_gamma_p(double s, double x);

double erf(double x);
double erfc(double x);

// Standard normal CDF and its log; the log stays finite far into the left
// tail where Phi itself underflows.
double norm_cdf(double x);
double log_norm_cdf(double x);
double norm_pdf(double x);
double log_norm_pdf(double x);

}  // namespace volfit::specfun
