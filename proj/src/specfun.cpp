#include "volfit/specfun.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "volfit/errors.hpp"

namespace volfit::specfun {

namespace {

constexpr double kLogSqrt2Pi = 0.91893853320467274178;
constexpr int kMaxIter = 1000000;

// log of the series part of P(s,x): P = sum * exp(-x + s ln x - lgamma(s)).
// Valid for x < s + 1 where the series converges quickly.
double gser_log(double s, double x) {
  double term = 1.0 / s;
  double sum = term;
  for (int k = 1; k <= kMaxIter; ++k) {
    term *= x / (s + k);
    sum += term;
    if (term < sum * 1e-17) {
      return std::log(sum) - x + s * std::log(x) - std::lgamma(s);
    }
  }
  throw NumericalError("reg_gamma_p: series did not converge");
}

// Q(s,x) by modified Lentz continued fraction, for x >= s + 1.
double gcf_q(double s, double x) {
  const double tiny = 1e-300;
  double b = x + 1.0 - s;
  double c = 1.0 / tiny;
  double d = 1.0 / (b == 0.0 ? tiny : b);
  double h = d;
  for (int i = 1; i <= kMaxIter; ++i) {
    const double an = -i * (i - s);
    b += 2.0;
    d = an * d + b;
    if (std::fabs(d) < tiny) d = tiny;
    c = b + an / c;
    if (std::fabs(c) < tiny) c = tiny;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::fabs(del - 1.0) < 1e-16) {
      return std::exp(-x + s * std::log(x) - std::lgamma(s)) * h;
    }
  }
  throw NumericalError("reg_gamma_q: continued fraction did not converge");
}

}  // namespace

double lgamma(double x) {
  if (!(x > 0.0)) throw std::domain_error("lgamma: x must be > 0");
  return std::lgamma(x);
}

double digamma(double x) {
  if (!(x > 0.0)) throw std::domain_error("digamma: x must be > 0");
  // Shift into the asymptotic region, then use the Bernoulli-number series.
  double acc = 0.0;
  while (x < 10.0) {
    acc -= 1.0 / x;
    x += 1.0;
  }
  const double inv = 1.0 / x;
  const double y = inv * inv;
  const double series =
      y * (1.0 / 12 -
           y * (1.0 / 120 -
                y * (1.0 / 252 -
                     y * (1.0 / 240 -
                          y * (1.0 / 132 - y * (691.0 / 32760 - y * (1.0 / 12)))))));
  return acc + std::log(x) - 0.5 * inv - series;
}

double trigamma(double x) {
  if (!(x > 0.0)) throw std::domain_error("trigamma: x must be > 0");
  double acc = 0.0;
  while (x < 10.0) {
    acc += 1.0 / (x * x);
    x += 1.0;
  }
  const double inv = 1.0 / x;
  const double y = inv * inv;
  const double inner =
      1.0 / 6 -
      y * (1.0 / 30 -
           y * (1.0 / 42 -
                y * (1.0 / 30 - y * (5.0 / 66 - y * (691.0 / 2730 - y * (7.0 / 6))))));
  return acc + inv + 0.5 * y + inv * y * inner;
}

double reg_gamma_q(double s, double x) {
  if (!(s > 0.0)) throw std::domain_error("reg_gamma_q: s must be > 0");
  if (x < 0.0) throw std::domain_error("reg_gamma_q: x must be >= 0");
  if (x == 0.0) return 1.0;
  if (x < s + 1.0) return 1.0 - std::exp(gser_log(s, x));
  return gcf_q(s, x);
}

double reg_gamma_p(double s, double x) {
  if (!(s > 0.0)) throw std::domain_error("reg_gamma_p: s must be > 0");
  if (x < 0.0) throw std::domain_error("reg_gamma_p: x must be >= 0");
  if (x == 0.0) return 0.0;
  if (x < s + 1.0) return std::exp(gser_log(s, x));
  return 1.0 - gcf_q(s, x);
}

double log_reg_gamma_p(double s, double x) {
  if (!(s > 0.0)) throw std::domain_error("log_reg_gamma_p: s must be > 0");
  if (x < 0.0) throw std::domain_error("log_reg_gamma_p: x must be >= 0");
  if (x == 0.0) return -std::numeric_limits<double>::infinity();
  if (x < s + 1.0) return gser_log(s, x);
  return std::log1p(-gcf_q(s, x));
}

double erf(double x) { return std::erf(x); }

double erfc(double x) { return std::erfc(x); }

double norm_cdf(double x) { return 0.5 * std::erfc(-x * M_SQRT1_2); }

double log_norm_cdf(double x) {
  // erfc keeps full precision down to where it underflows (x near -37).
  if (x > -36.0) return std::log(norm_cdf(x));
  // Deeper: Phi(x) ~ phi(x)/|x| * sum (-1)^k (2k-1)!!/x^(2k); at |x| >= 36
  // the term after 945/x^10 is below double precision.
  const double y = 1.0 / (x * x);
  const double corr =
      1.0 - y * (1.0 - y * (3.0 - y * (15.0 - y * (105.0 - 945.0 * y))));
  return -0.5 * x * x - kLogSqrt2Pi - std::log(-x) + std::log(corr);
}

double norm_pdf(double x) { return std::exp(-0.5 * x * x - kLogSqrt2Pi); }

double log_norm_pdf(double x) { return -0.5 * x * x - kLogSqrt2Pi; }

}  // namespace volfit::specfun
