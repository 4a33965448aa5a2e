#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <stdexcept>

#include "volfit/specfun.hpp"

namespace sf = volfit::specfun;

// Reference values in this file were computed independently with 50-digit
// arithmetic and are quoted to full double precision.

namespace {
bool rel_close(double x, double ref, double tol) {
  return std::fabs(x - ref) <= tol * std::fabs(ref);
}
}  // namespace

TEST_CASE("log gamma reference values") {
  CHECK(sf::lgamma(0.001) == doctest::Approx(6.9071788853838537).epsilon(1e-14));
  CHECK(sf::lgamma(3.7) == doctest::Approx(1.4280723266653879).epsilon(1e-14));
  CHECK(sf::lgamma(42.5) == doctest::Approx(115.90007047041453).epsilon(1e-14));
  CHECK(rel_close(sf::lgamma(1e6), 12815504.569147612, 1e-14));
  CHECK(sf::lgamma(1.0) == doctest::Approx(0.0).epsilon(1e-15));
  CHECK(sf::lgamma(2.0) == doctest::Approx(0.0).epsilon(1e-15));
  CHECK(sf::lgamma(0.5) == doctest::Approx(0.57236494292470009).epsilon(1e-14));
}

TEST_CASE("log gamma recurrence and convexity") {
  for (double x : {0.001, 0.05, 0.4, 1.0, 1.5, 3.7, 12.0, 150.5, 4000.0}) {
    const double lhs = sf::lgamma(x + 1.0);
    const double rhs = sf::lgamma(x) + std::log(x);
    CHECK(lhs == doctest::Approx(rhs).epsilon(1e-12));
    // trigamma is the second derivative of lgamma; positivity is convexity.
    CHECK(sf::trigamma(x) > 0.0);
  }
}

TEST_CASE("digamma") {
  CHECK(sf::digamma(0.001) == doctest::Approx(-1000.5755719318103).epsilon(1e-13));
  CHECK(sf::digamma(3.7) == doctest::Approx(1.1671535393615114).epsilon(1e-13));
  CHECK(sf::digamma(1e6) == doctest::Approx(13.815510057964191).epsilon(1e-13));
  CHECK(sf::digamma(1.0) == doctest::Approx(-0.57721566490153287).epsilon(1e-13));
  for (double x : {0.02, 0.9, 2.3, 17.0, 900.0}) {
    CHECK(sf::digamma(x + 1.0) == doctest::Approx(sf::digamma(x) + 1.0 / x).epsilon(1e-12));
  }
}

TEST_CASE("trigamma") {
  CHECK(sf::trigamma(0.25) == doctest::Approx(17.197329154507111).epsilon(1e-12));
  CHECK(sf::trigamma(3.7) == doctest::Approx(0.31003785767003832).epsilon(1e-12));
  CHECK(sf::trigamma(1.0) == doctest::Approx(1.6449340668482264).epsilon(1e-12));
  for (double x : {0.1, 1.3, 6.0, 250.0}) {
    CHECK(sf::trigamma(x + 1.0) ==
          doctest::Approx(sf::trigamma(x) - 1.0 / (x * x)).epsilon(1e-11));
  }
}

TEST_CASE("regularized incomplete gamma") {
  CHECK(sf::reg_gamma_q(0.5, 0.25) == doctest::Approx(0.47950012218695346).epsilon(1e-13));
  CHECK(sf::reg_gamma_q(3.2, 7.5) == doctest::Approx(0.025760887613616583).epsilon(1e-13));
  CHECK(sf::reg_gamma_q(10.0, 3.0) == doctest::Approx(0.99889751186988452).epsilon(1e-13));
  CHECK(sf::reg_gamma_p(2.5, 0.5) == doctest::Approx(0.037434226752703631).epsilon(1e-13));

  SUBCASE("P and Q are complements") {
    for (double s : {0.3, 1.0, 4.2, 50.0}) {
      for (double x : {0.01, 0.8, 5.0, 60.0}) {
        CHECK(sf::reg_gamma_p(s, x) + sf::reg_gamma_q(s, x) == doctest::Approx(1.0).epsilon(1e-13));
      }
    }
  }
  SUBCASE("exponential special case s = 1") {
    for (double x : {0.1, 1.0, 7.0}) {
      CHECK(sf::reg_gamma_q(1.0, x) == doctest::Approx(std::exp(-x)).epsilon(1e-13));
    }
  }
  SUBCASE("boundary x = 0") {
    CHECK(sf::reg_gamma_q(2.5, 0.0) == 1.0);
    CHECK(sf::reg_gamma_p(2.5, 0.0) == 0.0);
  }
  SUBCASE("log of P keeps relative accuracy deep in the left tail") {
    CHECK(sf::log_reg_gamma_p(3.0, 1e-4) == doctest::Approx(-29.422855584969102).epsilon(1e-13));
    CHECK(sf::log_reg_gamma_p(0.7, 1e-6) == doctest::Approx(-9.575050104932587).epsilon(1e-13));
  }
  SUBCASE("monotone in x") {
    double prev = sf::reg_gamma_p(3.0, 0.0);
    for (double x = 0.5; x < 12.0; x += 0.5) {
      const double cur = sf::reg_gamma_p(3.0, x);
      CHECK(cur > prev);
      prev = cur;
    }
  }
}

TEST_CASE("error function") {
  CHECK(sf::erf(0.5) == doctest::Approx(0.52049987781304654).epsilon(1e-14));
  CHECK(sf::erf(2.5) == doctest::Approx(0.99959304798255504).epsilon(1e-14));
  CHECK(rel_close(sf::erfc(3.0), 2.2090496998585441e-5, 1e-13));
  CHECK(sf::erf(0.0) == 0.0);
  for (double x : {0.2, 1.1, 3.0}) {
    CHECK(sf::erf(-x) == doctest::Approx(-sf::erf(x)).epsilon(1e-15));
    CHECK(sf::erf(x) + sf::erfc(x) == doctest::Approx(1.0).epsilon(1e-14));
  }
}

TEST_CASE("normal distribution helpers") {
  CHECK(sf::norm_cdf(0.0) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(sf::norm_cdf(-1.5) == doctest::Approx(0.066807201268858066).epsilon(1e-13));
  CHECK(sf::norm_pdf(0.0) == doctest::Approx(0.39894228040143268).epsilon(1e-14));

  SUBCASE("log CDF stays finite where the CDF underflows") {
    CHECK(rel_close(sf::log_norm_cdf(-10.0), -53.231285150512471, 1e-12));
    CHECK(rel_close(sf::log_norm_cdf(-30.0), -454.3212439563432, 1e-12));
    CHECK(sf::log_norm_cdf(-3.0) == doctest::Approx(std::log(sf::norm_cdf(-3.0))).epsilon(1e-12));
  }
  SUBCASE("symmetry") {
    for (double x : {0.3, 1.4, 2.9}) {
      CHECK(sf::norm_cdf(x) + sf::norm_cdf(-x) == doctest::Approx(1.0).epsilon(1e-14));
    }
  }
  SUBCASE("log pdf consistency") {
    for (double x : {0.0, 0.7, 5.0, -22.0}) {
      CHECK(sf::log_norm_pdf(x) ==
            doctest::Approx(-0.5 * x * x - 0.91893853320467274).epsilon(1e-14));
    }
  }
}

TEST_CASE("domain validation") {
  CHECK_THROWS_AS((void)sf::lgamma(0.0), std::domain_error);
  CHECK_THROWS_AS((void)sf::lgamma(-2.0), std::domain_error);
  CHECK_THROWS_AS((void)sf::digamma(0.0), std::domain_error);
  CHECK_THROWS_AS((void)sf::trigamma(-1.0), std::domain_error);
  CHECK_THROWS_AS((void)sf::reg_gamma_q(0.0, 1.0), std::domain_error);
  CHECK_THROWS_AS((void)sf::reg_gamma_q(1.0, -0.5), std::domain_error);
}
