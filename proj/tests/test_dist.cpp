#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <stdexcept>
#include <vector>

#include "volfit/diag.hpp"
#include "volfit/dist.hpp"
#include "volfit/errors.hpp"

using volfit::dist::DistModel;
using volfit::dist::Kind;
namespace dist = volfit::dist;

// Reference pdf/cdf/moment values were computed independently with 50-digit
// arithmetic.

TEST_CASE("GIGa reference values") {
  const auto m = DistModel::giga(0.721, 14.1, 3.96);
  CHECK(dist::log_pdf(m, 14.1) == doctest::Approx(-2.5057927043518075).epsilon(1e-13));
  CHECK(dist::pdf(m, 20.0) == doctest::Approx(0.044873632011440042).epsilon(1e-13));
  CHECK(dist::cdf(m, 20.0) == doctest::Approx(0.63539957577499513).epsilon(1e-13));
  CHECK(dist::pdf(m, 0.0) == 0.0);
  CHECK(dist::pdf(m, -3.0) == 0.0);
  CHECK(dist::log_pdf(m, -3.0) == -std::numeric_limits<double>::infinity());
  CHECK(dist::cdf(m, 0.0) == 0.0);
}

TEST_CASE("GGa reference values") {
  const auto m = DistModel::gga(2.5, 1.3, 0.8);
  CHECK(dist::pdf(m, 2.0) == doctest::Approx(0.17362279562399561).epsilon(1e-13));
  CHECK(dist::cdf(m, 2.0) == doctest::Approx(0.2727371396973501).epsilon(1e-13));
  const auto mv = dist::mean_var(m);
  CHECK(mv.mean == doctest::Approx(4.3253669148458103).epsilon(1e-13));
  CHECK(mv.variance == doctest::Approx(11.802573730219897).epsilon(1e-12));
}

TEST_CASE("moments") {
  SUBCASE("GIGa finite cases") {
    const auto mv = dist::mean_var(DistModel::giga(2.2, 1.7, 1.3));
    CHECK(mv.mean == doctest::Approx(1.3670563182850222).epsilon(1e-13));
    CHECK(mv.variance == doctest::Approx(1.7072109641648775).epsilon(1e-12));
    const auto mv2 = dist::mean_var(DistModel::giga(1.5, 1.0, 2.0));
    CHECK(mv2.mean == doctest::Approx(1.1283791670955126).epsilon(1e-13));
    CHECK(mv2.variance == doctest::Approx(0.72676045526483731).epsilon(1e-12));
  }
  SUBCASE("GIGa variance diverges at alpha*gamma <= 2") {
    CHECK(std::isinf(dist::mean_var(DistModel::giga(1.0, 1.0, 2.0)).variance));
    CHECK(std::isinf(dist::mean_var(DistModel::iga(2.0, 1.0)).variance));
  }
  SUBCASE("GIGa mean undefined at alpha*gamma <= 1") {
    CHECK_THROWS_AS((void)dist::mean_var(DistModel::giga(0.9, 1.0, 1.0)), std::domain_error);
  }
  SUBCASE("Student t") {
    const auto mv = dist::mean_var(DistModel::student_t(0.3, 1.2, 3.5));
    CHECK(mv.mean == doctest::Approx(0.3));
    CHECK(mv.variance == doctest::Approx(3.36).epsilon(1e-13));
    CHECK(std::isinf(dist::mean_var(DistModel::student_t(0.0, 1.0, 1.5)).variance));
    CHECK_THROWS_AS((void)dist::mean_var(DistModel::student_t(0.0, 1.0, 0.8)),
                    std::domain_error);
  }
  SUBCASE("lognormal closed forms") {
    const auto mv = dist::mean_var(DistModel::lognormal(0.1, 0.5));
    CHECK(mv.mean == doctest::Approx(std::exp(0.1 + 0.125)).epsilon(1e-14));
    CHECK(mv.variance ==
          doctest::Approx(std::expm1(0.25) * std::exp(0.2 + 0.25)).epsilon(1e-13));
  }
  SUBCASE("gamma closed forms") {
    const auto mv = dist::mean_var(DistModel::ga(4.0, 1.5));
    CHECK(mv.mean == doctest::Approx(6.0).epsilon(1e-14));
    CHECK(mv.variance == doctest::Approx(9.0).epsilon(1e-13));
  }
}

TEST_CASE("gamma = 1 members coincide with the general family") {
  const auto giga1 = DistModel::giga(2.7, 1.4, 1.0);
  const auto iga = DistModel::iga(2.7, 1.4);
  const auto gga1 = DistModel::gga(2.7, 1.4, 1.0);
  const auto ga = DistModel::ga(2.7, 1.4);
  for (double x : {0.1, 0.8, 1.4, 3.0, 10.0}) {
    CHECK(dist::pdf(giga1, x) == doctest::Approx(dist::pdf(iga, x)).epsilon(1e-12));
    CHECK(dist::cdf(giga1, x) == doctest::Approx(dist::cdf(iga, x)).epsilon(1e-12));
    CHECK(dist::pdf(gga1, x) == doctest::Approx(dist::pdf(ga, x)).epsilon(1e-12));
    CHECK(dist::cdf(gga1, x) == doctest::Approx(dist::cdf(ga, x)).epsilon(1e-12));
  }
}

TEST_CASE("reciprocal duality between GIGa and GGa") {
  // X ~ GIGa(a, b, g) exactly when 1/X ~ GGa(a, 1/b, g).
  const auto giga = DistModel::giga(1.8, 0.9, 2.3);
  const auto gga = DistModel::gga(1.8, 1.0 / 0.9, 2.3);
  for (double x : {0.2, 0.7, 1.1, 2.5, 8.0}) {
    CHECK(dist::pdf(giga, x) ==
          doctest::Approx(dist::pdf(gga, 1.0 / x) / (x * x)).epsilon(1e-12));
    CHECK(dist::cdf(giga, x) == doctest::Approx(1.0 - dist::cdf(gga, 1.0 / x)).epsilon(1e-12));
  }
}

TEST_CASE("square root of an IGa variable is GIGa with gamma 2") {
  const auto v = DistModel::iga(3.0, 2.0);
  const auto s = DistModel::giga(3.0, std::sqrt(2.0), 2.0);
  for (double x : {0.4, 0.8, 1.2, 2.0}) {
    CHECK(dist::pdf(s, x) == doctest::Approx(2.0 * x * dist::pdf(v, x * x)).epsilon(1e-12));
    CHECK(dist::cdf(s, x) == doctest::Approx(dist::cdf(v, x * x)).epsilon(1e-12));
  }
}

TEST_CASE("Student t reference values") {
  const auto m = DistModel::student_t(0.3, 1.2, 3.5);
  CHECK(dist::pdf(m, 1.1) == doctest::Approx(0.23674498329709145).epsilon(1e-13));
  CHECK(dist::cdf(m, 1.1) == doctest::Approx(0.72683366749015184).epsilon(1e-13));
  CHECK(dist::cdf(m, -2.0) == doctest::Approx(0.068934345971835453).epsilon(1e-13));
  CHECK(dist::cdf(m, 0.3) == doctest::Approx(0.5).epsilon(1e-13));
}

TEST_CASE("lognormal reference values") {
  const auto m = DistModel::lognormal(0.0, 0.3);
  CHECK(dist::pdf(m, 1.2) == doctest::Approx(0.92130849556783489).epsilon(1e-13));
  CHECK(dist::cdf(m, 1.0) == doctest::Approx(0.5).epsilon(1e-13));
  CHECK(dist::pdf(m, 0.0) == 0.0);
}

TEST_CASE("sampling") {
  SUBCASE("fixed seed reproduces draws exactly") {
    const auto a = dist::sample(DistModel::giga(2.0, 1.0, 2.0), 200, 42);
    const auto b = dist::sample(DistModel::giga(2.0, 1.0, 2.0), 200, 42);
    const auto c = dist::sample(DistModel::giga(2.0, 1.0, 2.0), 200, 43);
    CHECK(a == b);
    CHECK(a != c);
  }
  SUBCASE("samples agree with the law") {
    const std::vector<DistModel> models = {
        DistModel::giga(2.0, 1.0, 2.0),     DistModel::iga(3.0, 2.0),
        DistModel::gga(2.5, 1.3, 0.8),      DistModel::ga(2.0, 1.5),
        DistModel::lognormal(0.1, 0.5),     DistModel::normal(-1.0, 2.0),
        DistModel::student_t(0.3, 1.2, 3.5)};
    std::uint64_t seed = 5;
    for (const auto& m : models) {
      const auto xs = dist::sample(m, 4000, seed++);
      const auto ks = volfit::diag::ks_test(xs, m);
      INFO("model ", m.kind_name(), " p=", ks.p_value);
      CHECK(ks.p_value > 0.01);
    }
  }
  SUBCASE("positive support respected") {
    const auto xs = dist::sample(DistModel::iga(2.0, 1.0), 2000, 9);
    for (double x : xs) {
      REQUIRE(x > 0.0);
    }
  }
}

TEST_CASE("scaling to unit mean") {
  for (const auto& m :
       {DistModel::giga(2.2, 1.7, 1.3), DistModel::gga(2.5, 1.3, 0.8),
        DistModel::iga(3.0, 5.0), DistModel::ga(2.0, 3.0), DistModel::lognormal(0.4, 0.6)}) {
    const auto s = dist::scaled_to_unit_mean(m);
    CHECK(s.kind() == m.kind());
    const auto mv = dist::mean_var(s);
    CHECK(mv.mean == doctest::Approx(1.0).epsilon(1e-12));
    const auto orig = dist::mean_var(m);
    CHECK(mv.variance ==
          doctest::Approx(orig.variance / (orig.mean * orig.mean)).epsilon(1e-11));
  }
  CHECK_THROWS_AS((void)dist::scaled_to_unit_mean(DistModel::giga(0.9, 1.0, 1.0)),
                  std::domain_error);
}

TEST_CASE("unit-mean IGa mode statistics") {
  const auto s3 = dist::iga_mode_stats(3.0);
  CHECK(s3.mode == doctest::Approx(0.5).epsilon(1e-13));
  CHECK(s3.modal_pdf == doctest::Approx(1.1722008888789875).epsilon(1e-13));
  // The modal height has its minimum near alpha = 3.4824540386228877.
  const double amin = 3.4824540386228877;
  CHECK(dist::iga_mode_stats(amin).modal_pdf ==
        doctest::Approx(1.1630848653451761).epsilon(1e-12));
  CHECK(dist::iga_mode_stats(3.2).modal_pdf > 1.1630848653451761);
  CHECK(dist::iga_mode_stats(3.8).modal_pdf > 1.1630848653451761);
  // Mode matches the density maximum found numerically.
  const auto m = DistModel::iga(3.0, 2.0);
  CHECK(dist::pdf(m, s3.mode) > dist::pdf(m, s3.mode - 0.01));
  CHECK(dist::pdf(m, s3.mode) > dist::pdf(m, s3.mode + 0.01));
  CHECK_THROWS_AS((void)dist::iga_mode_stats(1.0), std::domain_error);
}

TEST_CASE("lognormal limit reparameterization") {
  const auto pair = dist::ln_limit_of_giga({0.0, 0.3, 0.05});
  CHECK(pair.giga.alpha() == doctest::Approx(400.0).epsilon(1e-13));
  CHECK(pair.giga.beta() == doctest::Approx(4.096e15).epsilon(1e-12));
  CHECK(pair.giga.gamma() == doctest::Approx(1.0 / 6.0).epsilon(1e-13));
  CHECK(pair.ln.mu() == doctest::Approx(0.0));
  CHECK(pair.ln.sigma() == doctest::Approx(0.3));
  // Approximation quality is O(lambda): at lambda = 0.05 the pdf gap peaks at
  // 0.0221 near x = 0.57 while the CDF gap stays below 1e-2. Both shrink
  // monotonically with lambda.
  const auto sup_gaps = [](double lambda) {
    const auto p = dist::ln_limit_of_giga({0.0, 0.3, lambda});
    double pdf_gap = 0.0, cdf_gap = 0.0;
    for (double x = 0.05; x <= 20.0; x *= 1.01) {
      pdf_gap = std::max(pdf_gap, std::fabs(dist::pdf(p.giga, x) - dist::pdf(p.ln, x)));
      cdf_gap = std::max(cdf_gap, std::fabs(dist::cdf(p.giga, x) - dist::cdf(p.ln, x)));
    }
    return std::pair{pdf_gap, cdf_gap};
  };
  const auto [pdf_05, cdf_05] = sup_gaps(0.05);
  CHECK(pdf_05 == doctest::Approx(0.0220872).epsilon(1e-3));
  CHECK(cdf_05 == doctest::Approx(0.0066672).epsilon(1e-3));
  const auto [pdf_20, cdf_20] = sup_gaps(0.2);
  const auto [pdf_50, cdf_50] = sup_gaps(0.5);
  CHECK(pdf_50 > pdf_20);
  CHECK(pdf_20 > pdf_05);
  CHECK(cdf_50 > cdf_20);
  CHECK(cdf_20 > cdf_05);
  const auto back = dist::ln_params_of_giga(pair.giga);
  CHECK(back.mu == doctest::Approx(0.0).epsilon(1e-10));
  CHECK(back.sigma == doctest::Approx(0.3).epsilon(1e-10));
  CHECK(back.lambda == doctest::Approx(0.05).epsilon(1e-10));
}

TEST_CASE("JSON round trip") {
  for (const auto& m : {DistModel::giga(0.721, 14.1, 3.96), DistModel::student_t(0.3, 1.2, 3.5),
                        DistModel::lognormal(-0.2, 0.8)}) {
    CHECK(DistModel::from_json(m.to_json()) == m);
  }
  CHECK_THROWS_AS((void)DistModel::from_json(nlohmann::ordered_json{{"kind", "Weibull"}}),
                  volfit::DataError);
}

TEST_CASE("parameter validation") {
  CHECK_THROWS_AS((void)DistModel::giga(0.0, 1.0, 1.0), std::domain_error);
  CHECK_THROWS_AS((void)DistModel::giga(1.0, -1.0, 1.0), std::domain_error);
  CHECK_THROWS_AS((void)DistModel::lognormal(0.0, 0.0), std::domain_error);
  CHECK_THROWS_AS((void)DistModel::student_t(0.0, 1.0, -2.0), std::domain_error);
}
