#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>
#include <stdexcept>
#include <vector>

#include "volfit/diag.hpp"
#include "volfit/errors.hpp"
#include "volfit/dist.hpp"
#include "volfit/rng.hpp"

using volfit::DataError;
using volfit::Philox;
using volfit::dist::DistModel;
namespace diag = volfit::diag;
namespace dist = volfit::dist;

namespace {

// Spearman rank correlation, no tie handling (inputs here are strictly
// monotone in practice).
double spearman(const std::vector<double>& a, const std::vector<double>& b) {
  const std::size_t n = a.size();
  auto ranks = [n](const std::vector<double>& v) {
    std::vector<std::size_t> idx(n);
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    std::sort(idx.begin(), idx.end(), [&](std::size_t i, std::size_t j) { return v[i] < v[j]; });
    std::vector<double> r(n);
    for (std::size_t k = 0; k < n; ++k) r[idx[k]] = static_cast<double>(k);
    return r;
  };
  const auto ra = ranks(a), rb = ranks(b);
  double d2 = 0.0;
  for (std::size_t i = 0; i < n; ++i) d2 += (ra[i] - rb[i]) * (ra[i] - rb[i]);
  const double nn = static_cast<double>(n);
  return 1.0 - 6.0 * d2 / (nn * (nn * nn - 1.0));
}

}  // namespace

TEST_CASE("empirical CDF plotting positions") {
  const std::vector<double> xs = {3.0, 1.0, 2.0};
  const auto e = diag::empirical_cdf(xs);
  REQUIRE(e.size() == 3);
  CHECK(e[0].first == 1.0);
  CHECK(e[0].second == doctest::Approx(0.25).epsilon(1e-15));
  CHECK(e[1].first == 2.0);
  CHECK(e[1].second == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(e[2].first == 3.0);
  CHECK(e[2].second == doctest::Approx(0.75).epsilon(1e-15));
  CHECK_THROWS_AS((void)diag::empirical_cdf(std::vector<double>{}), DataError);
}

TEST_CASE("tail fit on power-law data") {
  SUBCASE("exact Pareto quantiles give the exact exponent") {
    // x_i = (1 - u_i)^(-1/k) places every plotting position exactly on the
    // Pareto survival curve, so the window fit must return -k.
    const double k = 2.5;
    const int n = 5000;
    std::vector<double> xs(n);
    for (int i = 0; i < n; ++i) {
      const double u = static_cast<double>(i + 1) / (n + 1);
      xs[static_cast<std::size_t>(i)] = std::pow(1.0 - u, -1.0 / k);
    }
    const auto tf = diag::tail_loglog_fit(xs, 0.9, 0.99);
    CHECK(tf.slope == doctest::Approx(-k).epsilon(1e-10));
    CHECK(tf.n_points > 100);
  }
  SUBCASE("random Pareto sample lands within the usual scatter") {
    const double k = 3.0;
    Philox rng(31);
    std::vector<double> xs(20000);
    for (auto& x : xs) x = std::pow(rng.uniform_pos(), -1.0 / k);
    const auto tf = diag::tail_loglog_fit(xs, 0.9, 0.99);
    CHECK(std::fabs(tf.slope + k) < 0.1);
  }
  SUBCASE("left tail through absolute values") {
    Philox rng(32);
    std::vector<double> xs(20000);
    for (auto& x : xs) {
      const double mag = std::pow(rng.uniform_pos(), -1.0 / 3.0);
      x = rng.uniform() < 0.5 ? -mag : mag;
    }
    const auto tf = diag::tail_loglog_fit(xs, 0.9, 0.99, diag::TailSide::LeftAbs);
    CHECK(std::fabs(tf.slope + 3.0) < 0.15);
  }
  SUBCASE("rejects bad windows and short tails") {
    const std::vector<double> small = {1.0, 2.0, 3.0};
    CHECK_THROWS_AS((void)diag::tail_loglog_fit(small, 0.9, 0.99), DataError);
    CHECK_THROWS_AS((void)diag::tail_loglog_fit(small, 0.99, 0.9), std::domain_error);
  }
}

TEST_CASE("local survival slopes") {
  CHECK(diag::local_slope_giga(2.0, 1.0, 2.0, 1000.0) ==
        doctest::Approx(-3.9999986666667778).epsilon(1e-12));
  CHECK(diag::local_slope_ln(0.0, 0.4, 1.5) ==
        doctest::Approx(-3.840221752573704).epsilon(1e-12));

  SUBCASE("matches a finite difference of the survival function") {
    const auto m = DistModel::giga(1.3, 0.9, 1.7);
    for (double x : {0.8, 2.0, 6.0}) {
      const double h = 1e-5 * x;
      const double fd = (std::log1p(-dist::cdf(m, x + h)) - std::log1p(-dist::cdf(m, x - h))) /
                        (std::log(x + h) - std::log(x - h));
      CHECK(diag::local_slope_giga(1.3, 0.9, 1.7, x) == doctest::Approx(fd).epsilon(1e-4));
    }
    for (double x : {0.9, 1.5, 3.0}) {
      const double h = 1e-5 * x;
      const auto ln = DistModel::lognormal(0.1, 0.4);
      const double fd = (std::log1p(-dist::cdf(ln, x + h)) - std::log1p(-dist::cdf(ln, x - h))) /
                        (std::log(x + h) - std::log(x - h));
      CHECK(diag::local_slope_ln(0.1, 0.4, x) == doctest::Approx(fd).epsilon(1e-4));
    }
  }
  SUBCASE("the GIGa slope saturates while the lognormal slope keeps falling") {
    CHECK(diag::local_slope_giga(2.0, 1.0, 2.0, 1e6) == doctest::Approx(-4.0).epsilon(1e-6));
    CHECK(diag::local_slope_ln(0.0, 0.4, 100.0) < diag::local_slope_ln(0.0, 0.4, 10.0));
  }
}

TEST_CASE("spectrum classification") {
  Philox rng(33);
  std::vector<double> white(4096);
  for (auto& x : white) x = rng.normal();
  const auto w = diag::spectrum_slope(white);
  CHECK(w.classification == diag::NoiseColor::White);
  CHECK(std::fabs(w.slope) < 0.2);

  std::vector<double> brown(4096);
  double acc = 0.0;
  for (auto& x : brown) {
    acc += rng.normal();
    x = acc;
  }
  const auto b = diag::spectrum_slope(brown);
  CHECK(b.classification == diag::NoiseColor::Brown);
  CHECK(b.slope == doctest::Approx(-2.0).epsilon(0.15));

  CHECK_THROWS_AS((void)diag::spectrum_slope(std::vector<double>(63, 1.0)), DataError);
  CHECK(diag::to_string(diag::NoiseColor::Brown) == "Brown");
  CHECK(diag::noise_color_from_string("White") == diag::NoiseColor::White);
  CHECK_THROWS_AS((void)diag::noise_color_from_string("Pink"), DataError);
}

TEST_CASE("half width at half maximum") {
  CHECK(diag::half_width(DistModel::normal(0.0, 1.0)) ==
        doctest::Approx(2.3548200450309494).epsilon(1e-9));
  CHECK(diag::half_width(DistModel::normal(5.0, 2.0)) ==
        doctest::Approx(2.0 * 2.3548200450309494).epsilon(1e-9));
  CHECK(diag::half_width(DistModel::iga(3.0, 2.0)) ==
        doctest::Approx(0.66776875223099618).epsilon(1e-9));
  CHECK(diag::half_width(DistModel::lognormal(0.0, 0.5)) ==
        doctest::Approx(0.97085943094610437).epsilon(1e-9));

  SUBCASE("narrower unit-mean IGa peaks are taller") {
    // Width and modal height move in opposition across the shape grid, but
    // not perfectly: the width peaks near alpha 4.5 while the height bottoms
    // out near 3.48, which caps the rank correlation. The value is pinned
    // against an independent oracle.
    std::vector<double> widths, heights;
    for (double a = 1.5; a <= 10.0; a += 0.5) {
      widths.push_back(diag::half_width(DistModel::iga(a, a - 1.0)));
      heights.push_back(dist::iga_mode_stats(a).modal_pdf);
    }
    const double rho = spearman(widths, heights);
    CHECK(rho == doctest::Approx(-0.8183694530443757).epsilon(1e-9));
    CHECK(rho < -0.75);
  }
}

TEST_CASE("scaling profile along the constant-tail locus") {
  const std::vector<double> etas = {2.0, 3.0, 4.0, 5.0, 6.0, 7.0};
  const double tight = diag::giga_scaling_profile(etas, 2.1);
  const double loose = diag::giga_scaling_profile(etas, 3.5);
  CHECK(tight < 0.1);
  CHECK(loose > tight);
  CHECK(diag::giga_scaling_profile(std::vector<double>{4.0}, 2.1) == 0.0);
  CHECK_THROWS_AS((void)diag::giga_scaling_profile(std::vector<double>{0.5}, 2.1),
                  std::domain_error);
  CHECK_THROWS_AS((void)diag::giga_scaling_profile(std::vector<double>{}, 2.1), DataError);
}

TEST_CASE("Kolmogorov-Smirnov test") {
  SUBCASE("accepts its own law") {
    const auto m = DistModel::lognormal(0.2, 0.6);
    const auto xs = dist::sample(m, 1500, 34);
    const auto r = diag::ks_test(xs, m);
    CHECK(r.p_value > 0.01);
    CHECK(r.statistic < 0.05);
  }
  SUBCASE("rejects a gross mismatch") {
    const auto xs = dist::sample(DistModel::lognormal(0.2, 0.6), 1500, 35);
    const auto r = diag::ks_test(xs, DistModel::normal(0.0, 1.0));
    CHECK(r.p_value < 1e-6);
  }
  SUBCASE("statistic is the classical sup distance") {
    // Three points against U-like CDF values chosen by hand: the sup gap of
    // {0.25, 0.5, 0.75} plotting steps against the model CDF.
    const std::vector<double> xs = {0.5, 0.5, 0.5};
    const auto m = DistModel::normal(0.5, 1.0);
    const auto r = diag::ks_test(xs, m);
    CHECK(r.statistic == doctest::Approx(0.5).epsilon(1e-12));
  }
}

TEST_CASE("histogram export") {
  Philox rng(36);
  std::vector<double> xs(5000);
  for (auto& x : xs) x = rng.normal();
  const auto m = DistModel::normal(0.0, 1.0);
  const auto table = diag::histogram_export(xs, 24, {diag::overlay_of(m)});
  REQUIRE(table.density.size() == 24);
  REQUIRE(table.lo.size() == 24);
  double mass = 0.0;
  for (std::size_t i = 0; i < table.density.size(); ++i) {
    mass += table.density[i] * (table.hi[i] - table.lo[i]);
    CHECK(table.lo[i] < table.hi[i]);
  }
  CHECK(mass == doctest::Approx(1.0).epsilon(1e-12));
  REQUIRE(table.overlay_pdf.size() == 1);
  REQUIRE(table.overlay_pdf[0].size() == 24);
  // Overlay is evaluated at bin centers.
  CHECK(table.overlay_pdf[0][12] ==
        doctest::Approx(dist::pdf(m, 0.5 * (table.lo[12] + table.hi[12]))).epsilon(1e-12));

  std::ostringstream os;
  table.write_csv(os);
  const std::string csv = os.str();
  CHECK(csv.rfind("bin_lo,bin_hi,density,", 0) == 0);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 25);

  CHECK_THROWS_AS((void)diag::histogram_export(std::vector<double>{}, 10), DataError);
  CHECK_THROWS_AS((void)diag::histogram_export(xs, 0), std::domain_error);
}

TEST_CASE("diagnostic JSON round trips") {
  Philox rng(37);
  std::vector<double> xs(4096);
  for (auto& x : xs) x = std::pow(rng.uniform_pos(), -1.0 / 3.0);
  const auto tf = diag::tail_loglog_fit(xs, 0.9, 0.99);
  CHECK(diag::TailFit::from_json(tf.to_json()) == tf);
  const auto sp = diag::spectrum_slope(xs);
  CHECK(diag::SpectrumFit::from_json(sp.to_json()) == sp);
}
