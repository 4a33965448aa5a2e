#pragma once

#include <functional>
#include <iosfwd>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"
#include "volfit/dist.hpp"
#include "volfit/product.hpp"

namespace volfit::diag {

// Sorted (x_(i), i/(n+1)) plotting positions; the CDF never reaches 1 so the
// survival function stays loggable.
std::vector<std::pair<double, double>> empirical_cdf(std::span<const double> xs);

enum class TailSide { Right, LeftAbs };

struct TailFit {
  double slope = 0.0;      // d log10(1-F) / d log10(x); ~ -k for a k power law
  double intercept = 0.0;
  double cdf_lo = 0.0;
  double cdf_hi = 0.0;
  int n_points = 0;
  nlohmann::ordered_json to_json() const;
  static TailFit from_json(const nlohmann::ordered_json& j);
  friend bool operator==(const TailFit& a, const TailFit& b) = default;
};

// OLS of log10 survival on log10 x over the empirical CDF window
// [cdf_lo, cdf_hi].  LeftAbs mirrors the lower tail through |x|.
TailFit tail_loglog_fit(std::span<const double> xs, double cdf_lo = 0.9,
                        double cdf_hi = 0.99, TailSide side = TailSide::Right);

// Exact d ln(1-CDF)/d ln x.  The GIGa slope tends to -alpha*gamma as
// x -> inf; the lognormal slope keeps steepening like -(ln x - mu)/sigma^2.
double local_slope_giga(double alpha, double beta, double gamma, double x);
double local_slope_ln(double mu, double sigma, double x);

enum class NoiseColor { White, Brown, Other };
std::string to_string(NoiseColor c);
NoiseColor noise_color_from_string(const std::string& s);

struct SpectrumFit {
  double slope = 0.0;
  NoiseColor classification = NoiseColor::Other;
  int n_freqs = 0;
  nlohmann::ordered_json to_json() const;
  static SpectrumFit from_json(const nlohmann::ordered_json& j);
  friend bool operator==(const SpectrumFit& a, const SpectrumFit& b) = default;
};

// Log-log OLS slope of the periodogram |X_k|^2 after demeaning, fitted for
// periods between ~6 and 32 samples against the folded frequency
// 2 sin(pi k / n) so a sampled diffusion keeps its power law up to Nyquist.
// White: slope in (-0.5, 0.5); Brown: in (-2.5, -1.5).
SpectrumFit spectrum_slope(std::span<const double> series);

// Full width of the density at half its modal height.
double half_width(const dist::DistModel& m);

// Collapse measure for the GIGa family along the locus gamma = locus_c/eta,
// alpha = eta/gamma, eta being the tail exponent alpha*gamma.  Each member is
// rescaled to put its mode at 1 (the family is a scale family, so this fixes
// the scale freedom); the result is the sup over x in [0.05, 5] of the pdf
// spread across the eta list.
double giga_scaling_profile(std::span<const double> etas, double locus_c = 2.1);

struct KsResult {
  double statistic = 0.0;
  double p_value = 0.0;
};
KsResult ks_test(std::span<const double> xs, const dist::DistModel& m);

struct Overlay {
  std::string name;
  std::function<double(double)> pdf;
};
Overlay overlay_of(const dist::DistModel& m);
Overlay overlay_of(const product::ProductModel& pm);

struct HistogramTable {
  std::vector<double> lo, hi;    // bin edges
  std::vector<double> density;   // count / (n * width)
  std::vector<std::string> overlay_names;
  std::vector<std::vector<double>> overlay_pdf;  // per overlay, at bin centers
  void write_csv(std::ostream& os) const;
  nlohmann::ordered_json to_json() const;
};
HistogramTable histogram_export(std::span<const double> xs, int bins,
                                const std::vector<Overlay>& overlays = {});

}  // namespace volfit::diag
