#include "volfit/diag.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdio>
#include <limits>
#include <ostream>
#include <stdexcept>

#include "volfit/errors.hpp"
#include "volfit/specfun.hpp"

namespace volfit::diag {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::vector<double> sorted_copy(std::span<const double> xs) {
  std::vector<double> v(xs.begin(), xs.end());
  std::sort(v.begin(), v.end());
  return v;
}

struct OlsLine {
  double slope, intercept;
};

OlsLine ols(const std::vector<double>& x, const std::vector<double>& y) {
  const double n = static_cast<double>(x.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sx += x[i];
    sy += y[i];
    sxx += x[i] * x[i];
    sxy += x[i] * y[i];
  }
  const double den = n * sxx - sx * sx;
  if (!(std::fabs(den) > 0.0)) throw NumericalError("ols: degenerate abscissa");
  const double slope = (n * sxy - sx * sy) / den;
  return {slope, (sy - slope * sx) / n};
}

// In-place forward FFT, n a power of two.
void fft_pow2(std::vector<std::complex<double>>& a) {
  const std::size_t n = a.size();
  for (std::size_t i = 1, j = 0; i < n; ++i) {
    std::size_t bit = n >> 1;
    for (; j & bit; bit >>= 1) j ^= bit;
    j ^= bit;
    if (i < j) std::swap(a[i], a[j]);
  }
  for (std::size_t len = 2; len <= n; len <<= 1) {
    const double ang = -2.0 * M_PI / static_cast<double>(len);
    const std::complex<double> wlen(std::cos(ang), std::sin(ang));
    for (std::size_t i = 0; i < n; i += len) {
      std::complex<double> w(1.0, 0.0);
      for (std::size_t k = 0; k < len / 2; ++k) {
        const auto u = a[i + k];
        const auto v = a[i + k + len / 2] * w;
        a[i + k] = u + v;
        a[i + k + len / 2] = u - v;
        w *= wlen;
      }
    }
  }
}

// Forward DFT for arbitrary n: radix-2 when possible, otherwise Bluestein's
// chirp-z reduction to a power-of-two convolution.
std::vector<std::complex<double>> dft(const std::vector<std::complex<double>>& x) {
  const std::size_t n = x.size();
  if ((n & (n - 1)) == 0) {
    auto a = x;
    fft_pow2(a);
    return a;
  }
  std::size_t m = 1;
  while (m < 2 * n - 1) m <<= 1;

  // chirp(k) = exp(-i pi k^2 / n), with k^2 reduced mod 2n to keep the phase
  // argument small and exact.
  const auto chirp = [n](std::size_t k) {
    const unsigned long long k2 = static_cast<unsigned long long>(k) * k % (2ull * n);
    const double ang = -M_PI * static_cast<double>(k2) / static_cast<double>(n);
    return std::complex<double>(std::cos(ang), std::sin(ang));
  };

  std::vector<std::complex<double>> a(m, {0.0, 0.0}), b(m, {0.0, 0.0});
  for (std::size_t k = 0; k < n; ++k) {
    a[k] = x[k] * chirp(k);
    b[k] = std::conj(chirp(k));
  }
  for (std::size_t k = 1; k < n; ++k) b[m - k] = b[k];
  fft_pow2(a);
  fft_pow2(b);
  for (std::size_t i = 0; i < m; ++i) a[i] *= b[i];
  // Inverse transform via conjugation.
  for (auto& v : a) v = std::conj(v);
  fft_pow2(a);
  std::vector<std::complex<double>> out(n);
  for (std::size_t k = 0; k < n; ++k) {
    out[k] = chirp(k) * std::conj(a[k]) / static_cast<double>(m);
  }
  return out;
}

double ks_pvalue(double lambda) {
  if (lambda < 0.005) return 1.0;
  double sum = 0.0;
  double sign = 1.0;
  for (int j = 1; j <= 2000; ++j) {
    const double term = std::exp(-2.0 * j * j * lambda * lambda);
    sum += sign * term;
    sign = -sign;
    if (term < 1e-14) break;
  }
  return std::clamp(2.0 * sum, 0.0, 1.0);
}

}  // namespace

std::vector<std::pair<double, double>> empirical_cdf(std::span<const double> xs) {
  if (xs.empty()) throw DataError("empirical_cdf: empty sample");
  const auto v = sorted_copy(xs);
  std::vector<std::pair<double, double>> out(v.size());
  const double np1 = static_cast<double>(v.size()) + 1.0;
  for (std::size_t i = 0; i < v.size(); ++i) {
    out[i] = {v[i], static_cast<double>(i + 1) / np1};
  }
  return out;
}

nlohmann::ordered_json TailFit::to_json() const {
  return {{"slope", slope},
          {"intercept", intercept},
          {"cdf_lo", cdf_lo},
          {"cdf_hi", cdf_hi},
          {"n_points", n_points}};
}

TailFit TailFit::from_json(const nlohmann::ordered_json& j) {
  try {
    return {j.at("slope").get<double>(), j.at("intercept").get<double>(),
            j.at("cdf_lo").get<double>(), j.at("cdf_hi").get<double>(),
            j.at("n_points").get<int>()};
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("TailFit::from_json: ") + e.what());
  }
}

TailFit tail_loglog_fit(std::span<const double> xs, double cdf_lo, double cdf_hi,
                        TailSide side) {
  if (!(cdf_lo > 0.0) || !(cdf_lo < cdf_hi) || !(cdf_hi < 1.0)) {
    throw std::domain_error("tail_loglog_fit: need 0 < cdf_lo < cdf_hi < 1");
  }
  std::vector<double> v;
  if (side == TailSide::Right) {
    v.assign(xs.begin(), xs.end());
  } else {
    for (double x : xs) {
      if (x < 0.0) v.push_back(-x);
    }
  }
  if (v.size() < 8) throw DataError("tail_loglog_fit: too few samples in the chosen tail");
  std::sort(v.begin(), v.end());

  const double np1 = static_cast<double>(v.size()) + 1.0;
  std::vector<double> lx, ls;
  for (std::size_t i = 0; i < v.size(); ++i) {
    const double f = static_cast<double>(i + 1) / np1;
    if (f < cdf_lo || f > cdf_hi) continue;
    if (!(v[i] > 0.0)) {
      throw DataError("tail_loglog_fit: tail window contains non-positive values");
    }
    lx.push_back(std::log10(v[i]));
    ls.push_back(std::log10(1.0 - f));
  }
  if (lx.size() < 5) throw DataError("tail_loglog_fit: fewer than 5 points in the CDF window");
  const auto line = ols(lx, ls);
  return {line.slope, line.intercept, cdf_lo, cdf_hi, static_cast<int>(lx.size())};
}

double local_slope_giga(double alpha, double beta, double gamma, double x) {
  if (!(alpha > 0.0) || !(beta > 0.0) || !(gamma > 0.0)) {
    throw std::domain_error("local_slope_giga: parameters must be positive");
  }
  if (!(x > 0.0)) throw std::domain_error("local_slope_giga: x must be positive");
  // -x f(x) / (1-F(x)) = -gamma e^{-t} t^alpha / (Gamma(alpha) P(alpha,t)),
  // t = (beta/x)^gamma.
  const double t = std::exp(gamma * (std::log(beta) - std::log(x)));
  const double log_mag = std::log(gamma) - t + alpha * std::log(t) -
                         specfun::lgamma(alpha) - specfun::log_reg_gamma_p(alpha, t);
  return -std::exp(log_mag);
}

double local_slope_ln(double mu, double sigma, double x) {
  if (!(sigma > 0.0)) throw std::domain_error("local_slope_ln: sigma must be positive");
  if (!(x > 0.0)) throw std::domain_error("local_slope_ln: x must be positive");
  const double q = (std::log(x) - mu) / sigma;
  // -x f(x) / (1-F(x)) with 1-F = Phi(-q).
  return -std::exp(specfun::log_norm_pdf(q) - specfun::log_norm_cdf(-q)) / sigma;
}

std::string to_string(NoiseColor c) {
  switch (c) {
    case NoiseColor::White: return "White";
    case NoiseColor::Brown: return "Brown";
    case NoiseColor::Other: return "Other";
  }
  return "?";
}

NoiseColor noise_color_from_string(const std::string& s) {
  if (s == "White") return NoiseColor::White;
  if (s == "Brown") return NoiseColor::Brown;
  if (s == "Other") return NoiseColor::Other;
  throw DataError("noise_color_from_string: unknown classification '" + s + "'");
}

nlohmann::ordered_json SpectrumFit::to_json() const {
  return {{"slope", slope},
          {"classification", to_string(classification)},
          {"n_freqs", n_freqs}};
}

SpectrumFit SpectrumFit::from_json(const nlohmann::ordered_json& j) {
  try {
    return {j.at("slope").get<double>(),
            noise_color_from_string(j.at("classification").get<std::string>()),
            j.at("n_freqs").get<int>()};
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("SpectrumFit::from_json: ") + e.what());
  }
}

SpectrumFit spectrum_slope(std::span<const double> series) {
  const std::size_t n = series.size();
  if (n < 64) throw DataError("spectrum_slope: need at least 64 samples");
  double mean = 0.0;
  for (double v : series) mean += v;
  mean /= static_cast<double>(n);

  std::vector<std::complex<double>> x(n);
  for (std::size_t i = 0; i < n; ++i) x[i] = {series[i] - mean, 0.0};
  const auto spec = dft(x);

  // Fit band: periods between ~6 and 32 samples.  Below the band the first
  // few bins carry the series' own slow structure (trends, mean reversion)
  // rather than its noise color; the n >= 64 precondition keeps at least one
  // full period bin available.  The abscissa is the folded frequency
  // 2 sin(pi k / n), which equals the angular frequency at low k and removes
  // the flattening a sampled diffusion's spectrum shows near Nyquist: a
  // random walk has power exactly proportional to u^-2 in this variable.
  const std::size_t k_lo = std::max<std::size_t>(1, (n + 31) / 32);
  const std::size_t k_hi =
      static_cast<std::size_t>(0.95 * (static_cast<double>(n) / 2.0));
  std::vector<double> lk, lp;
  for (std::size_t k = k_lo; k <= k_hi; ++k) {
    const double p = std::norm(spec[k]);
    if (!(p > 0.0)) continue;
    const double u = 2.0 * std::sin(M_PI * static_cast<double>(k) /
                                    static_cast<double>(n));
    lk.push_back(std::log10(u));
    lp.push_back(std::log10(p));
  }
  if (lk.size() < 4) throw NumericalError("spectrum_slope: too few usable frequencies");
  const auto line = ols(lk, lp);

  NoiseColor c = NoiseColor::Other;
  if (line.slope > -0.5 && line.slope < 0.5) {
    c = NoiseColor::White;
  } else if (line.slope > -2.5 && line.slope < -1.5) {
    c = NoiseColor::Brown;
  }
  return {line.slope, c, static_cast<int>(lk.size())};
}

double half_width(const dist::DistModel& m) {
  using dist::Kind;
  // Closed-form modes keep this away from grid heuristics.
  double mode;
  switch (m.kind()) {
    case Kind::GIGa:
    case Kind::IGa:
      mode = m.beta() * std::pow((1.0 + m.alpha() * m.gamma()) / m.gamma(), -1.0 / m.gamma());
      break;
    case Kind::GGa:
    case Kind::Ga: {
      const double ag = m.alpha() * m.gamma();
      if (ag <= 1.0) {
        throw NumericalError("half_width: density has no interior mode");
      }
      mode = m.beta() * std::pow((ag - 1.0) / m.gamma(), 1.0 / m.gamma());
      break;
    }
    case Kind::LN:
      mode = std::exp(m.mu() - m.sigma() * m.sigma());
      break;
    case Kind::Normal:
      return 2.0 * m.sigma() * std::sqrt(2.0 * M_LN2);
    case Kind::StudentT: {
      const double nu = m.t_dof();
      const double z2 = nu * (std::pow(2.0, 2.0 / (nu + 1.0)) - 1.0);
      return 2.0 * m.t_scale() * std::sqrt(z2);
    }
    default:
      throw std::logic_error("half_width: unreachable");
  }

  const double peak = dist::pdf(m, mode);
  if (!(peak > 0.0) || !std::isfinite(peak)) {
    throw NumericalError("half_width: modal density not finite");
  }
  const double half = 0.5 * peak;

  const auto crossing = [&](double inside, double outside) {
    for (int i = 0; i < 200; ++i) {
      const double mid = 0.5 * (inside + outside);
      (dist::pdf(m, mid) > half ? inside : outside) = mid;
    }
    return 0.5 * (inside + outside);
  };

  double hi = mode * 2.0;
  int guard = 0;
  while (dist::pdf(m, hi) >= half) {
    hi *= 2.0;
    if (++guard > 500) throw NumericalError("half_width: right crossing not found");
  }
  const double right = crossing(mode, hi);

  double lo = mode * 0.5;
  guard = 0;
  while (dist::pdf(m, lo) >= half) {
    lo *= 0.5;
    if (++guard > 2000) throw NumericalError("half_width: left crossing not found");
  }
  const double left = crossing(mode, lo);
  return right - left;
}

double giga_scaling_profile(std::span<const double> etas, double locus_c) {
  if (etas.empty()) throw DataError("giga_scaling_profile: empty eta list");
  if (!(locus_c > 0.0)) throw std::domain_error("giga_scaling_profile: locus_c must be positive");
  constexpr int kGrid = 100;
  constexpr double kLo = 0.05, kHi = 5.0;

  // eta is the tail exponent alpha*gamma; the locus fixes gamma = c/eta, so
  // alpha = eta/gamma.  Each density is rescaled to put its mode at 1 before
  // comparing: the family is a scale family, so mode alignment removes the
  // scale freedom and the spread measures shape differences only.
  std::vector<dist::DistModel> models;
  std::vector<double> modes;
  models.reserve(etas.size());
  modes.reserve(etas.size());
  for (double eta : etas) {
    if (!(eta > 1.0)) throw std::domain_error("giga_scaling_profile: eta must exceed 1");
    const double g = locus_c / eta;
    const double a = eta / g;
    models.push_back(dist::DistModel::giga(a, 1.0, g));
    modes.push_back(std::pow(g / (1.0 + a * g), 1.0 / g));
  }

  double spread = 0.0;
  for (int i = 0; i < kGrid; ++i) {
    const double x = kLo + (kHi - kLo) * i / (kGrid - 1);
    double pmin = kInf, pmax = -kInf;
    for (std::size_t j = 0; j < models.size(); ++j) {
      const double p = modes[j] * dist::pdf(models[j], modes[j] * x);
      pmin = std::min(pmin, p);
      pmax = std::max(pmax, p);
    }
    spread = std::max(spread, pmax - pmin);
  }
  return spread;
}

KsResult ks_test(std::span<const double> xs, const dist::DistModel& m) {
  if (xs.size() < 2) throw DataError("ks_test: need at least 2 samples");
  const auto v = sorted_copy(xs);
  const double n = static_cast<double>(v.size());
  double d = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) {
    const double f = dist::cdf(m, v[i]);
    d = std::max(d, std::fabs(static_cast<double>(i + 1) / n - f));
    d = std::max(d, std::fabs(f - static_cast<double>(i) / n));
  }
  const double sn = std::sqrt(n);
  const double lambda = (sn + 0.12 + 0.11 / sn) * d;
  return {d, ks_pvalue(lambda)};
}

Overlay overlay_of(const dist::DistModel& m) {
  return {m.kind_name(), [m](double x) { return dist::pdf(m, x); }};
}

Overlay overlay_of(const product::ProductModel& pm) {
  return {pm.base().kind_name() + "*N",
          [pm](double z) { return product::product_pdf(pm, z); }};
}

void HistogramTable::write_csv(std::ostream& os) const {
  os << "bin_lo,bin_hi,density";
  for (const auto& name : overlay_names) os << ',' << name;
  os << '\n';
  char buf[64];
  const auto put = [&](double v) {
    std::snprintf(buf, sizeof buf, "%.17g", v);
    os << buf;
  };
  for (std::size_t i = 0; i < density.size(); ++i) {
    put(lo[i]);
    os << ',';
    put(hi[i]);
    os << ',';
    put(density[i]);
    for (const auto& col : overlay_pdf) {
      os << ',';
      put(col[i]);
    }
    os << '\n';
  }
}

nlohmann::ordered_json HistogramTable::to_json() const {
  nlohmann::ordered_json j;
  j["bin_lo"] = lo;
  j["bin_hi"] = hi;
  j["density"] = density;
  nlohmann::ordered_json ov = nlohmann::ordered_json::object();
  for (std::size_t k = 0; k < overlay_names.size(); ++k) {
    ov[overlay_names[k]] = overlay_pdf[k];
  }
  j["overlays"] = ov;
  return j;
}

HistogramTable histogram_export(std::span<const double> xs, int bins,
                                const std::vector<Overlay>& overlays) {
  if (xs.empty()) throw DataError("histogram_export: empty sample");
  if (bins < 1) throw std::domain_error("histogram_export: bins must be >= 1");
  const auto [mn, mx] = std::minmax_element(xs.begin(), xs.end());
  if (!(*mx > *mn)) throw DataError("histogram_export: degenerate sample");

  HistogramTable t;
  const double w = (*mx - *mn) / bins;
  std::vector<std::size_t> counts(static_cast<std::size_t>(bins), 0);
  for (double x : xs) {
    auto idx = static_cast<std::size_t>((x - *mn) / w);
    if (idx >= counts.size()) idx = counts.size() - 1;
    ++counts[idx];
  }
  const double n = static_cast<double>(xs.size());
  for (int i = 0; i < bins; ++i) {
    t.lo.push_back(*mn + w * i);
    t.hi.push_back(*mn + w * (i + 1));
    t.density.push_back(static_cast<double>(counts[static_cast<std::size_t>(i)]) / (n * w));
  }
  for (const auto& ov : overlays) {
    t.overlay_names.push_back(ov.name);
    std::vector<double> col;
    col.reserve(static_cast<std::size_t>(bins));
    for (int i = 0; i < bins; ++i) {
      col.push_back(ov.pdf(0.5 * (t.lo[static_cast<std::size_t>(i)] +
                                  t.hi[static_cast<std::size_t>(i)])));
    }
    t.overlay_pdf.push_back(std::move(col));
  }
  return t;
}

}  // namespace volfit::diag
