#include "volfit/fit.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "volfit/errors.hpp"
#include "volfit/specfun.hpp"

namespace volfit::fit {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kPenalty = 1e300;

struct KahanSum {
  double s = 0.0, c = 0.0;
  void add(double v) {
    const double y = v - c;
    const double t = s + y;
    c = (t - s) - y;
    s = t;
  }
};

std::vector<double> log_of(std::span<const double> xs, const char* who) {
  std::vector<double> lx;
  lx.reserve(xs.size());
  for (double x : xs) {
    if (!(x > 0.0) || !std::isfinite(x)) {
      throw DataError(std::string(who) + ": samples must be positive and finite");
    }
    lx.push_back(std::log(x));
  }
  return lx;
}

double mean_of(std::span<const double> xs) {
  KahanSum k;
  for (double x : xs) k.add(x);
  return k.s / static_cast<double>(xs.size());
}

// Weighted statistics of x^t: ln mean(x^t) and the profile gap
// d(t) = mean(x^t * t ln x) / mean(x^t) - mean(t ln x), computed with the
// largest exponent factored out so any t is safe.
struct PowStats {
  double log_mean_pow;
  double d;
};

PowStats pow_stats(const std::vector<double>& lx, double mean_lx, double t) {
  double m = -kInf;
  for (double l : lx) m = std::max(m, t * l);
  KahanSum s0, s1;
  for (double l : lx) {
    const double e = std::exp(t * l - m);
    s0.add(e);
    s1.add(e * (t * l));
  }
  const double n = static_cast<double>(lx.size());
  return {m + std::log(s0.s / n), s1.s / s0.s - t * mean_lx};
}

double sample_sd(std::span<const double> xs) {
  const double m = mean_of(xs);
  KahanSum k;
  for (double x : xs) k.add((x - m) * (x - m));
  return std::sqrt(k.s / static_cast<double>(xs.size() - 1));
}

}  // namespace

NmResult nelder_mead(const std::function<double(const std::vector<double>&)>& objective,
                     const std::vector<double>& x0, const SimplexConfig& cfg) {
  const std::size_t n = x0.size();
  if (n == 0) throw std::invalid_argument("nelder_mead: empty starting point");
  if (cfg.max_iterations < 1 || !(cfg.x_tol > 0.0) || !(cfg.f_tol > 0.0) ||
      !(cfg.initial_step > 0.0)) {
    throw std::domain_error("nelder_mead: invalid SimplexConfig");
  }

  const auto eval = [&](const std::vector<double>& x) {
    const double f = objective(x);
    return std::isfinite(f) ? f : kPenalty;
  };
  if (!std::isfinite(objective(x0))) {
    throw std::invalid_argument("nelder_mead: objective not finite at x0");
  }

  std::vector<std::vector<double>> simplex(n + 1, x0);
  std::vector<double> fv(n + 1);
  for (std::size_t i = 0; i < n; ++i) simplex[i + 1][i] += cfg.initial_step;
  for (std::size_t i = 0; i <= n; ++i) fv[i] = eval(simplex[i]);

  std::vector<std::size_t> order(n + 1);
  NmResult out;
  for (int iter = 0; iter < cfg.max_iterations; ++iter) {
    out.iterations = iter;
    for (std::size_t i = 0; i <= n; ++i) order[i] = i;
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return fv[a] < fv[b]; });
    const std::size_t best = order[0], worst = order[n], second = order[n - 1];

    double spread = 0.0;
    for (std::size_t i = 0; i <= n; ++i) {
      for (std::size_t j = 0; j < n; ++j) {
        spread = std::max(spread, std::fabs(simplex[i][j] - simplex[best][j]));
      }
    }
    if (spread < cfg.x_tol || fv[worst] - fv[best] < cfg.f_tol) {
      out.converged = true;
      break;
    }

    std::vector<double> centroid(n, 0.0);
    for (std::size_t i = 0; i <= n; ++i) {
      if (i == worst) continue;
      for (std::size_t j = 0; j < n; ++j) centroid[j] += simplex[i][j];
    }
    for (double& c : centroid) c /= static_cast<double>(n);

    const auto blend = [&](double coef) {
      std::vector<double> x(n);
      for (std::size_t j = 0; j < n; ++j) {
        x[j] = centroid[j] + coef * (simplex[worst][j] - centroid[j]);
      }
      return x;
    };

    const auto refl = blend(-1.0);
    const double f_refl = eval(refl);
    if (f_refl < fv[best]) {
      const auto expd = blend(-2.0);
      const double f_expd = eval(expd);
      if (f_expd < f_refl) {
        simplex[worst] = expd;
        fv[worst] = f_expd;
      } else {
        simplex[worst] = refl;
        fv[worst] = f_refl;
      }
      continue;
    }
    if (f_refl < fv[second]) {
      simplex[worst] = refl;
      fv[worst] = f_refl;
      continue;
    }
    const bool outside = f_refl < fv[worst];
    const auto contr = blend(outside ? -0.5 : 0.5);
    const double f_contr = eval(contr);
    if (f_contr < std::min(f_refl, fv[worst])) {
      simplex[worst] = contr;
      fv[worst] = f_contr;
      continue;
    }
    for (std::size_t i = 0; i <= n; ++i) {
      if (i == best) continue;
      for (std::size_t j = 0; j < n; ++j) {
        simplex[i][j] = simplex[best][j] + 0.5 * (simplex[i][j] - simplex[best][j]);
      }
      fv[i] = eval(simplex[i]);
    }
  }

  const std::size_t best =
      std::distance(fv.begin(), std::min_element(fv.begin(), fv.end()));
  out.x = simplex[best];
  out.fmin = fv[best];
  return out;
}

double bisection(const std::function<double(double)>& f, double lo, double hi, double tol) {
  if (!(lo < hi)) throw std::domain_error("bisection: need lo < hi");
  double flo = f(lo), fhi = f(hi);
  if (flo == 0.0) return lo;
  if (fhi == 0.0) return hi;
  if (std::signbit(flo) == std::signbit(fhi)) {
    throw NumericalError("bisection: root not bracketed");
  }
  for (int i = 0; i < 200 && hi - lo > tol * (1.0 + std::fabs(lo) + std::fabs(hi)); ++i) {
    const double mid = 0.5 * (lo + hi);
    const double fm = f(mid);
    if (fm == 0.0) return mid;
    if (std::signbit(fm) == std::signbit(flo)) {
      lo = mid;
      flo = fm;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

std::string FitResult::family_label() const {
  return product ? model.kind_name() + "*N" : model.kind_name();
}

nlohmann::ordered_json FitResult::to_json() const {
  nlohmann::ordered_json j;
  j["model"] = model.to_json();
  j["product"] = product;
  j["mean_loglik"] = mean_loglik;
  j["iterations"] = iterations;
  j["converged"] = converged;
  if (rel_loglik) {
    j["rel_loglik"] = *rel_loglik;
  } else {
    j["rel_loglik"] = nullptr;
  }
  return j;
}

FitResult FitResult::from_json(const nlohmann::ordered_json& j) {
  try {
    FitResult r{dist::DistModel::from_json(j.at("model")),
                j.at("product").get<bool>(),
                j.at("mean_loglik").get<double>(),
                j.at("iterations").get<int>(),
                j.at("converged").get<bool>(),
                std::nullopt};
    if (!j.at("rel_loglik").is_null()) r.rel_loglik = j.at("rel_loglik").get<double>();
    return r;
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("FitResult::from_json: ") + e.what());
  }
}

double mean_loglik(const dist::DistModel& m, std::span<const double> xs) {
  if (xs.empty()) throw DataError("mean_loglik: empty sample");
  KahanSum k;
  for (double x : xs) {
    const double lp = dist::log_pdf(m, x);
    if (lp == -kInf) return -kInf;
    k.add(lp);
  }
  return k.s / static_cast<double>(xs.size());
}

double mean_loglik(const product::ProductModel& pm, std::span<const double> xs,
                   const product::QuadratureConfig& cfg) {
  if (xs.empty()) throw DataError("mean_loglik: empty sample");
  KahanSum k;
  for (double x : xs) {
    const double lp = product::product_log_pdf(pm, x, cfg);
    if (lp == -kInf) return -kInf;
    k.add(lp);
  }
  return k.s / static_cast<double>(xs.size());
}

FitResult fit_ln(std::span<const double> xs) {
  if (xs.size() < 2) throw DataError("fit_ln: need at least 2 samples");
  const auto lx = log_of(xs, "fit_ln");
  const double mu = mean_of(lx);
  KahanSum k;
  for (double l : lx) k.add((l - mu) * (l - mu));
  const double sigma = std::sqrt(k.s / static_cast<double>(lx.size()));
  if (!(sigma > 0.0)) throw DataError("fit_ln: degenerate sample (all values equal)");
  FitResult r{dist::DistModel::lognormal(mu, sigma), false, 0.0, 0, true, std::nullopt};
  r.mean_loglik = mean_loglik(r.model, xs);
  return r;
}

FitResult fit_gga_giga(std::span<const double> xs, const GammaRange& range, double tol) {
  if (xs.size() < 8) throw DataError("fit_gga_giga: need at least 8 samples");
  if (!(range.neg_lo < range.neg_hi) || !(range.neg_hi < 0.0) || !(range.pos_lo > 0.0) ||
      !(range.pos_lo < range.pos_hi) || range.scan_points < 8 || !(tol > 0.0)) {
    throw std::domain_error("fit_gga_giga: invalid gamma range");
  }
  const auto lx = log_of(xs, "fit_gga_giga");
  const double mean_lx = mean_of(lx);
  const auto [mn, mx] = std::minmax_element(lx.begin(), lx.end());
  if (!(*mx > *mn)) throw DataError("fit_gga_giga: degenerate sample (all values equal)");

  int evals = 0;
  // G(t) = mean(ln x^t) - ln mean(x^t) + ln a(t) - digamma(a(t)), a = 1/d(t);
  // its roots are the stationary points of the profile likelihood in t.
  const auto g_of = [&](double t) {
    ++evals;
    const auto ps = pow_stats(lx, mean_lx, t);
    if (!(ps.d > 0.0) || !std::isfinite(ps.d)) return std::numeric_limits<double>::quiet_NaN();
    const double a = 1.0 / ps.d;
    return t * mean_lx - ps.log_mean_pow + std::log(a) - specfun::digamma(a);
  };

  struct Candidate {
    dist::DistModel model;
    double mll;
  };
  std::vector<Candidate> candidates;

  const auto try_gamma = [&](double t) {
    const auto ps = pow_stats(lx, mean_lx, t);
    if (!(ps.d > 0.0) || !std::isfinite(ps.d)) return;
    const double a = 1.0 / ps.d;
    const double log_b = (ps.log_mean_pow - std::log(a)) / t;
    const double b = std::exp(log_b);
    if (!std::isfinite(b) || !(a > 0.0) || !std::isfinite(a)) return;
    const auto m = t > 0.0 ? dist::DistModel::gga(a, b, t) : dist::DistModel::giga(a, b, -t);
    candidates.push_back({m, mean_loglik(m, xs)});
  };

  const double halves[2][2] = {{range.neg_lo, range.neg_hi}, {range.pos_lo, range.pos_hi}};
  for (const auto& h : halves) {
    const int np = range.scan_points;
    double prev_t = h[0];
    double prev_g = g_of(prev_t);
    for (int i = 1; i < np; ++i) {
      const double t = h[0] + (h[1] - h[0]) * i / (np - 1);
      const double g = g_of(t);
      if (std::isfinite(prev_g) && prev_g == 0.0) try_gamma(prev_t);
      if (std::isfinite(prev_g) && std::isfinite(g) &&
          std::signbit(prev_g) != std::signbit(g) && prev_g != 0.0 && g != 0.0) {
        double lo = prev_t, hi = t, flo = prev_g;
        while (hi - lo > tol) {
          const double mid = 0.5 * (lo + hi);
          const double fm = g_of(mid);
          if (fm == 0.0) {
            lo = hi = mid;
            break;
          }
          if (std::signbit(fm) == std::signbit(flo)) {
            lo = mid;
            flo = fm;
          } else {
            hi = mid;
          }
        }
        try_gamma(0.5 * (lo + hi));
      }
      prev_t = t;
      prev_g = g;
    }
    if (std::isfinite(prev_g) && prev_g == 0.0) try_gamma(prev_t);
  }

  if (candidates.empty()) {
    throw NumericalError("fit_gga_giga: no stationarity root in gamma range");
  }
  const auto best = std::max_element(
      candidates.begin(), candidates.end(),
      [](const Candidate& a, const Candidate& b) { return a.mll < b.mll; });
  return {best->model, false, best->mll, evals, true, std::nullopt};
}

FitResult fit_fixed_gamma(std::span<const double> xs, double gamma, bool inverse) {
  if (xs.size() < 4) throw DataError("fit_fixed_gamma: need at least 4 samples");
  if (!(gamma > 0.0) || !std::isfinite(gamma)) {
    throw std::domain_error("fit_fixed_gamma: gamma must be positive");
  }
  const auto lx = log_of(xs, "fit_fixed_gamma");
  const double mean_lx = mean_of(lx);
  const double t = inverse ? -gamma : gamma;
  const auto ps = pow_stats(lx, mean_lx, t);
  const double c = ps.log_mean_pow - t * mean_lx;  // >= 0 by Jensen
  if (!(c > 0.0) || !std::isfinite(c)) {
    throw DataError("fit_fixed_gamma: degenerate sample (all values equal)");
  }

  // ln(a) - digamma(a) = c is strictly decreasing in a with range (0, inf).
  int iters = 0;
  const auto s_of = [&](double a) {
    ++iters;
    return std::log(a) - specfun::digamma(a) - c;
  };
  double a0 = (3.0 - c + std::sqrt((c - 3.0) * (c - 3.0) + 24.0 * c)) / (12.0 * c);
  if (!(a0 > 0.0) || !std::isfinite(a0)) a0 = 1.0;
  double lo = a0, hi = a0;
  while (s_of(lo) < 0.0) {
    lo *= 0.25;
    if (lo < 1e-290) throw NumericalError("fit_fixed_gamma: bracket failed (low)");
  }
  while (s_of(hi) > 0.0) {
    hi *= 4.0;
    if (hi > 1e290) throw NumericalError("fit_fixed_gamma: bracket failed (high)");
  }
  double flo = s_of(lo);
  for (int i = 0; i < 200 && hi - lo > 1e-14 * hi; ++i) {
    const double mid = 0.5 * (lo + hi);
    const double fm = s_of(mid);
    if (fm == 0.0) {
      lo = hi = mid;
      break;
    }
    if (std::signbit(fm) == std::signbit(flo)) {
      lo = mid;
      flo = fm;
    } else {
      hi = mid;
    }
  }
  const double alpha = 0.5 * (lo + hi);
  const double beta = std::exp((ps.log_mean_pow - std::log(alpha)) / t);

  dist::DistModel model = dist::DistModel::lognormal(0, 1);
  if (inverse) {
    model = gamma == 1.0 ? dist::DistModel::iga(alpha, beta)
                         : dist::DistModel::giga(alpha, beta, gamma);
  } else {
    model = gamma == 1.0 ? dist::DistModel::ga(alpha, beta)
                         : dist::DistModel::gga(alpha, beta, gamma);
  }
  return {model, false, mean_loglik(model, xs), iters, true, std::nullopt};
}

namespace {

struct ProductParam {
  std::size_t dim;
  std::function<dist::DistModel(const std::vector<double>&)> make;
  std::vector<double> x0;
};

ProductParam product_param(dist::Kind base_kind, std::optional<double> fix_gamma, double sd) {
  const auto beta0_inv = [&](double a0, double g0) {
    // Match the product variance beta^2 Gamma(a - 2/g) / Gamma(a) to sd^2.
    if (a0 * g0 <= 2.0) return sd;
    return sd * std::exp(0.5 * (specfun::lgamma(a0) - specfun::lgamma(a0 - 2.0 / g0)));
  };
  const auto beta0_fwd = [&](double a0, double g0) {
    return sd * std::exp(0.5 * (specfun::lgamma(a0) - specfun::lgamma(a0 + 2.0 / g0)));
  };
  if (fix_gamma && !(*fix_gamma > 0.0)) {
    throw std::domain_error("fit_product: fix_gamma must be positive");
  }

  switch (base_kind) {
    case dist::Kind::GIGa: {
      if (fix_gamma) {
        const double g0 = *fix_gamma;
        const double a0 = 3.5 / g0;  // start from a tail exponent of 3.5
        return {2,
                [g0](const std::vector<double>& t) {
                  return dist::DistModel::giga(std::exp(t[0]), std::exp(t[1]), g0);
                },
                {std::log(a0), std::log(beta0_inv(a0, g0))}};
      }
      const double a0 = 1.75;
      return {3,
              [](const std::vector<double>& t) {
                return dist::DistModel::giga(std::exp(t[0]), std::exp(t[1]), std::exp(t[2]));
              },
              {std::log(a0), std::log(beta0_inv(a0, 2.0)), std::log(2.0)}};
    }
    case dist::Kind::IGa: {
      if (fix_gamma && *fix_gamma != 1.0) {
        throw std::invalid_argument("fit_product: IGa base has gamma fixed at 1");
      }
      const double a0 = 3.5;
      return {2,
              [](const std::vector<double>& t) {
                return dist::DistModel::iga(std::exp(t[0]), std::exp(t[1]));
              },
              {std::log(a0), std::log(beta0_inv(a0, 1.0))}};
    }
    case dist::Kind::GGa: {
      if (fix_gamma) {
        const double g0 = *fix_gamma;
        const double a0 = 1.0;
        return {2,
                [g0](const std::vector<double>& t) {
                  return dist::DistModel::gga(std::exp(t[0]), std::exp(t[1]), g0);
                },
                {std::log(a0), std::log(beta0_fwd(a0, g0))}};
      }
      const double a0 = 1.0;
      return {3,
              [](const std::vector<double>& t) {
                return dist::DistModel::gga(std::exp(t[0]), std::exp(t[1]), std::exp(t[2]));
              },
              {std::log(a0), std::log(beta0_fwd(a0, 2.0)), std::log(2.0)}};
    }
    case dist::Kind::Ga: {
      if (fix_gamma && *fix_gamma != 1.0) {
        throw std::invalid_argument("fit_product: Ga base has gamma fixed at 1");
      }
      return {2,
              [](const std::vector<double>& t) {
                return dist::DistModel::ga(std::exp(t[0]), std::exp(t[1]));
              },
              {0.0, std::log(beta0_fwd(1.0, 1.0))}};
    }
    case dist::Kind::LN: {
      if (fix_gamma) throw std::invalid_argument("fit_product: LN base has no gamma");
      const double s0 = 0.5;
      return {2,
              [](const std::vector<double>& t) {
                return dist::DistModel::lognormal(t[0], std::exp(t[1]));
              },
              {std::log(sd) - s0 * s0, std::log(s0)}};
    }
    default:
      throw std::domain_error("fit_product: base kind must have positive support");
  }
}

}  // namespace

FitResult fit_product(std::span<const double> zs, dist::Kind base_kind,
                      std::optional<double> fix_gamma, const SimplexConfig& cfg,
                      const std::vector<std::vector<double>>& extra_starts) {
  if (zs.size() < 10) throw DataError("fit_product: need at least 10 samples");
  for (double z : zs) {
    if (!std::isfinite(z)) throw DataError("fit_product: samples must be finite");
  }
  const double sd = sample_sd(zs);
  if (!(sd > 0.0)) throw DataError("fit_product: degenerate sample");

  const ProductParam pp = product_param(base_kind, fix_gamma, sd);
  const product::QuadratureConfig qcfg;
  const auto objective = [&](const std::vector<double>& t) -> double {
    try {
      const product::ProductModel pm(pp.make(t));
      const double ll = mean_loglik(pm, zs, qcfg);
      return std::isfinite(ll) ? -ll : kPenalty;
    } catch (const std::exception&) {
      return kPenalty;
    }
  };

  std::vector<std::vector<double>> starts{pp.x0};
  for (const auto& s : extra_starts) {
    if (s.size() != pp.dim) {
      throw std::invalid_argument("fit_product: extra start has wrong dimension");
    }
    starts.push_back(s);
  }

  NmResult best;
  best.fmin = kInf;
  int total_iters = 0;
  for (const auto& s : starts) {
    const NmResult r = nelder_mead(objective, s, cfg);
    total_iters += r.iterations;
    if (r.fmin < best.fmin) best = r;
  }
  if (!(best.fmin < kPenalty)) {
    throw NumericalError("fit_product: optimization failed from every start");
  }
  return {pp.make(best.x), true, -best.fmin, total_iters, best.converged, std::nullopt};
}

FitResult fit_student_direct(std::span<const double> zs, const SimplexConfig& cfg) {
  if (zs.size() < 10) throw DataError("fit_student_direct: need at least 10 samples");
  for (double z : zs) {
    if (!std::isfinite(z)) throw DataError("fit_student_direct: samples must be finite");
  }
  const double sd = sample_sd(zs);
  if (!(sd > 0.0)) throw DataError("fit_student_direct: degenerate sample");

  const auto objective = [&](const std::vector<double>& t) -> double {
    const double a = std::exp(t[0]), b = std::exp(t[1]);
    if (!std::isfinite(a) || !std::isfinite(b)) return kPenalty;
    KahanSum k;
    for (double z : zs) k.add(product::student_t_log_pdf(a, b, z));
    const double mll = k.s / static_cast<double>(zs.size());
    return std::isfinite(mll) ? -mll : kPenalty;
  };
  const double a0 = 1.75;
  const std::vector<double> x0{std::log(a0), std::log(sd * std::sqrt(a0 - 1.0))};
  const NmResult r = nelder_mead(objective, x0, cfg);
  const auto model = dist::DistModel::giga(std::exp(r.x[0]), std::exp(r.x[1]), 2.0);
  return {model, true, -r.fmin, r.iterations, r.converged, std::nullopt};
}

PreprocessedReturns preprocess_returns(std::span<const double> levels) {
  if (levels.size() < 3) throw DataError("preprocess_returns: need at least 3 levels");
  std::vector<double> r;
  r.reserve(levels.size() - 1);
  for (std::size_t i = 0; i + 1 < levels.size(); ++i) {
    if (!(levels[i] > 0.0) || !(levels[i + 1] > 0.0)) {
      throw DataError("preprocess_returns: levels must be positive");
    }
    r.push_back(std::log(levels[i + 1]) - std::log(levels[i]));
  }
  const double m = mean_of(r);
  // Population standard deviation, matching the unit-variance scaling the
  // product fits assume.
  KahanSum k;
  for (double v : r) k.add((v - m) * (v - m));
  const double s = std::sqrt(k.s / static_cast<double>(r.size()));
  if (!(s > 0.0)) throw DataError("preprocess_returns: constant log returns");
  PreprocessedReturns out;
  out.mean_log_return = m;
  out.stdev_log_return = s;
  out.z.reserve(r.size());
  for (double v : r) out.z.push_back((v - m) / s);
  return out;
}

}  // namespace volfit::fit
