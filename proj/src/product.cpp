#include "volfit/product.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "volfit/errors.hpp"
#include "volfit/quadrature.hpp"
#include "volfit/specfun.hpp"

namespace volfit::product {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
// Integrand is cut where the log drops this far below the peak; exp(-45)
// times the peak-region mass is beyond double rounding of the result.
constexpr double kLogCut = 45.0;

void check_cfg(const QuadratureConfig& cfg) {
  if (!(cfg.rel_tol > 0.0) || !(cfg.abs_tol > 0.0) || cfg.max_subdivisions < 1) {
    throw std::domain_error("QuadratureConfig: tolerances must be positive");
  }
}

// Integrands in u = ln(x/s), s the base scale (beta, or e^mu for LN).  In
// these coordinates both targets are strictly concave in u:
//   pdf mode:  L(u) = ln f(s e^u) + ln phi(zt e^{-u})          [dx/x measure]
//   cdf mode:  L(u) = ln f(s e^u) + u + ln s + ln Phi(-zt e^{-u})  [dx measure]
// with zt = |z|/s >= 0, so the peak is unique and bracketing by the sign of
// L' is reliable.
struct UIntegrand {
  dist::Kind kind;
  double a, g;     // shape, exponent for the gamma-family kinds
  double sg;       // sigma for LN
  double log_s;    // ln(scale anchor)
  double zt;
  bool cdf_mode;
  double log_norm; // u-independent additive constant

  double base_log(double u) const {
    switch (kind) {
      case dist::Kind::GIGa:
      case dist::Kind::IGa:
        return -std::exp(-g * u) - (1.0 + a * g) * u;
      case dist::Kind::GGa:
      case dist::Kind::Ga:
        return (a * g - 1.0) * u - std::exp(g * u);
      default:  // LN
        return -0.5 * (u / sg) * (u / sg) - u;
    }
  }

  double base_dlog(double u) const {
    switch (kind) {
      case dist::Kind::GIGa:
      case dist::Kind::IGa:
        return g * std::exp(-g * u) - (1.0 + a * g);
      case dist::Kind::GGa:
      case dist::Kind::Ga:
        return (a * g - 1.0) - g * std::exp(g * u);
      default:
        return -u / (sg * sg) - 1.0;
    }
  }

  double L(double u) const {
    const double w = zt * std::exp(-u);
    if (cdf_mode) return log_norm + base_log(u) + u + specfun::log_norm_cdf(-w);
    return log_norm + base_log(u) - 0.5 * w * w;
  }

  double dL(double u) const {
    const double w = zt * std::exp(-u);
    if (cdf_mode) {
      const double hazard =
          std::exp(specfun::log_norm_pdf(w) - specfun::log_norm_cdf(-w));
      return base_dlog(u) + 1.0 + hazard * w;
    }
    return base_dlog(u) + w * w;
  }
};

UIntegrand make_integrand(const dist::DistModel& base, double zz, bool cdf_mode) {
  UIntegrand f{};
  f.kind = base.kind();
  f.cdf_mode = cdf_mode;
  switch (base.kind()) {
    case dist::Kind::GIGa:
    case dist::Kind::IGa:
    case dist::Kind::GGa:
    case dist::Kind::Ga:
      f.a = base.alpha();
      f.g = base.gamma();
      f.log_s = std::log(base.beta());
      f.log_norm = std::log(base.gamma()) - f.log_s - specfun::lgamma(base.alpha());
      break;
    case dist::Kind::LN:
      f.sg = base.sigma();
      f.log_s = base.mu();
      f.log_norm = -std::log(f.sg) - 0.91893853320467274178 - f.log_s;
      break;
    default:
      throw std::logic_error("make_integrand: base must have positive support");
  }
  if (!cdf_mode) f.log_norm -= 0.91893853320467274178;  // ln(1/sqrt(2pi)) of phi
  if (cdf_mode) f.log_norm += f.log_s;                  // dx = s e^u du
  f.zt = zz / std::exp(f.log_s);
  return f;
}

// Unique zero of the strictly decreasing L' by doubling bracket + bisection.
double find_peak(const UIntegrand& f) {
  double lo = 0.0, hi = 0.0;
  if (f.dL(0.0) > 0.0) {
    double step = 1.0;
    hi = step;
    int guard = 0;
    while (f.dL(hi) > 0.0) {
      lo = hi;
      step *= 2.0;
      hi = lo + step;
      if (++guard > 200) throw NumericalError("product integrand: peak search diverged");
    }
  } else {
    double step = 1.0;
    lo = -step;
    int guard = 0;
    while (f.dL(lo) < 0.0) {
      hi = lo;
      step *= 2.0;
      lo = hi - step;
      if (++guard > 200) throw NumericalError("product integrand: peak search diverged");
    }
  }
  for (int i = 0; i < 100 && hi - lo > 1e-12 * (1.0 + std::fabs(lo)); ++i) {
    const double mid = 0.5 * (lo + hi);
    (f.dL(mid) > 0.0 ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

// Crossing of L(u) = L* - kLogCut on one side of the peak (dir = +-1).
double find_cut(const UIntegrand& f, double u_star, double l_star, double dir) {
  const double thresh = l_star - kLogCut;
  double in = u_star, step = 0.5;
  double out = u_star + dir * step;
  int guard = 0;
  while (f.L(out) > thresh) {
    in = out;
    step *= 2.0;
    out = in + dir * step;
    if (++guard > 200) throw NumericalError("product integrand: cut search diverged");
  }
  for (int i = 0; i < 60 && std::fabs(out - in) > 1e-6 * (1.0 + std::fabs(in)); ++i) {
    const double mid = 0.5 * (in + out);
    (f.L(mid) > thresh ? in : out) = mid;
  }
  return out;
}

// Peak-scaled integral of exp(L); returns L* + ln(int exp(L - L*)).
double log_integral(const UIntegrand& f, const QuadratureConfig& cfg, const char* who) {
  const double u_star = find_peak(f);
  const double l_star = f.L(u_star);
  if (!std::isfinite(l_star)) return -kInf;
  const double lo = find_cut(f, u_star, l_star, -1.0);
  const double hi = find_cut(f, u_star, l_star, +1.0);
  const auto g = [&](double u) { return std::exp(f.L(u) - l_star); };
  const auto r = quad::gk_adaptive(g, lo, hi, cfg.rel_tol, cfg.abs_tol, cfg.max_subdivisions);
  if (!r.converged) {
    const double achieved = r.abs_error / std::max(std::fabs(r.value), 1e-300);
    throw NumericalError(std::string(who) + ": quadrature did not reach tolerance", achieved);
  }
  return l_star + std::log(r.value);
}

// ln of the leading tail coefficient C in p(z) ~ C |z|^(-1-k), k = alpha*gamma:
// C = gamma beta^k / Gamma(alpha) * 2^(k/2-1) Gamma((k+1)/2) / sqrt(pi).
double log_tail_coeff(double alpha, double beta, double gamma) {
  const double k = alpha * gamma;
  return std::log(gamma) + k * std::log(beta) - specfun::lgamma(alpha) +
         (0.5 * k - 1.0) * M_LN2 + specfun::lgamma(0.5 * (k + 1.0)) -
         0.5 * std::log(M_PI);
}

}  // namespace

ProductModel::ProductModel(dist::DistModel base) : base_(std::move(base)) {
  if (!base_.positive_support()) {
    throw std::domain_error("ProductModel: base must have positive support");
  }
}

double product_log_pdf(const ProductModel& pm, double z, const QuadratureConfig& cfg) {
  check_cfg(cfg);
  if (!std::isfinite(z)) throw std::domain_error("product_log_pdf: z must be finite");
  const auto& base = pm.base();
  const double zz = std::fabs(z);

  const bool inv_kind = base.kind() == dist::Kind::GIGa || base.kind() == dist::Kind::IGa;
  if (inv_kind) {
    // Far tail: the quadrature peak narrows against the power-law envelope,
    // and the leading asymptote is already exact to rounding there.
    const double ag = base.alpha() * base.gamma();
    double cut = 1000.0 * base.beta();
    if (ag > 2.0) {
      const double sd = base.beta() * std::exp(0.5 * (specfun::lgamma(base.alpha() - 2.0 / base.gamma()) -
                                                      specfun::lgamma(base.alpha())));
      cut = 40.0 * sd;
    }
    if (zz > cut) {
      return log_tail_coeff(base.alpha(), base.beta(), base.gamma()) - (1.0 + ag) * std::log(zz);
    }
  }

  if (zz == 0.0 && (base.kind() == dist::Kind::GGa || base.kind() == dist::Kind::Ga) &&
      base.alpha() * base.gamma() <= 1.0) {
    return kInf;  // E[1/x] diverges: the density has a pole at the origin
  }

  const UIntegrand f = make_integrand(base, zz, false);
  return log_integral(f, cfg, "product_log_pdf");
}

double product_pdf(const ProductModel& pm, double z, const QuadratureConfig& cfg) {
  return std::exp(product_log_pdf(pm, z, cfg));
}

double product_cdf(const ProductModel& pm, double z, const QuadratureConfig& cfg) {
  check_cfg(cfg);
  if (!std::isfinite(z)) throw std::domain_error("product_cdf: z must be finite");
  if (z == 0.0) return 0.5;
  const UIntegrand f = make_integrand(pm.base(), std::fabs(z), true);
  const double below = std::exp(log_integral(f, cfg, "product_cdf"));
  return z < 0.0 ? below : 1.0 - below;
}

double student_t_log_pdf(double alpha, double beta, double z) {
  if (!(alpha > 0.0) || !(beta > 0.0)) {
    throw std::domain_error("student_t_log_pdf: alpha and beta must be positive");
  }
  return specfun::lgamma(alpha + 0.5) - specfun::lgamma(alpha) -
         0.91893853320467274178 - std::log(beta) -
         (alpha + 0.5) * std::log1p(z * z / (2.0 * beta * beta));
}

double student_t_pdf(double alpha, double beta, double z) {
  return std::exp(student_t_log_pdf(alpha, beta, z));
}

double product_variance(const ProductModel& pm) {
  const auto& base = pm.base();
  switch (base.kind()) {
    case dist::Kind::GIGa:
    case dist::Kind::IGa: {
      const double a = base.alpha(), g = base.gamma();
      if (a * g <= 2.0) return kInf;
      return base.beta() * base.beta() *
             std::exp(specfun::lgamma(a - 2.0 / g) - specfun::lgamma(a));
    }
    case dist::Kind::GGa:
    case dist::Kind::Ga: {
      const double a = base.alpha(), g = base.gamma();
      return base.beta() * base.beta() *
             std::exp(specfun::lgamma(a + 2.0 / g) - specfun::lgamma(a));
    }
    case dist::Kind::LN:
      return std::exp(2.0 * base.mu() + 2.0 * base.sigma() * base.sigma());
    default:
      throw std::logic_error("product_variance: unreachable");
  }
}

std::optional<double> product_tail_exponent(const ProductModel& pm) {
  const auto& base = pm.base();
  if (base.kind() == dist::Kind::GIGa || base.kind() == dist::Kind::IGa) {
    return base.alpha() * base.gamma();
  }
  return std::nullopt;
}

std::vector<double> sample(const ProductModel& pm, std::size_t n, std::uint64_t seed) {
  Philox rng(seed);
  std::vector<double> out(n);
  for (auto& v : out) {
    const double x = dist::sample_one(pm.base(), rng);
    v = x * rng.normal();
  }
  return out;
}

}  // namespace volfit::product
