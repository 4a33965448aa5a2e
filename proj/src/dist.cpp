#include "volfit/dist.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "volfit/errors.hpp"
#include "volfit/quadrature.hpp"
#include "volfit/specfun.hpp"

namespace volfit::dist {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kNegInf = -std::numeric_limits<double>::infinity();

void require_pos(double v, const char* what) {
  if (!(v > 0.0) || !std::isfinite(v)) {
    throw std::domain_error(std::string("DistModel: ") + what + " must be positive and finite");
  }
}

void require_finite(double v, const char* what) {
  if (!std::isfinite(v)) {
    throw std::domain_error(std::string("DistModel: ") + what + " must be finite");
  }
}

double gamma_ratio(double num, double den) {
  return std::exp(specfun::lgamma(num) - specfun::lgamma(den));
}

}  // namespace

DistModel DistModel::giga(double alpha, double beta, double gamma) {
  require_pos(alpha, "alpha");
  require_pos(beta, "beta");
  require_pos(gamma, "gamma");
  return DistModel(Kind::GIGa, alpha, beta, gamma);
}

DistModel DistModel::iga(double alpha, double beta) {
  require_pos(alpha, "alpha");
  require_pos(beta, "beta");
  return DistModel(Kind::IGa, alpha, beta, 1.0);
}

DistModel DistModel::gga(double alpha, double beta, double gamma) {
  require_pos(alpha, "alpha");
  require_pos(beta, "beta");
  require_pos(gamma, "gamma");
  return DistModel(Kind::GGa, alpha, beta, gamma);
}

DistModel DistModel::ga(double alpha, double beta) {
  require_pos(alpha, "alpha");
  require_pos(beta, "beta");
  return DistModel(Kind::Ga, alpha, beta, 1.0);
}

DistModel DistModel::lognormal(double mu, double sigma) {
  require_finite(mu, "mu");
  require_pos(sigma, "sigma");
  return DistModel(Kind::LN, mu, sigma, 0.0);
}

DistModel DistModel::normal(double mu, double sigma) {
  require_finite(mu, "mu");
  require_pos(sigma, "sigma");
  return DistModel(Kind::Normal, mu, sigma, 0.0);
}

DistModel DistModel::student_t(double loc, double scale, double dof) {
  require_finite(loc, "loc");
  require_pos(scale, "scale");
  require_pos(dof, "dof");
  return DistModel(Kind::StudentT, loc, scale, dof);
}

std::string DistModel::kind_name() const {
  switch (kind_) {
    case Kind::GIGa: return "GIGa";
    case Kind::IGa: return "IGa";
    case Kind::GGa: return "GGa";
    case Kind::Ga: return "Ga";
    case Kind::LN: return "LN";
    case Kind::Normal: return "Normal";
    case Kind::StudentT: return "StudentT";
  }
  return "?";
}

bool DistModel::positive_support() const {
  return kind_ != Kind::Normal && kind_ != Kind::StudentT;
}

nlohmann::ordered_json DistModel::to_json() const {
  nlohmann::ordered_json params;
  switch (kind_) {
    case Kind::GIGa:
    case Kind::GGa:
      params = {{"alpha", p1_}, {"beta", p2_}, {"gamma", p3_}};
      break;
    case Kind::IGa:
    case Kind::Ga:
      params = {{"alpha", p1_}, {"beta", p2_}};
      break;
    case Kind::LN:
    case Kind::Normal:
      params = {{"mu", p1_}, {"sigma", p2_}};
      break;
    case Kind::StudentT:
      params = {{"loc", p1_}, {"scale", p2_}, {"dof", p3_}};
      break;
  }
  return {{"kind", kind_name()}, {"params", params}};
}

DistModel DistModel::from_json(const nlohmann::ordered_json& j) {
  try {
    const std::string kind = j.at("kind").get<std::string>();
    const auto& p = j.at("params");
    if (kind == "GIGa") return giga(p.at("alpha"), p.at("beta"), p.at("gamma"));
    if (kind == "IGa") return iga(p.at("alpha"), p.at("beta"));
    if (kind == "GGa") return gga(p.at("alpha"), p.at("beta"), p.at("gamma"));
    if (kind == "Ga") return ga(p.at("alpha"), p.at("beta"));
    if (kind == "LN") return lognormal(p.at("mu"), p.at("sigma"));
    if (kind == "Normal") return normal(p.at("mu"), p.at("sigma"));
    if (kind == "StudentT") return student_t(p.at("loc"), p.at("scale"), p.at("dof"));
    throw DataError("DistModel::from_json: unknown kind '" + kind + "'");
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("DistModel::from_json: malformed model JSON: ") + e.what());
  }
}

double log_pdf(const DistModel& m, double x) {
  switch (m.kind()) {
    case Kind::GIGa:
    case Kind::IGa: {
      if (x <= 0.0) return kNegInf;
      const double a = m.alpha(), b = m.beta(), g = m.gamma();
      const double lbx = std::log(b) - std::log(x);
      const double t = std::exp(g * lbx);
      return std::log(g) - std::log(b) - specfun::lgamma(a) - t + (1.0 + a * g) * lbx;
    }
    case Kind::GGa:
    case Kind::Ga: {
      if (x <= 0.0) return kNegInf;
      const double a = m.alpha(), b = m.beta(), g = m.gamma();
      const double lxb = std::log(x) - std::log(b);
      const double u = std::exp(g * lxb);
      return std::log(g) - std::log(b) - specfun::lgamma(a) + (a * g - 1.0) * lxb - u;
    }
    case Kind::LN: {
      if (x <= 0.0) return kNegInf;
      const double z = (std::log(x) - m.mu()) / m.sigma();
      return specfun::log_norm_pdf(z) - std::log(m.sigma()) - std::log(x);
    }
    case Kind::Normal: {
      const double z = (x - m.mu()) / m.sigma();
      return specfun::log_norm_pdf(z) - std::log(m.sigma());
    }
    case Kind::StudentT: {
      const double s = m.t_scale(), nu = m.t_dof();
      const double z = (x - m.t_loc()) / s;
      return specfun::lgamma(0.5 * (nu + 1.0)) - specfun::lgamma(0.5 * nu) -
             0.5 * std::log(nu * M_PI) - std::log(s) -
             0.5 * (nu + 1.0) * std::log1p(z * z / nu);
    }
  }
  return kNegInf;
}

double pdf(const DistModel& m, double x) { return std::exp(log_pdf(m, x)); }

double cdf(const DistModel& m, double x) {
  switch (m.kind()) {
    case Kind::GIGa:
    case Kind::IGa: {
      if (x <= 0.0) return 0.0;
      const double t = std::exp(m.gamma() * (std::log(m.beta()) - std::log(x)));
      return specfun::reg_gamma_q(m.alpha(), t);
    }
    case Kind::GGa:
    case Kind::Ga: {
      if (x <= 0.0) return 0.0;
      const double u = std::exp(m.gamma() * (std::log(x) - std::log(m.beta())));
      return specfun::reg_gamma_p(m.alpha(), u);
    }
    case Kind::LN: {
      if (x <= 0.0) return 0.0;
      return specfun::norm_cdf((std::log(x) - m.mu()) / m.sigma());
    }
    case Kind::Normal:
      return specfun::norm_cdf((x - m.mu()) / m.sigma());
    case Kind::StudentT: {
      const double z = x - m.t_loc();
      if (z == 0.0) return 0.5;
      const auto f = [&](double u) { return pdf(m, m.t_loc() + u); };
      const auto r = quad::gk_adaptive(f, 0.0, std::fabs(z), 1e-12, 1e-15, 200);
      const double half = std::min(r.value, 0.5);
      return z > 0.0 ? 0.5 + half : 0.5 - half;
    }
  }
  return 0.0;
}

Moments mean_var(const DistModel& m) {
  switch (m.kind()) {
    case Kind::GIGa:
    case Kind::IGa: {
      const double a = m.alpha(), b = m.beta(), g = m.gamma();
      if (a * g <= 1.0) throw std::domain_error("mean_var: GIGa mean undefined (alpha*gamma <= 1)");
      const double mean = b * gamma_ratio(a - 1.0 / g, a);
      if (a * g <= 2.0) return {mean, kInf};
      const double m2 = b * b * gamma_ratio(a - 2.0 / g, a);
      return {mean, m2 - mean * mean};
    }
    case Kind::GGa:
    case Kind::Ga: {
      const double a = m.alpha(), b = m.beta(), g = m.gamma();
      const double mean = b * gamma_ratio(a + 1.0 / g, a);
      const double m2 = b * b * gamma_ratio(a + 2.0 / g, a);
      return {mean, m2 - mean * mean};
    }
    case Kind::LN: {
      const double s2 = m.sigma() * m.sigma();
      const double mean = std::exp(m.mu() + 0.5 * s2);
      return {mean, (std::exp(s2) - 1.0) * std::exp(2.0 * m.mu() + s2)};
    }
    case Kind::Normal:
      return {m.mu(), m.sigma() * m.sigma()};
    case Kind::StudentT: {
      const double nu = m.t_dof();
      if (nu <= 1.0) throw std::domain_error("mean_var: StudentT mean undefined (dof <= 1)");
      if (nu <= 2.0) return {m.t_loc(), kInf};
      const double s = m.t_scale();
      return {m.t_loc(), s * s * nu / (nu - 2.0)};
    }
  }
  return {0.0, 0.0};
}

double sample_one(const DistModel& m, Philox& rng) {
  switch (m.kind()) {
    case Kind::GIGa:
    case Kind::IGa:
      return m.beta() * std::pow(rng.gamma(m.alpha()), -1.0 / m.gamma());
    case Kind::GGa:
    case Kind::Ga:
      return m.beta() * std::pow(rng.gamma(m.alpha()), 1.0 / m.gamma());
    case Kind::LN:
      return std::exp(m.mu() + m.sigma() * rng.normal());
    case Kind::Normal:
      return m.mu() + m.sigma() * rng.normal();
    case Kind::StudentT: {
      const double nu = m.t_dof();
      const double z = rng.normal();
      const double v = 2.0 * rng.gamma(0.5 * nu);
      return m.t_loc() + m.t_scale() * z / std::sqrt(v / nu);
    }
  }
  return 0.0;
}

std::vector<double> sample(const DistModel& m, std::size_t n, std::uint64_t seed) {
  Philox rng(seed);
  std::vector<double> out(n);
  for (auto& v : out) v = sample_one(m, rng);
  return out;
}

DistModel scaled_to_unit_mean(const DistModel& m) {
  const double mean = mean_var(m).mean;
  if (!(mean > 0.0) || !std::isfinite(mean)) {
    throw std::domain_error("scaled_to_unit_mean: mean must be finite and positive");
  }
  switch (m.kind()) {
    case Kind::GIGa:
      return DistModel::giga(m.alpha(), m.beta() / mean, m.gamma());
    case Kind::IGa:
      return DistModel::iga(m.alpha(), m.beta() / mean);
    case Kind::GGa:
      return DistModel::gga(m.alpha(), m.beta() / mean, m.gamma());
    case Kind::Ga:
      return DistModel::ga(m.alpha(), m.beta() / mean);
    case Kind::LN:
      return DistModel::lognormal(m.mu() - std::log(mean), m.sigma());
    case Kind::Normal:
      return DistModel::normal(1.0, m.sigma() / mean);
    case Kind::StudentT:
      return DistModel::student_t(1.0, m.t_scale() / mean, m.t_dof());
  }
  throw std::logic_error("scaled_to_unit_mean: unreachable");
}

IgaModeStats iga_mode_stats(double alpha) {
  if (!(alpha > 1.0)) throw std::domain_error("iga_mode_stats: alpha must be > 1");
  // Unit-mean IGa has beta = alpha - 1; its mode sits at beta / (alpha + 1).
  const double mode = (alpha - 1.0) / (alpha + 1.0);
  const double ap1 = alpha + 1.0;
  const double log_pdf_at_mode =
      ap1 * std::log(ap1) - ap1 - specfun::lgamma(alpha) - std::log(alpha - 1.0);
  return {mode, std::exp(log_pdf_at_mode)};
}

LnLimitPair ln_limit_of_giga(const LnParams& p) {
  require_pos(p.sigma, "sigma");
  require_pos(p.lambda, "lambda");
  require_finite(p.mu, "mu");
  const double alpha = 1.0 / (p.lambda * p.lambda);
  const double beta = std::exp(p.mu - (2.0 * p.sigma / p.lambda) * std::log(p.lambda));
  const double gamma = p.lambda / p.sigma;
  return {DistModel::giga(alpha, beta, gamma), DistModel::lognormal(p.mu, p.sigma)};
}

LnParams ln_params_of_giga(const DistModel& g) {
  if (g.kind() != Kind::GIGa && g.kind() != Kind::IGa) {
    throw std::domain_error("ln_params_of_giga: model must be GIGa or IGa");
  }
  const double lambda = 1.0 / std::sqrt(g.alpha());
  const double sigma = lambda / g.gamma();
  const double mu = std::log(g.beta()) + (2.0 / g.gamma()) * std::log(lambda);
  return {mu, sigma, lambda};
}

}  // namespace volfit::dist
