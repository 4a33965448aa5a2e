#include "volfit/sde.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "volfit/diag.hpp"
#include "volfit/rng.hpp"
#include "volfit/specfun.hpp"

namespace volfit::sde {

namespace {

void require_pos(double v, const char* what) {
  if (!(v > 0.0) || !std::isfinite(v)) {
    throw std::domain_error(std::string("SdeSpec: ") + what + " must be positive and finite");
  }
}

void require_nonneg(double v, const char* what) {
  if (!(v >= 0.0) || !std::isfinite(v)) {
    throw std::domain_error(std::string("SdeSpec: ") + what + " must be >= 0 and finite");
  }
}

void require_finite(double v, const char* what) {
  if (!std::isfinite(v)) {
    throw std::domain_error(std::string("SdeSpec: ") + what + " must be finite");
  }
}

}  // namespace

SdeSpec SdeSpec::giga_vol(double J, double theta, double Sigma, double gamma) {
  require_pos(J, "J");
  require_pos(theta, "theta");
  require_nonneg(Sigma, "Sigma");
  require_pos(gamma, "gamma");
  SdeSpec s;
  s.kind = Kind::GigaVol;
  s.J = J;
  s.theta = theta;
  s.Sigma = Sigma;
  s.gamma = gamma;
  return s;
}

SdeSpec SdeSpec::variance_iga(double J_tilde, double Sigma_tilde, double V_bar) {
  require_pos(J_tilde, "J_tilde");
  require_nonneg(Sigma_tilde, "Sigma_tilde");
  require_pos(V_bar, "V_bar");
  SdeSpec s;
  s.kind = Kind::VarianceIGa;
  s.J_tilde = J_tilde;
  s.Sigma_tilde = Sigma_tilde;
  s.V_bar = V_bar;
  return s;
}

SdeSpec SdeSpec::heston(double J, double V_bar, double phi) {
  require_pos(J, "J");
  require_pos(V_bar, "V_bar");
  require_nonneg(phi, "phi");
  SdeSpec s;
  s.kind = Kind::HestonVariance;
  s.J = J;
  s.V_bar = V_bar;
  s.phi = phi;
  return s;
}

SdeSpec SdeSpec::gga_vol_a(double J, double theta, double Sigma, double gamma) {
  require_pos(J, "J");
  require_pos(theta, "theta");
  require_nonneg(Sigma, "Sigma");
  require_pos(gamma, "gamma");
  SdeSpec s;
  s.kind = Kind::GgaVolA;
  s.J = J;
  s.theta = theta;
  s.Sigma = Sigma;
  s.gamma = gamma;
  return s;
}

SdeSpec SdeSpec::gga_vol_b(double J, double theta, double Sigma, double gamma) {
  SdeSpec s = gga_vol_a(J, theta, Sigma, gamma);
  s.kind = Kind::GgaVolB;
  return s;
}

SdeSpec SdeSpec::gga_vol_c(double J, double theta, double Sigma, double gamma) {
  SdeSpec s = gga_vol_a(J, theta, Sigma, gamma);
  s.kind = Kind::GgaVolC;
  return s;
}

SdeSpec SdeSpec::ou_log(double theta, double mu, double sigma) {
  require_pos(theta, "theta");
  require_finite(mu, "mu");
  require_nonneg(sigma, "sigma");
  SdeSpec s;
  s.kind = Kind::OuLog;
  s.ou_theta = theta;
  s.ou_mu = mu;
  s.ou_sigma = sigma;
  return s;
}

SdeSpec SdeSpec::ln_vol(double theta, double mu, double sigma) {
  SdeSpec s = ou_log(theta, mu, sigma);
  s.kind = Kind::LnVol;
  return s;
}

double SdeSpec::drift(double x) const {
  switch (kind) {
    case Kind::GigaVol:
      return J * (theta * std::pow(x, 1.0 - gamma) - x);
    case Kind::VarianceIGa:
      return J_tilde * (V_bar - x);
    case Kind::HestonVariance:
      return J * (V_bar - x);
    case Kind::GgaVolA:
      return J * (x - theta * std::pow(x, 1.0 + gamma));
    case Kind::GgaVolB:
      return J * (1.0 - theta * std::pow(x, gamma));
    case Kind::GgaVolC:
      return J * (1.0 / x - theta * std::pow(x, gamma - 1.0));
    case Kind::OuLog:
      return ou_theta * (ou_mu - x);
    case Kind::LnVol:
      return ou_theta * x * (ou_mu - std::log(x)) + 0.5 * ou_sigma * ou_sigma * x;
  }
  return 0.0;
}

double SdeSpec::diffusion(double x) const {
  switch (kind) {
    case Kind::GigaVol:
    case Kind::GgaVolA:
      return Sigma * x;
    case Kind::VarianceIGa:
      return Sigma_tilde * x;
    case Kind::HestonVariance:
      return phi * std::sqrt(std::max(x, 0.0));
    case Kind::GgaVolB:
      return Sigma * std::sqrt(std::max(x, 0.0));
    case Kind::GgaVolC:
      return Sigma;
    case Kind::OuLog:
      return ou_sigma;
    case Kind::LnVol:
      return ou_sigma * x;
  }
  return 0.0;
}

bool SdeSpec::positive_support() const { return kind != Kind::OuLog; }

double SdeSpec::rate() const {
  switch (kind) {
    case Kind::VarianceIGa:
      return J_tilde;
    case Kind::OuLog:
    case Kind::LnVol:
      return ou_theta;
    default:
      return J;
  }
}

std::string SdeSpec::kind_name() const {
  switch (kind) {
    case Kind::GigaVol: return "GigaVol";
    case Kind::VarianceIGa: return "VarianceIGa";
    case Kind::HestonVariance: return "HestonVariance";
    case Kind::GgaVolA: return "GgaVolA";
    case Kind::GgaVolB: return "GgaVolB";
    case Kind::GgaVolC: return "GgaVolC";
    case Kind::OuLog: return "OuLog";
    case Kind::LnVol: return "LnVol";
  }
  return "?";
}

std::vector<double> simulate(const SdeSpec& spec, const SimConfig& cfg) {
  if (!(cfg.dt > 0.0) || !std::isfinite(cfg.dt)) {
    throw std::domain_error("simulate: dt must be positive");
  }
  if (cfg.steps < 1) throw std::domain_error("simulate: steps must be >= 1");
  if (!std::isfinite(cfg.x0)) throw std::domain_error("simulate: x0 must be finite");
  if (spec.positive_support() && !(cfg.x0 > 0.0)) {
    throw std::domain_error("simulate: x0 must be positive for this kind");
  }
  if (spec.rate() * cfg.dt > 0.5) {
    throw std::domain_error("simulate: dt too coarse for the mean-reversion rate");
  }

  Philox rng(cfg.seed);
  const double sdt = std::sqrt(cfg.dt);
  std::vector<double> path(static_cast<std::size_t>(cfg.steps) + 1);
  path[0] = cfg.x0;
  double x = cfg.x0;
  for (long long i = 1; i <= cfg.steps; ++i) {
    const double z = rng.normal();
    double next = x + spec.drift(x) * cfg.dt + spec.diffusion(x) * sdt * z;
    if (spec.positive_support() && next <= 0.0) next = x * 1e-8;
    x = next;
    path[static_cast<std::size_t>(i)] = x;
  }
  return path;
}

dist::DistModel stationary_of(const SdeSpec& spec) {
  switch (spec.kind) {
    case Kind::GigaVol: {
      require_pos(spec.Sigma, "Sigma (stationary law)");
      const double r = 2.0 * spec.J / (spec.Sigma * spec.Sigma);
      const double alpha = (1.0 + r) / spec.gamma;
      const double beta = std::pow(spec.theta * r / spec.gamma, 1.0 / spec.gamma);
      return spec.gamma == 1.0 ? dist::DistModel::iga(alpha, beta)
                               : dist::DistModel::giga(alpha, beta, spec.gamma);
    }
    case Kind::VarianceIGa: {
      require_pos(spec.Sigma_tilde, "Sigma_tilde (stationary law)");
      const double r = 2.0 * spec.J_tilde / (spec.Sigma_tilde * spec.Sigma_tilde);
      return dist::DistModel::iga(1.0 + r, spec.V_bar * r);
    }
    case Kind::HestonVariance: {
      require_pos(spec.phi, "phi (stationary law)");
      const double shape = 2.0 * spec.J * spec.V_bar / (spec.phi * spec.phi);
      const double scale = spec.phi * spec.phi / (2.0 * spec.J);
      return dist::DistModel::ga(shape, scale);
    }
    case Kind::GgaVolA: {
      require_pos(spec.Sigma, "Sigma (stationary law)");
      const double r = 2.0 * spec.J / (spec.Sigma * spec.Sigma);
      if (!(r > 1.0)) {
        throw std::domain_error("stationary_of: GgaVolA needs 2J/Sigma^2 > 1");
      }
      const double alpha = (r - 1.0) / spec.gamma;
      const double beta =
          std::pow(spec.gamma / (r * spec.theta), 1.0 / spec.gamma);
      return spec.gamma == 1.0 ? dist::DistModel::ga(alpha, beta)
                               : dist::DistModel::gga(alpha, beta, spec.gamma);
    }
    case Kind::GgaVolB:
    case Kind::GgaVolC: {
      require_pos(spec.Sigma, "Sigma (stationary law)");
      const double r = 2.0 * spec.J / (spec.Sigma * spec.Sigma);
      const double alpha =
          (spec.kind == Kind::GgaVolB ? r : 1.0 + r) / spec.gamma;
      const double beta =
          std::pow(spec.gamma / (r * spec.theta), 1.0 / spec.gamma);
      return spec.gamma == 1.0 ? dist::DistModel::ga(alpha, beta)
                               : dist::DistModel::gga(alpha, beta, spec.gamma);
    }
    case Kind::OuLog: {
      require_pos(spec.ou_sigma, "sigma (stationary law)");
      return dist::DistModel::normal(spec.ou_mu,
                                     spec.ou_sigma / std::sqrt(2.0 * spec.ou_theta));
    }
    case Kind::LnVol: {
      require_pos(spec.ou_sigma, "sigma (stationary law)");
      return dist::DistModel::lognormal(spec.ou_mu,
                                        spec.ou_sigma / std::sqrt(2.0 * spec.ou_theta));
    }
  }
  throw std::logic_error("stationary_of: unreachable");
}

double theta_from_mean(double mean_sigma, double J, double Sigma, double gamma) {
  if (!(mean_sigma > 0.0)) throw std::domain_error("theta_from_mean: mean must be positive");
  require_pos(J, "J");
  require_pos(Sigma, "Sigma");
  require_pos(gamma, "gamma");
  const double r = 2.0 * J / (Sigma * Sigma);
  const double alpha = (1.0 + r) / gamma;
  const double lg =
      specfun::lgamma(alpha) - specfun::lgamma(alpha - 1.0 / gamma);
  return (gamma / r) * std::exp(gamma * (std::log(mean_sigma) + lg));
}

VolParams variance_to_vol_params(double J_tilde, double Sigma_tilde, double V_bar) {
  require_pos(J_tilde, "J_tilde");
  require_pos(Sigma_tilde, "Sigma_tilde");
  require_pos(V_bar, "V_bar");
  const double J = 0.5 * J_tilde + Sigma_tilde * Sigma_tilde / 8.0;
  return {J, V_bar * 0.5 * J_tilde / J, 0.5 * Sigma_tilde, 2.0};
}

double mean_sigma_from_variance(double J_tilde, double Sigma_tilde, double V_bar) {
  require_pos(J_tilde, "J_tilde");
  require_pos(Sigma_tilde, "Sigma_tilde");
  require_pos(V_bar, "V_bar");
  const double r = 2.0 * J_tilde / (Sigma_tilde * Sigma_tilde);
  return std::sqrt(V_bar * r) *
         std::exp(specfun::lgamma(r + 0.5) - specfun::lgamma(r + 1.0));
}

std::vector<double> fp_stationary_pdf(const std::function<double(double)>& drift,
                                      const std::function<double(double)>& diffusion,
                                      const std::vector<double>& grid) {
  const std::size_t n = grid.size();
  if (n < 3) throw std::domain_error("fp_stationary_pdf: grid needs at least 3 points");
  for (std::size_t i = 0; i + 1 < n; ++i) {
    if (!(grid[i] < grid[i + 1])) {
      throw std::domain_error("fp_stationary_pdf: grid must be strictly increasing");
    }
  }

  std::vector<double> s(n), log_p(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double g = diffusion(grid[i]);
    if (!(std::fabs(g) > 0.0) || !std::isfinite(g)) {
      throw std::domain_error("fp_stationary_pdf: diffusion must be nonzero on the grid");
    }
    s[i] = 2.0 * drift(grid[i]) / (g * g);
    log_p[i] = -2.0 * std::log(std::fabs(g));
  }
  double cum = 0.0;
  log_p[0] += cum;
  for (std::size_t i = 1; i < n; ++i) {
    cum += 0.5 * (s[i] + s[i - 1]) * (grid[i] - grid[i - 1]);
    log_p[i] += cum;
  }

  const double mx = *std::max_element(log_p.begin(), log_p.end());
  if (!std::isfinite(mx)) throw NumericalError("fp_stationary_pdf: potential overflowed");
  std::vector<double> p(n);
  for (std::size_t i = 0; i < n; ++i) p[i] = std::exp(log_p[i] - mx);

  // A sharp maximum on the boundary means the true density diverges beyond
  // the grid and the normalization is an artifact of truncation.
  const std::size_t imax =
      std::distance(p.begin(), std::max_element(p.begin(), p.end()));
  if ((imax == 0 && log_p[0] - log_p[1] > 5.0) ||
      (imax == n - 1 && log_p[n - 1] - log_p[n - 2] > 5.0)) {
    throw NumericalError("fp_stationary_pdf: density not integrable on this grid");
  }

  double mass = 0.0;
  for (std::size_t i = 1; i < n; ++i) {
    mass += 0.5 * (p[i] + p[i - 1]) * (grid[i] - grid[i - 1]);
  }
  if (!(mass > 0.0) || !std::isfinite(mass)) {
    throw NumericalError("fp_stationary_pdf: normalization failed");
  }
  for (double& v : p) v /= mass;
  return p;
}

nlohmann::ordered_json RelaxResult::to_json() const {
  nlohmann::ordered_json j;
  j["relax_time"] = relax_time;
  j["n_paths"] = n_paths;
  j["dt"] = dt;
  nlohmann::ordered_json tr = nlohmann::ordered_json::array();
  for (const auto& [t, p] : trace) tr.push_back({{"t", t}, {"p", p}});
  j["trace"] = tr;
  return j;
}

RelaxResult relaxation_experiment(double J, double Sigma, const RelaxConfig& cfg) {
  require_pos(J, "J");
  require_pos(Sigma, "Sigma");
  if (cfg.n_paths < 10) throw std::domain_error("relaxation_experiment: need >= 10 paths");
  if (!(cfg.dt > 0.0) || J * cfg.dt > 0.1) {
    throw std::domain_error("relaxation_experiment: dt must be positive with J*dt <= 0.1");
  }
  if (!(cfg.p_threshold > 0.0) || !(cfg.p_threshold < 1.0)) {
    throw std::domain_error("relaxation_experiment: p_threshold must be in (0,1)");
  }
  if (!(cfg.x0 > 0.0)) throw std::domain_error("relaxation_experiment: x0 must be positive");

  const double r = 2.0 * J / (Sigma * Sigma);
  const dist::DistModel target = dist::DistModel::iga(1.0 + r, r);

  const double check_dt = cfg.check_interval > 0.0 ? cfg.check_interval : 0.05 / J;
  const long long steps_per_check =
      std::max<long long>(1, std::llround(check_dt / cfg.dt));
  const double max_time =
      cfg.max_time > 0.0 ? cfg.max_time : 40.0 * relax_mean_estimate(J, Sigma * Sigma);

  const std::size_t np = static_cast<std::size_t>(cfg.n_paths);
  std::vector<Philox> rngs;
  rngs.reserve(np);
  for (std::size_t i = 0; i < np; ++i) rngs.emplace_back(cfg.seed, i);

  std::vector<double> x(np, cfg.x0);
  if (cfg.stationary_start) {
    for (std::size_t i = 0; i < np; ++i) x[i] = dist::sample_one(target, rngs[i]);
  }

  const double sdt = std::sqrt(cfg.dt);
  RelaxResult out;
  out.n_paths = cfg.n_paths;
  out.dt = cfg.dt;

  double t = 0.0;
  while (t <= max_time) {
    for (long long s = 0; s < steps_per_check; ++s) {
      for (std::size_t i = 0; i < np; ++i) {
        const double xi = x[i];
        double next = xi + J * (1.0 - xi) * cfg.dt + Sigma * xi * sdt * rngs[i].normal();
        if (next <= 0.0) next = xi * 1e-8;
        x[i] = next;
      }
    }
    t += static_cast<double>(steps_per_check) * cfg.dt;
    const auto ks = diag::ks_test(x, target);
    out.trace.emplace_back(t, ks.p_value);
    if (ks.p_value > cfg.p_threshold) {
      out.relax_time = t;
      return out;
    }
  }
  throw RelaxHorizonError("relaxation_experiment: no KS acceptance before max_time", out);
}

double relax_mean_estimate(double J, double sigma2, double c1) {
  require_pos(J, "J");
  require_pos(sigma2, "sigma2");
  const double r = 2.0 * J / sigma2;
  return (2.0 * c1 / sigma2) * (std::log(r) - specfun::digamma(r));
}

double relax_stdev_estimate(double J, double sigma2, double c2) {
  require_pos(J, "J");
  require_pos(sigma2, "sigma2");
  const double r = 2.0 * J / sigma2;
  return (c2 / sigma2) * specfun::trigamma(1.0 + r);
}

std::vector<double> sample_stationary(const SdeSpec& spec, std::size_t n, double dt,
                                      double burn_time, double thin_time,
                                      std::uint64_t seed) {
  if (n == 0) throw std::domain_error("sample_stationary: n must be positive");
  if (!(dt > 0.0) || !(burn_time >= 0.0) || !(thin_time > 0.0)) {
    throw std::domain_error("sample_stationary: bad time parameters");
  }
  if (spec.rate() * dt > 0.5) {
    throw std::domain_error("sample_stationary: dt too coarse for the mean-reversion rate");
  }

  double x0;
  try {
    x0 = dist::mean_var(stationary_of(spec)).mean;
  } catch (const std::exception&) {
    x0 = 1.0;
  }

  Philox rng(seed);
  const double sdt = std::sqrt(dt);
  double x = x0;
  const auto advance = [&](long long steps) {
    for (long long s = 0; s < steps; ++s) {
      double next = x + spec.drift(x) * dt + spec.diffusion(x) * sdt * rng.normal();
      if (spec.positive_support() && next <= 0.0) next = x * 1e-8;
      x = next;
    }
  };

  advance(std::llround(burn_time / dt));
  const long long thin_steps = std::max<long long>(1, std::llround(thin_time / dt));
  std::vector<double> out(n);
  for (auto& v : out) {
    advance(thin_steps);
    v = x;
  }
  return out;
}

}  // namespace volfit::sde
