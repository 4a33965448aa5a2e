#pragma once

#include <cstdint>
#include <functional>
#include <utility>
#include <vector>

#include "json.hpp"
#include "volfit/dist.hpp"
#include "volfit/errors.hpp"

namespace volfit::sde {

// Mean-reverting diffusions whose stationary laws are the model families:
//   GigaVol          d s = J (theta s^(1-gamma) - s) dt + Sigma s dW   -> GIGa
//   VarianceIGa      d V = Jt (Vbar - V) dt + St V dW                  -> IGa
//   HestonVariance   d V = J (Vbar - V) dt + phi sqrt(V) dW            -> Ga
//   GgaVolA          d s = J (s - theta s^(1+gamma)) dt + Sigma s dW   -> GGa
//   GgaVolB          d s = J (1 - theta s^gamma) dt + Sigma sqrt(s) dW -> GGa
//   GgaVolC          d s = J (1/s - theta s^(gamma-1)) dt + Sigma dW   -> GGa
//   OuLog            d x = theta (mu - x) dt + sigma dW                -> Normal
//   LnVol            d X = theta X (mu - ln X) dt + sigma^2 X / 2 dt
//                          + sigma X dW                                -> LN
enum class Kind { GigaVol, VarianceIGa, HestonVariance, GgaVolA, GgaVolB, GgaVolC, OuLog, LnVol };

struct SdeSpec {
  Kind kind = Kind::GigaVol;
  double J = 0.0, theta = 0.0, Sigma = 0.0, gamma = 0.0;  // vol-form kinds
  double J_tilde = 0.0, Sigma_tilde = 0.0, V_bar = 0.0, phi = 0.0;  // variance-form
  double ou_theta = 0.0, ou_mu = 0.0, ou_sigma = 0.0;  // OuLog / LnVol

  // Noise amplitudes may be zero (deterministic limit); rates and scales must
  // be positive.
  static SdeSpec giga_vol(double J, double theta, double Sigma, double gamma);
  static SdeSpec variance_iga(double J_tilde, double Sigma_tilde, double V_bar);
  static SdeSpec heston(double J, double V_bar, double phi);
  static SdeSpec gga_vol_a(double J, double theta, double Sigma, double gamma);
  static SdeSpec gga_vol_b(double J, double theta, double Sigma, double gamma);
  static SdeSpec gga_vol_c(double J, double theta, double Sigma, double gamma);
  static SdeSpec ou_log(double theta, double mu, double sigma);
  static SdeSpec ln_vol(double theta, double mu, double sigma);

  double drift(double x) const;
  double diffusion(double x) const;
  bool positive_support() const;
  double rate() const;  // mean-reversion rate (J, J_tilde, or theta)
  std::string kind_name() const;
};

struct SimConfig {
  double dt = 0.01;
  long long steps = 1000;
  double x0 = 1.0;
  std::uint64_t seed = 1;
};

// Euler-Maruyama path, length steps + 1 with path[0] = x0.  Positive-support
// kinds are floored at a small multiple of the pre-step value when a step
// proposal crosses zero.  Requires rate() * dt <= 0.5.
std::vector<double> simulate(const SdeSpec& spec, const SimConfig& cfg);

// Closed-form stationary law; requires a nonzero noise amplitude (and for
// GgaVolA the normalizability condition 2J/Sigma^2 > 1).
dist::DistModel stationary_of(const SdeSpec& spec);

// GigaVol theta giving a prescribed stationary mean:
//   theta = (gamma Sigma^2 / 2J) [mean Gamma(a) / Gamma(a - 1/gamma)]^gamma,
// a = (1 + 2J/Sigma^2)/gamma.  Reduces to theta = mean at gamma = 1.
double theta_from_mean(double mean_sigma, double J, double Sigma, double gamma);

// Ito map from the IGa variance process to the GigaVol form in sigma = sqrt(V):
// J = Jt/2 + St^2/8, theta = Vbar (Jt/2) / J, Sigma = St/2, gamma = 2.
struct VolParams {
  double J, theta, Sigma, gamma;
};
VolParams variance_to_vol_params(double J_tilde, double Sigma_tilde, double V_bar);

// E[sqrt(V)] under the stationary IGa law of the variance process:
// sqrt(Vbar r) Gamma(r + 1/2) / Gamma(r + 1), r = 2 Jt / St^2.
double mean_sigma_from_variance(double J_tilde, double Sigma_tilde, double V_bar);

// Stationary density P(x) ~ (1/g^2) exp(int 2 f / g^2) evaluated on a grid by
// cumulative trapezoid integration, normalized to unit mass on the grid.
std::vector<double> fp_stationary_pdf(const std::function<double(double)>& drift,
                                      const std::function<double(double)>& diffusion,
                                      const std::vector<double>& grid);

// Relaxation toward the unit-mean IGa steady state of
// d x = J (1 - x) dt + Sigma x dW: an ensemble is advanced from x0 (or from
// stationary draws) and the first ensemble-vs-stationary KS check with
// p > p_threshold defines the relaxation time.
struct RelaxConfig {
  int n_paths = 5000;
  double dt = 0.01;
  double x0 = 1.0;
  bool stationary_start = false;
  double p_threshold = 0.1;
  double check_interval = 0.0;  // 0 -> 0.05 / J
  double max_time = 0.0;        // 0 -> 40x the analytic mean estimate
  std::uint64_t seed = 20260819;
};

struct RelaxResult {
  double relax_time = 0.0;
  std::vector<std::pair<double, double>> trace;  // (t, KS p-value)
  int n_paths = 0;
  double dt = 0.0;
  nlohmann::ordered_json to_json() const;
};

class RelaxHorizonError : public NumericalError {
 public:
  RelaxHorizonError(const std::string& what, RelaxResult partial)
      : NumericalError(what), partial_(std::move(partial)) {}
  const RelaxResult& partial() const { return partial_; }

 private:
  RelaxResult partial_;
};

RelaxResult relaxation_experiment(double J, double Sigma, const RelaxConfig& cfg = {});

// Analytic estimates for the same experiment, with r = 2J/sigma2:
// mean ~ (2 c1 / sigma2)(ln r - digamma(r)), run-to-run spread
// ~ (c2 / sigma2) trigamma(1 + r).
double relax_mean_estimate(double J, double sigma2, double c1 = 1.0);
double relax_stdev_estimate(double J, double sigma2, double c2 = 0.25);

// Streamed draws from the (near-)stationary law: burn_time of warm-up from
// the stationary mean, then one draw every thin_time.
std::vector<double> sample_stationary(const SdeSpec& spec, std::size_t n, double dt,
                                      double burn_time, double thin_time,
                                      std::uint64_t seed);

}  // namespace volfit::sde
