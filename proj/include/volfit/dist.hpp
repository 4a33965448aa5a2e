#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"
#include "volfit/rng.hpp"

namespace volfit::dist {

// Distribution family.  GIGa(alpha, beta, gamma) has density
//   gamma / (beta Gamma(alpha)) exp(-(beta/x)^gamma) (beta/x)^(1+alpha gamma)
// on x > 0, with power-law tail x^(-1-alpha gamma); GGa is its x -> 1/x dual
//   gamma / (beta Gamma(alpha)) (x/beta)^(alpha gamma - 1) exp(-(x/beta)^gamma).
// IGa and Ga are the gamma = 1 members, kept as distinct kinds.
enum class Kind { GIGa, IGa, GGa, Ga, LN, Normal, StudentT };

class DistModel {
 public:
  static DistModel giga(double alpha, double beta, double gamma);
  static DistModel iga(double alpha, double beta);
  static DistModel gga(double alpha, double beta, double gamma);
  static DistModel ga(double alpha, double beta);
  static DistModel lognormal(double mu, double sigma);
  static DistModel normal(double mu, double sigma);
  static DistModel student_t(double loc, double scale, double dof);

  Kind kind() const { return kind_; }
  std::string kind_name() const;
  bool positive_support() const;

  // Shape/scale accessors for the gamma-family kinds.
  double alpha() const { return p1_; }
  double beta() const { return p2_; }
  double gamma() const { return p3_; }
  // LN / Normal.
  double mu() const { return p1_; }
  double sigma() const { return p2_; }
  // StudentT.
  double t_loc() const { return p1_; }
  double t_scale() const { return p2_; }
  double t_dof() const { return p3_; }

  nlohmann::ordered_json to_json() const;
  static DistModel from_json(const nlohmann::ordered_json& j);

  friend bool operator==(const DistModel& a, const DistModel& b) = default;

 private:
  DistModel(Kind kind, double p1, double p2, double p3)
      : kind_(kind), p1_(p1), p2_(p2), p3_(p3) {}

  Kind kind_;
  double p1_, p2_, p3_;
};

// Density is zero (log density -inf) for x <= 0 on positive-support kinds.
double pdf(const DistModel& m, double x);
double log_pdf(const DistModel& m, double x);
double cdf(const DistModel& m, double x);

struct Moments {
  double mean;
  double variance;  // +inf when the second moment diverges
};
// Throws std::domain_error when the mean itself does not exist
// (GIGa with alpha*gamma <= 1, StudentT with dof <= 1).
Moments mean_var(const DistModel& m);

double sample_one(const DistModel& m, Philox& rng);
std::vector<double> sample(const DistModel& m, std::size_t n, std::uint64_t seed);

// Same kind rescaled so the mean equals 1; requires a finite positive mean.
DistModel scaled_to_unit_mean(const DistModel& m);

// Mode location and density height of the unit-mean IGa(alpha, alpha - 1),
// alpha > 1.  The height has a minimum near alpha = 3.48.
struct IgaModeStats {
  double mode;
  double modal_pdf;
};
IgaModeStats iga_mode_stats(double alpha);

// Lognormal(mu, sigma) viewed as the small-lambda limit of a GIGa with
//   alpha = 1/lambda^2, beta = e^mu lambda^(-2 sigma/lambda), gamma = lambda/sigma.
struct LnParams {
  double mu;
  double sigma;
  double lambda;
};
struct LnLimitPair {
  DistModel giga;
  DistModel ln;
};
LnLimitPair ln_limit_of_giga(const LnParams& p);
LnParams ln_params_of_giga(const DistModel& giga);

}  // namespace volfit::dist
