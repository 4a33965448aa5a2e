#pragma once

#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"
#include "volfit/dist.hpp"
#include "volfit/product.hpp"

namespace volfit::fit {

struct SimplexConfig {
  int max_iterations = 1000;
  double x_tol = 1e-6;
  double f_tol = 1e-9;
  double initial_step = 0.25;
};

struct NmResult {
  std::vector<double> x;
  double fmin = 0.0;
  int iterations = 0;
  bool converged = false;
};

// Nelder-Mead minimizer (reflection 1, expansion 2, contraction 0.5,
// shrink 0.5).  The objective must be finite at x0; non-finite values
// elsewhere are treated as a large penalty.
NmResult nelder_mead(const std::function<double(const std::vector<double>&)>& objective,
                     const std::vector<double>& x0, const SimplexConfig& cfg = {});

// Root of f on [lo, hi]; requires a sign change across the bracket.
double bisection(const std::function<double(double)>& f, double lo, double hi,
                 double tol = 1e-12);

struct FitResult {
  dist::DistModel model;  // the base model when product is true
  bool product = false;   // model describes z = x * n with n ~ N(0,1)
  double mean_loglik = 0.0;
  int iterations = 0;
  bool converged = false;
  std::optional<double> rel_loglik;  // mean_loglik minus a report baseline

  std::string family_label() const;  // e.g. "GIGa" or "GIGa*N"
  nlohmann::ordered_json to_json() const;
  static FitResult from_json(const nlohmann::ordered_json& j);
  friend bool operator==(const FitResult& a, const FitResult& b) = default;
};

double mean_loglik(const dist::DistModel& m, std::span<const double> xs);
double mean_loglik(const product::ProductModel& pm, std::span<const double> xs,
                   const product::QuadratureConfig& cfg = {});

// Exact lognormal MLE.  n >= 2, all xs > 0, non-degenerate.
FitResult fit_ln(std::span<const double> xs);

// Profile-likelihood search for the GGa/GIGa family: for each gamma the
// stationarity conditions give alpha and beta in closed form, leaving a
// one-dimensional root problem in gamma.  Negative-gamma roots are the GIGa
// branch (reported with gamma = |gamma|), positive roots the GGa branch; the
// window around zero is excluded because gamma -> 0 is the degenerate
// lognormal limit.  Among all roots the one with the best mean log-likelihood
// wins.  n >= 8.
struct GammaRange {
  double neg_lo = -8.0;
  double neg_hi = -0.05;
  double pos_lo = 0.05;
  double pos_hi = 8.0;
  int scan_points = 65;  // per half-interval
};
FitResult fit_gga_giga(std::span<const double> xs, const GammaRange& range = {},
                       double tol = 1e-10);

// Same family with gamma pinned (inverse = GIGa branch): only the shape
// equation ln(alpha) - digamma(alpha) = c remains, solved by bisection.
// gamma = 1 reports the Ga / IGa kind.  n >= 4.
FitResult fit_fixed_gamma(std::span<const double> xs, double gamma, bool inverse);

// Maximum likelihood for z = x * n product models by Nelder-Mead over log
// parameters, with the density evaluated by quadrature.  base_kind selects
// the family of x; fix_gamma pins gamma for GIGa/GGa bases.  extra_starts
// supplies additional starting points in the internal parameterization
// (ln alpha, ln beta[, ln gamma]) or (mu, ln sigma); each is given a full
// Nelder-Mead run and the best optimum wins.  n >= 10.
FitResult fit_product(std::span<const double> zs, dist::Kind base_kind,
                      std::optional<double> fix_gamma = std::nullopt,
                      const SimplexConfig& cfg = {},
                      const std::vector<std::vector<double>>& extra_starts = {});

// Student-t special case fitted through its closed-form density; returns the
// equivalent GIGa(alpha, beta, 2) product model, so the optimum is directly
// comparable with fit_product(..., GIGa, fix_gamma = 2).
FitResult fit_student_direct(std::span<const double> zs, const SimplexConfig& cfg = {});

// Log returns of a level series, centered and scaled to unit sample variance.
struct PreprocessedReturns {
  std::vector<double> z;
  double mean_log_return = 0.0;
  double stdev_log_return = 0.0;
};
PreprocessedReturns preprocess_returns(std::span<const double> levels);

}  // namespace volfit::fit
