#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "volfit/dist.hpp"

namespace volfit::product {

struct QuadratureConfig {
  double rel_tol = 1e-8;
  double abs_tol = 1e-12;
  int max_subdivisions = 200;
};

// Law of z = x * n where x follows a positive-support base model and n is an
// independent standard normal:  p(z) = int_0^inf (1/x) f(x) phi(z/x) dx.
// Symmetric in z; the tail inherits the base's power law when it has one.
class ProductModel {
 public:
  explicit ProductModel(dist::DistModel base);
  const dist::DistModel& base() const { return base_; }

  friend bool operator==(const ProductModel& a, const ProductModel& b) = default;

 private:
  dist::DistModel base_;
};

double product_log_pdf(const ProductModel& pm, double z, const QuadratureConfig& cfg = {});
double product_pdf(const ProductModel& pm, double z, const QuadratureConfig& cfg = {});
double product_cdf(const ProductModel& pm, double z, const QuadratureConfig& cfg = {});

// Closed form for the GIGa(alpha, beta, 2) base: the product is a generalized
// Student t with 2*alpha degrees of freedom and scale beta/sqrt(alpha).
double student_t_log_pdf(double alpha, double beta, double z);
double student_t_pdf(double alpha, double beta, double z);

// Var(z) = E[x^2]; +inf for a GIGa base with alpha*gamma <= 2.
double product_variance(const ProductModel& pm);

// Tail index k in p(z) ~ |z|^(-1-k): alpha*gamma for GIGa bases, absent for
// bases whose product has no power-law tail.
std::optional<double> product_tail_exponent(const ProductModel& pm);

std::vector<double> sample(const ProductModel& pm, std::size_t n, std::uint64_t seed);

}  // namespace volfit::product
