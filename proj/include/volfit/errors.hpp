#pragma once

#include <limits>
#include <stdexcept>
#include <string>

namespace volfit {

// Malformed or out-of-contract input: bad CSV rows, non-positive samples where
// positivity is required, series too short, degenerate (constant) data.
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// An iterative numerical procedure failed: quadrature did not reach tolerance
// within its subdivision budget, a root was not bracketed, a horizon was hit.
// achieved() reports the tolerance actually reached when that is meaningful.
class NumericalError : public std::runtime_error {
 public:
  explicit NumericalError(const std::string& what,
                          double achieved = std::numeric_limits<double>::quiet_NaN())
      : std::runtime_error(what), achieved_(achieved) {}
  double achieved() const { return achieved_; }

 private:
  double achieved_;
};

}  // namespace volfit
