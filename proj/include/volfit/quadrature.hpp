#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

namespace volfit::quad {

struct QuadResult {
  double value = 0.0;
  double abs_error = 0.0;
  int subdivisions = 0;
  bool converged = false;
};

namespace detail {

// 15-point Kronrod nodes on [0,1] side (symmetric) with Kronrod and embedded
// 7-point Gauss weights.
inline constexpr double kXgk[8] = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144838258730, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
inline constexpr double kWgk[8] = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
inline constexpr double kWg[4] = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

template <typename F>
void gk15(const F& f, double a, double b, double& value, double& error) {
  const double c = 0.5 * (a + b);
  const double h = 0.5 * (b - a);
  double fv[15];
  for (int i = 0; i < 7; ++i) {
    fv[i] = f(c - h * kXgk[i]);
    fv[14 - i] = f(c + h * kXgk[i]);
  }
  fv[7] = f(c);
  double res_k = 0.0, res_g = 0.0;
  for (int i = 0; i < 7; ++i) {
    res_k += kWgk[i] * (fv[i] + fv[14 - i]);
    if (i % 2 == 1) res_g += kWg[i / 2] * (fv[i] + fv[14 - i]);
  }
  res_k += kWgk[7] * fv[7];
  res_g += kWg[3] * fv[7];
  value = res_k * h;
  error = std::fabs((res_k - res_g) * h);
}

struct Segment {
  double a, b, value, error;
};

}  // namespace detail

// Globally adaptive Gauss-Kronrod integration: repeatedly bisect the segment
// with the largest error estimate.  Never throws on non-convergence; the
// caller decides what a false `converged` means.
template <typename F>
QuadResult gk_adaptive(const F& f, double a, double b, double rel_tol, double abs_tol,
                       int max_subdivisions) {
  std::vector<detail::Segment> segs;
  segs.reserve(static_cast<std::size_t>(max_subdivisions) + 1);
  detail::Segment s{a, b, 0.0, 0.0};
  detail::gk15(f, a, b, s.value, s.error);
  segs.push_back(s);

  QuadResult out;
  for (int n = 0; n < max_subdivisions; ++n) {
    double total = 0.0, err = 0.0;
    for (const auto& sg : segs) {
      total += sg.value;
      err += sg.error;
    }
    out.value = total;
    out.abs_error = err;
    out.subdivisions = n;
    if (err <= std::max(abs_tol, rel_tol * std::fabs(total))) {
      out.converged = true;
      return out;
    }
    auto worst = std::max_element(
        segs.begin(), segs.end(),
        [](const detail::Segment& u, const detail::Segment& v) { return u.error < v.error; });
    const double mid = 0.5 * (worst->a + worst->b);
    detail::Segment left{worst->a, mid, 0.0, 0.0};
    detail::Segment right{mid, worst->b, 0.0, 0.0};
    detail::gk15(f, left.a, left.b, left.value, left.error);
    detail::gk15(f, right.a, right.b, right.value, right.error);
    *worst = left;
    segs.push_back(right);
  }
  double total = 0.0, err = 0.0;
  for (const auto& sg : segs) {
    total += sg.value;
    err += sg.error;
  }
  out.value = total;
  out.abs_error = err;
  out.subdivisions = max_subdivisions;
  out.converged = err <= std::max(abs_tol, rel_tol * std::fabs(total));
  return out;
}

}  // namespace volfit::quad
