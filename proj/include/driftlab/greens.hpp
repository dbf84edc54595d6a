#pragma once
// The elementary heat solution G on (0,1) with unit initial data and
// Dirichlet walls, in two representations:
//
//   sine series   G(t,x) = sum_{n odd} (4/(n pi)) e^{-eps n^2 pi^2 t} sin(n pi x)
//   image charges G(t,x) = sum_{j in Z} (-1)^j erf((x-j)/sqrt(4 eps t))
//
// The series converges fast for large eps*t, the images for small eps*t
// (Gibbs-free). Crossover at eps*t = 0.02: there the images need 5 pairs and
// the series 8 odd modes, both at full double accuracy, so the two branches
// can be cross-checked right at the switch.
//
// Near the left wall G is approximated by the boundary layer erf(x/sqrt(4
// eps t)); the remainder H = G - erf is transparent to differentiation and
// exponentially small in 1/eps away from t = 0 (its driving trace is
// sigma(eps t) below).

#include <cmath>
#include <vector>

#include "driftlab/common.hpp"

namespace driftlab {

inline double erf_layer(double eps, double t, double x) {
  require(eps > 0 && t > 0, "erf_layer: eps > 0 and t > 0 required");
  return std::erf(x / std::sqrt(4.0 * eps * t));
}

// Trace term -1/sqrt(s pi) * exp(-1/(16 s)) balancing the erf layer's
// normal derivative at x = 1/2.
inline double sigma_trace(double s) {
  require(s > 0, "sigma_trace: s > 0 required");
  return -std::exp(-1.0 / (16.0 * s)) / std::sqrt(s * kPi);
}

namespace detail {

inline constexpr double kGreensCrossover = 0.02;  // in units of eps*t

// Image-charge value; 5 reflection pairs bound the truncation error by
// erfc(9/sqrt(4*0.02)) ~ 1e-180 throughout the branch's domain of use.
inline double greens_images(double x, double s) {
  double g = std::erf(x / s);
  double sign = -1.0;
  for (int m = 1; m <= 5; ++m) {
    g += sign * (std::erf((x - m) / s) + std::erf((x + m) / s));
    sign = -sign;
  }
  return g;
}

// Number of odd series terms needed for a 1e-15 absolute tail at this eps*t.
inline int greens_series_modes(double et) {
  double nmax = std::ceil(1.88 / std::sqrt(et));
  if (nmax < 1) nmax = 1;
  if (nmax > 4001) nmax = 4001;
  return static_cast<int>(nmax);
}

inline double greens_series(double x, double et, int nmax) {
  double g = 0.0;
  for (int n = 1; n <= nmax; n += 2) {
    const double amp = (4.0 / (n * kPi)) * std::exp(-et * n * n * kPi * kPi);
    g += amp * std::sin(n * kPi * x);
    if (amp < 1e-16) break;
  }
  return g;
}

}  // namespace detail

inline double elementary_G(double eps, double t, double x) {
  require(eps > 0, "elementary_G: eps > 0 required");
  require(t > 0, "elementary_G: t <= 0 rejected");
  require(x >= 0.0 && x <= 1.0, "elementary_G: x in [0,1]");
  const double et = eps * t;
  if (et < detail::kGreensCrossover)
    return detail::greens_images(x, std::sqrt(4.0 * et));
  return detail::greens_series(x, et, detail::greens_series_modes(et));
}

// Force one representation; used by the agreement tests.
inline double elementary_G_series(double eps, double t, double x) {
  require(eps > 0 && t > 0, "elementary_G_series: eps, t > 0");
  const double et = eps * t;
  return detail::greens_series(x, et, detail::greens_series_modes(et));
}
inline double elementary_G_images(double eps, double t, double x) {
  require(eps > 0 && t > 0, "elementary_G_images: eps, t > 0");
  return detail::greens_images(x, std::sqrt(4.0 * eps * t));
}

// Row evaluation G(dt, x_j) for a whole x-grid at once, with the convention
// G(0, .) = 1 on the open interval (the initial data). This is the hot path
// of kernel assembly; the series branch hoists the mode amplitudes out of
// the x loop.
inline void elementary_G_row(double eps, double dt, const std::vector<double>& xs,
                             std::vector<double>& out) {
  out.resize(xs.size());
  if (dt == 0.0) {
    for (std::size_t j = 0; j < xs.size(); ++j) out[j] = 1.0;
    return;
  }
  require(dt > 0, "elementary_G_row: negative elapsed time");
  const double et = eps * dt;
  if (et < detail::kGreensCrossover) {
    const double s = std::sqrt(4.0 * et);
    for (std::size_t j = 0; j < xs.size(); ++j) out[j] = detail::greens_images(xs[j], s);
    return;
  }
  const int nmax = detail::greens_series_modes(et);
  double amps[32];
  int terms = 0;
  for (int n = 1; n <= nmax && terms < 32; n += 2) {
    amps[terms] = (4.0 / (n * kPi)) * std::exp(-et * n * n * kPi * kPi);
    ++terms;
    if (amps[terms - 1] < 1e-16) break;
  }
  for (std::size_t j = 0; j < xs.size(); ++j) {
    double g = 0.0;
    for (int q = 0; q < terms; ++q) g += amps[q] * std::sin((2 * q + 1) * kPi * xs[j]);
    out[j] = g;
  }
}

// H = G - erf layer on (0, 1/2]; computed by subtraction, which makes the
// generator-sum identity exact in floating point.
inline double corrector_H(double eps, double t, double x) {
  require(x > 0.0 && x <= 0.5, "corrector_H: x in (0, 1/2] required");
  return elementary_G(eps, t, x) - erf_layer(eps, t, x);
}

}  // namespace driftlab
