#pragma once
// The drift profile rho(x) = x^5/5 - x^4/2 + x^3/3 - x/30 and its sine-basis
// data. rho is odd about x = 1/2 with rho_xx(0) = rho_xx(1) = 0, which is
// what makes the boundary-layer expansion of the kernel clean.

#include <cmath>

#include "driftlab/common.hpp"

namespace driftlab {

// order 0, 1, 2 -> rho, rho_x, rho_xx.
inline double rho_eval(double x, int order = 0) {
  switch (order) {
    case 0:
      return x * x * x * x * x / 5.0 - x * x * x * x / 2.0 + x * x * x / 3.0 - x / 30.0;
    case 1:
      return x * x * x * x - 2.0 * x * x * x + x * x - 1.0 / 30.0;
    case 2:
      return 2.0 * x * (x - 1.0) * (2.0 * x - 1.0);
    default:
      throw std::invalid_argument("rho_eval: order must be 0, 1 or 2");
  }
}

// Coefficients against e_n(x) = sqrt(2) sin(n pi x).
//
// <rho, e_n>: integrate by parts four times; the boundary terms vanish
// because rho and rho_xx are zero at both ends, leaving
//   <rho, e_n> = <rho_xxxx, e_n>/(n pi)^4 with rho_xxxx = 24x - 12,
// and <24x-12, e_n> = -24 sqrt(2) ((-1)^n + 1)/(n pi). Odd-about-1/2
// functions only load even-index modes, consistently with the parity of rho.
inline double rho_coeff(int n) {
  if (n % 2 != 0) return 0.0;
  const double npi = n * kPi;
  return -24.0 * kSqrt2 / (npi * npi * npi * npi * npi);
}

// <rho_xx, e_n> = -(n pi)^2 <rho, e_n> (two integrations by parts, boundary
// terms vanish since rho_xx(0) = rho_xx(1) = 0): zero for odd n,
// 24 sqrt(2)/(n pi)^3 for even n. For n = 2 this is 3 sqrt(2)/pi^3.
inline double rho_xx_coeff(int n) {
  if (n % 2 != 0) return 0.0;
  const double npi = n * kPi;
  return 24.0 * kSqrt2 / (npi * npi * npi);
}

}  // namespace driftlab
