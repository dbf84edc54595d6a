#pragma once
// Empirical machinery for weakly singular integral operators: sampled
// estimation of the kernel constant kappa (diagonal blow-up rate plus
// off-diagonal Hoelder control), the triangle integration-by-parts
// transform check, and the constructive extension of a kernel from the
// unit square to the plane.

#include <cmath>
#include <functional>
#include <vector>

#include "driftlab/common.hpp"
#include "driftlab/grids.hpp"

namespace driftlab {

using KernelFn = std::function<double(double, double)>;

// kappa-hat = max over sampled configurations of
//   |L(x,y)| |x-y|^{1/2},
//   |L(x,y)-L(x',y)| |x-y|^{1/2+delta} / |x-x'|^delta   (|x-x'| <= |x-y|/2),
// and the y-symmetric third ratio. One sequential random stream: runs with
// the same seed and a larger sample count extend the same configuration
// sequence, so the estimate is monotone in the count. Draws that violate an
// admissibility constraint are discarded without evaluating L.
inline double estimate_wsio_kappa(const KernelFn& L, double delta, int samples,
                                  std::uint64_t seed) {
  require(delta > 0.5 && delta <= 1.0, "estimate_wsio_kappa: delta in (1/2, 1]");
  require(samples >= 1, "estimate_wsio_kappa: samples >= 1");
  Rng rng(seed);
  double kappa = 0.0;
  for (int k = 0; k < samples; ++k) {
    const double x = rng.uniform();
    const double y = rng.uniform();
    const double gap = std::fabs(x - y);
    if (gap < 1e-9) continue;  // diagonal draw, no admissible ratio
    const double root_gap = std::sqrt(gap);
    const double lxy = L(x, y);
    kappa = std::max(kappa, std::fabs(lxy) * root_gap);

    const double hoelder_weight = std::pow(gap, 0.5 + delta);
    const double xp = x + rng.uniform(-0.5, 0.5) * gap;
    if (xp >= 0.0 && xp <= 1.0 && xp != x && std::fabs(xp - y) > 1e-12) {
      const double r = std::fabs(lxy - L(xp, y)) * hoelder_weight /
                       std::pow(std::fabs(x - xp), delta);
      kappa = std::max(kappa, r);
    }
    const double yp = y + rng.uniform(-0.5, 0.5) * gap;
    if (yp >= 0.0 && yp <= 1.0 && yp != y && std::fabs(x - yp) > 1e-12) {
      const double r = std::fabs(lxy - L(x, yp)) * hoelder_weight /
                       std::pow(std::fabs(y - yp), delta);
      kappa = std::max(kappa, r);
    }
  }
  return kappa;
}

struct IbpTransform {
  double direct = 0.0;
  double transformed = 0.0;
  double trace_term = 0.0;  // the diagonal (d1L - d2L) part of transformed
};

// Over the triangle x < y, compare int int L u u against the transported
// form int int d12L U U + (1/2) int (d1L - d2L)(s,s) U^2. Derivatives are
// centered differences taken inside the triangle; the near-diagonal trace
// term is evaluated at two offsets and Richardson-extrapolated to the
// diagonal. The kernel must vanish on the y = 1 edge for the transform to
// hold; that is checked first and reported as its own failure.
inline IbpTransform ibp_transform_check(const KernelFn& L, const Control& u) {
  const int m = u.cells();
  require(m >= 4, "ibp_transform_check: need at least 4 cells");
  require(u.T == 1.0, "ibp_transform_check: unit horizon required");
  double edge = 0.0;
  for (int i = 0; i < m; ++i) edge = std::max(edge, std::fabs(L(u.node(i), 1.0)));
  if (edge > 1e-10)
    throw std::invalid_argument("ibp_transform_check: kernel does not vanish at y = 1");

  const double h = u.h();
  const std::vector<double> up = u.primitive();
  IbpTransform out;

  for (int i = 0; i < m; ++i) {
    const double x = u.node(i);
    // diagonal cells meet the triangle in half a cell
    out.direct += 0.5 * h * h * L(x, x) * u.u[i] * u.u[i];
    for (int j = i + 1; j < m; ++j) {
      const double y = u.node(j);
      out.direct += h * h * L(x, y) * u.u[i] * u.u[j];

      const double d = std::min(1e-3, (y - x) / 8.0);
      const double d12 = (L(x + d, y + d) - L(x + d, y - d) - L(x - d, y + d) + L(x - d, y - d)) /
                         (4.0 * d * d);
      out.transformed += h * h * d12 * up[i] * up[j];
    }
  }

  // mixed derivative on the diagonal half-cells, from points strictly inside
  for (int i = 0; i < m; ++i) {
    const double s = u.node(i);
    const double g = h / 4.0;
    const double d = g / 2.0;
    const double x = s - g, y = s + g;
    const double d12 = (L(x + d, y + d) - L(x + d, y - d) - L(x - d, y + d) + L(x - d, y - d)) /
                       (4.0 * d * d);
    out.transformed += 0.5 * h * h * d12 * up[i] * up[i];
  }

  // trace term: (d1L - d2L) at (s - g, s + g) is linear in g to leading
  // order, so two offsets extrapolate to the diagonal value
  auto trace_at = [&L](double s, double g) {
    const double d = g / 2.0;
    const double x = s - g, y = s + g;
    const double d1 = (L(x + d, y) - L(x - d, y)) / (2.0 * d);
    const double d2 = (L(x, y + d) - L(x, y - d)) / (2.0 * d);
    return d1 - d2;
  };
  for (int i = 0; i < m; ++i) {
    const double s = u.node(i);
    const double g = std::min(1e-3, h / 4.0);
    const double tr = 2.0 * trace_at(s, g / 2.0) - trace_at(s, g);
    out.trace_term += 0.5 * h * tr * up[i] * up[i];
  }
  out.transformed += out.trace_term;
  return out;
}

// Extension of a kernel from the unit square to the whole plane minus the
// diagonal: unchanged inside, constant along diagonals in the surrounding
// strip 0 < |y-x| < 1, and decaying like the corner values times
// |x-y|^{-1+s} beyond the strip. Continuous across every seam.
inline KernelFn extend_kernel(const KernelFn& K, double s = 0.5) {
  require(s > 0 && s < 1, "extend_kernel: order s in (0,1)");
  const double upper = K(0.0, 1.0);
  const double lower = K(1.0, 0.0);
  return [K, s, upper, lower](double x, double y) -> double {
    const double gap = y - x;
    if (x >= 0.0 && x <= 1.0 && y >= 0.0 && y <= 1.0) return K(x, y);
    if (gap >= 1.0) return upper * std::pow(gap, -1.0 + s);
    if (gap <= -1.0) return lower * std::pow(-gap, -1.0 + s);
    if (gap > 0.0) {
      if (y >= 1.0) return K(1.0 + x - y, 1.0);
      return K(0.0, gap);  // here x <= 0
    }
    if (x >= 1.0) return K(1.0, 1.0 + y - x);
    return K(-gap, 0.0);  // here y <= 0
  };
}

}  // namespace driftlab
