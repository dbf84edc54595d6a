// Elementary heat response to unit initial data with pinned ends: the
// odd-sine series and the image/erf representation must agree where their
// validity windows overlap, and the boundary-layer split must behave.

#include <cmath>
#include <vector>

#include <gtest/gtest.h>

#include "driftlab/common.hpp"
#include "driftlab/greens.hpp"

using namespace driftlab;

TEST(greens, representations_agree_across_the_crossover) {
  // both sums are spectrally converged for eps*t near the switch value
  double worst = 0.0;
  for (double et : {0.015, 0.02, 0.025, 0.04}) {
    const double eps = 0.05, t = et / eps;
    for (int i = 0; i <= 50; ++i) {
      const double x = i / 50.0;
      worst = std::max(worst, std::fabs(elementary_G_series(eps, t, x) -
                                        elementary_G_images(eps, t, x)));
    }
  }
  EXPECT_LE(worst, 1e-10);
}

TEST(greens, boundary_and_range) {
  Rng rng(77);
  for (int k = 0; k < 60; ++k) {
    const double eps = rng.uniform(1e-3, 0.2);
    const double t = rng.uniform(0.01, 1.0);
    const double x = rng.uniform(0.0, 1.0);
    const double g = elementary_G(eps, t, x);
    EXPECT_GE(g, -1e-12);
    EXPECT_LE(g, 1.0 + 1e-12);
  }
  EXPECT_NEAR(elementary_G(0.05, 0.5, 0.0), 0.0, 1e-14);
  EXPECT_NEAR(elementary_G(0.05, 0.5, 1.0), 0.0, 1e-12);
  EXPECT_NEAR(elementary_G(1e-3, 0.1, 0.0), 0.0, 1e-14);
}

TEST(greens, series_mode_count_is_conservative) {
  // tail of the retained series stays below 1e-14 at the cutoff
  for (double et : {0.02, 0.1, 0.5}) {
    const int nmax = detail::greens_series_modes(et);
    const double tail_exponent = et * kPi * kPi * nmax * nmax;
    EXPECT_GE(tail_exponent, 30.0) << et;
  }
}

TEST(greens, row_fill_at_zero_time_offset) {
  std::vector<double> xs = {0.1, 0.4, 0.9};
  std::vector<double> out;
  elementary_G_row(0.05, 0.0, xs, out);
  ASSERT_EQ(out.size(), xs.size());
  for (double v : out) EXPECT_EQ(v, 1.0);
  elementary_G_row(0.05, 0.3, xs, out);
  for (std::size_t i = 0; i < xs.size(); ++i)
    EXPECT_NEAR(out[i], elementary_G(0.05, 0.3, xs[i]), 1e-13);
}

TEST(greens, corrector_is_tiny_away_from_the_layer) {
  // for small eps the response is the erf layer up to image terms that decay
  // like erfc(distance-to-the-far-wall / sqrt(4 eps t))
  for (double x : {0.2, 0.35, 0.5}) {
    EXPECT_LE(std::fabs(corrector_H(1e-3, 0.5, x)), 1e-12) << x;
    EXPECT_LE(std::fabs(corrector_H(1e-2, 0.25, x)), 1e-5) << x;
  }
}

TEST(greens, trace_factor_values) {
  EXPECT_NEAR(sigma_trace(0.01), -0.010891421152, 1e-10);
  for (double s : {0.005, 0.04, 0.3}) {
    EXPECT_NEAR(sigma_trace(s), -std::exp(-1.0 / (16.0 * s)) / std::sqrt(s * kPi),
                1e-15);
    EXPECT_LT(sigma_trace(s), 0.0);
  }
}

TEST(greens, erf_layer_is_the_half_space_solution) {
  EXPECT_NEAR(erf_layer(0.01, 0.25, 0.1), std::erf(0.1 / 0.1), 1e-15);
  EXPECT_NEAR(erf_layer(0.04, 1.0, 0.0), 0.0, 0.0);
}
