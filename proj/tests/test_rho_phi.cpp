// The drift profile rho, its sine data, and the heat evolution started
// from it. Coefficients are pitted against direct quadrature.

#include <cmath>
#include <vector>

#include <gtest/gtest.h>

#include "driftlab/common.hpp"
#include "driftlab/grids.hpp"
#include "driftlab/phi.hpp"
#include "driftlab/rho.hpp"

using namespace driftlab;

namespace {

double quad_against_sine(int order, int n) {
  // simpson of rho^(order)(x) * sqrt(2) sin(n pi x)
  const int cells = 1 << 12;
  const double h = 1.0 / cells;
  std::vector<double> f(cells + 1);
  for (int i = 0; i <= cells; ++i) {
    const double x = i * h;
    f[i] = rho_eval(x, order) * kSqrt2 * std::sin(n * kPi * x);
  }
  return simpson(f, h);
}

}  // namespace

TEST(rho, polynomial_values_and_ends) {
  Rng rng(5);
  for (int k = 0; k < 20; ++k) {
    const double x = rng.uniform(0.0, 1.0);
    const double direct =
        std::pow(x, 5) / 5.0 - std::pow(x, 4) / 2.0 + std::pow(x, 3) / 3.0 - x / 30.0;
    EXPECT_NEAR(rho_eval(x, 0), direct, 1e-16);
  }
  EXPECT_EQ(rho_eval(0.0, 0), 0.0);
  EXPECT_NEAR(rho_eval(1.0, 0), 0.0, 1e-17);
  EXPECT_NEAR(rho_eval(0.0, 1), -1.0 / 30.0, 1e-17);
  EXPECT_NEAR(rho_eval(1.0, 1), -1.0 / 30.0, 1e-16);
}

TEST(rho, derivatives_against_finite_differences) {
  const double h = 1e-6;
  for (double x : {0.15, 0.33, 0.5, 0.78}) {
    const double fd1 = (rho_eval(x + h, 0) - rho_eval(x - h, 0)) / (2.0 * h);
    const double fd2 = (rho_eval(x + h, 1) - rho_eval(x - h, 1)) / (2.0 * h);
    EXPECT_NEAR(rho_eval(x, 1), fd1, 1e-10);
    EXPECT_NEAR(rho_eval(x, 2), fd2, 1e-9);
  }
  // curvature factors as 2x(1-x)(1-2x)
  for (double x : {0.1, 0.25, 0.6}) {
    EXPECT_NEAR(rho_eval(x, 2), 2.0 * x * (1.0 - x) * (1.0 - 2.0 * x), 1e-15);
  }
}

TEST(rho, odd_about_the_midpoint) {
  for (double x : {0.05, 0.2, 0.45}) {
    EXPECT_NEAR(rho_eval(1.0 - x, 0), -rho_eval(x, 0), 1e-15);
  }
  EXPECT_NEAR(rho_eval(0.5, 0), 0.0, 1e-17);
}

TEST(rho, sine_coefficients_against_quadrature) {
  for (int n = 1; n <= 6; ++n) {
    EXPECT_NEAR(rho_coeff(n), quad_against_sine(0, n), 1e-12) << "mode " << n;
    EXPECT_NEAR(rho_xx_coeff(n), quad_against_sine(2, n), 1e-11) << "mode " << n;
  }
  const double c2 = -24.0 * kSqrt2 / std::pow(2.0 * kPi, 5);
  EXPECT_NEAR(rho_coeff(2), c2, 1e-18);
  EXPECT_EQ(rho_coeff(3), 0.0);
  EXPECT_NEAR(rho_xx_coeff(2), 24.0 * kSqrt2 / std::pow(2.0 * kPi, 3), 1e-16);
}

TEST(rho, l2_norm_squared_two_ways) {
  double series = 0.0;
  for (int n = 2; n <= 200; n += 2) series += rho_coeff(n) * rho_coeff(n);
  EXPECT_NEAR(series, kRhoL2Sq, 1e-17);
  const int cells = 1 << 12;
  const double h = 1.0 / cells;
  std::vector<double> f(cells + 1);
  for (int i = 0; i <= cells; ++i) f[i] = std::pow(rho_eval(i * h, 0), 2);
  EXPECT_NEAR(simpson(f, h), kRhoL2Sq, 1e-17);
  EXPECT_NEAR(kRhoL2Sq, 1.0 / 83160.0, 0.0);
}

TEST(phi, table_at_zero_is_the_drift_slope) {
  std::vector<double> xs(101);
  for (int i = 0; i <= 100; ++i) xs[i] = i / 100.0;
  PhiXTable tab(0.02, xs);
  std::vector<double> row;
  tab.eval(0.0, row);
  for (int i = 0; i <= 100; ++i)
    EXPECT_NEAR(row[i], rho_eval(xs[i], 1), 1e-12) << xs[i];
}

TEST(phi, table_series_limit_is_continuous) {
  std::vector<double> xs = {0.0, 0.13, 0.5, 0.77, 1.0};
  PhiXTable tab(0.02, xs);
  std::vector<double> at_zero, nearby;
  tab.eval(0.0, at_zero);
  tab.eval(1e-9, nearby);
  for (std::size_t i = 0; i < xs.size(); ++i)
    EXPECT_NEAR(at_zero[i], nearby[i], 1e-7);
}

TEST(phi, slope_bound_holds_under_evolution) {
  // |Phi_x| starts at 1/30 on the walls and only decays
  std::vector<double> xs(41);
  for (int i = 0; i <= 40; ++i) xs[i] = i / 40.0;
  PhiXTable tab(0.1, xs);
  std::vector<double> row;
  for (double tau : {0.0, 0.05, 0.3, 1.0}) {
    tab.eval(tau, row);
    for (double v : row) EXPECT_LE(std::fabs(v), 1.0 / 30.0 + 1e-12);
  }
}

TEST(phi, dense_solution_consistency) {
  const double eps = 0.05;
  const SpaceGrid sg;
  const TimeGrid tg{8, 1.0};
  const PhiSolution sol = solve_Phi(eps, tg, sg);
  // Phi(0) is the drift profile itself
  for (int i = 0; i < sg.n_x; i += 37)
    EXPECT_NEAR(sol.Phi.at(0, i), rho_eval(sg.node(i), 0), 1e-12);
  // the corrector is defined by exact subtraction
  for (int k : {0, 4, 8})
    for (int i = 0; i < sg.n_x; i += 53) {
      const double recomposed = rho_eval(sg.node(i), 0) + eps * sol.phi.at(k, i);
      EXPECT_NEAR(sol.Phi.at(k, i), recomposed, 1e-15);
    }
  // heat flow contracts the profile
  double e0 = 0.0, e1 = 0.0;
  for (int i = 0; i < sg.n_x; ++i) {
    e0 += sol.Phi.at(0, i) * sol.Phi.at(0, i);
    e1 += sol.Phi.at(tg.n_t, i) * sol.Phi.at(tg.n_t, i);
  }
  EXPECT_LT(e1, e0);
  // odd symmetry about x = 1/2 at every retained time
  for (int k : {2, 6})
    for (int i = 0; i < sg.n_x / 2; i += 41)
      EXPECT_NEAR(sol.Phi.at(k, sg.n_x - 1 - i), -sol.Phi.at(k, i), 1e-13);
}
