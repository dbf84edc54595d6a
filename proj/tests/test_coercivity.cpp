// Coercivity checks: the discrete quadratic form, the integrated-by-parts
// identity for the asymptotic kernel, the generalized eigenvalue against the
// weak gram operator, and the eigenvalue asymptotics of the signed kernel.

#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "driftlab/coercivity.hpp"
#include "driftlab/kernel.hpp"
#include "driftlab/riesz.hpp"

namespace dl = driftlab;

TEST(Coercivity, QuadraticFormMatchesManualLoop) {
  const dl::KernelMatrix k = dl::assemble_K0(4);
  const dl::Control u({1.0, -2.0, 0.5, 3.0}, 1.0);
  const double h = 0.25;
  double manual = 0.0;
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) manual += h * h * k.values(i, j) * u.u[i] * u.u[j];
  EXPECT_NEAR(dl::quadratic_form(k, u), manual, 1e-15);

  const dl::Control mismatched({1.0, 1.0}, 1.0);
  EXPECT_THROW(dl::quadratic_form(k, mismatched), std::invalid_argument);
}

TEST(Coercivity, K0IdentityForUnitControl) {
  // continuum value of <K0 1, 1> is (4/35)(2^{7/2} - 4)
  const double continuum = 4.0 / 35.0 * (std::pow(2.0, 3.5) - 4.0);
  const dl::Control ones = dl::Control::constant(1.0, 256, 1.0);
  const dl::IdentityCheck fine = dl::k0_identity_check(ones, 256);
  EXPECT_NEAR(fine.lhs, 0.835853938, 2e-9);
  EXPECT_LE(std::fabs(fine.lhs - continuum), 5e-6);
  EXPECT_LT(fine.rel_gap, 1e-5);

  const dl::IdentityCheck coarse =
      dl::k0_identity_check(dl::Control::constant(1.0, 128, 1.0), 128);
  const double ratio = coarse.rel_gap / fine.rel_gap;
  EXPECT_GE(ratio, 3.0);
  EXPECT_LE(ratio, 5.0);
}

TEST(Coercivity, K0IdentityForOscillatingControl) {
  // identity is quadratic in u, so it has to hold beyond constants
  const int m = 192;
  std::vector<double> vals(m);
  for (int i = 0; i < m; ++i) {
    const double s = (i + 0.5) / m;
    vals[i] = 1.0 + 0.6 * std::sin(2.0 * dl::kPi * s) - 0.3 * std::cos(3.0 * dl::kPi * s);
  }
  const dl::IdentityCheck c = dl::k0_identity_check(dl::Control(vals, 1.0), m);
  EXPECT_LT(c.rel_gap, 5e-5);
}

TEST(Coercivity, PlusKernelIsPositiveSemidefinite) {
  EXPECT_GE(dl::plus_kernel_psd_check(64), -1e-10);
}

TEST(Coercivity, AsymptoticLowerBoundAgainstWeakNorm) {
  auto lambda_at = [](int m) {
    return dl::coercivity_constant(dl::assemble_K0(m), dl::riesz_gram(m, 1.0));
  };
  const double l32 = lambda_at(32);
  const double l64 = lambda_at(64);
  const double l128 = lambda_at(128);
  const double l256 = lambda_at(256);
  EXPECT_NEAR(l64, 0.754142, 5e-4);
  EXPECT_GT(l32, l64);
  EXPECT_GT(l64, l128);
  EXPECT_GT(l128, l256);
  EXPECT_GE(l256, 0.74);
}

TEST(Coercivity, PencilIsHomogeneousInTheKernel) {
  dl::KernelMatrix k = dl::assemble_K0(32);
  const dl::GramOperator gram = dl::riesz_gram(32, 1.0);
  const double base = dl::coercivity_constant(k, gram);
  k.values *= 2.5;
  const double scaled = dl::coercivity_constant(k, gram);
  EXPECT_NEAR(scaled, 2.5 * base, 1e-12 * std::fabs(scaled));
}

TEST(Coercivity, IndefiniteGramIsRejected) {
  const dl::KernelMatrix k = dl::assemble_K0(4);
  dl::GramOperator gram;
  gram.cells = 4;
  gram.horizon = 1.0;
  gram.matrix = Eigen::MatrixXd::Identity(4, 4);
  gram.matrix(3, 3) = -1.0;
  EXPECT_THROW(dl::coercivity_constant(k, gram), dl::conditioning_error);
}

TEST(Coercivity, EigenvalueAsymptotics) {
  const std::vector<double> ratios = dl::eigen_asymptotics(25, 512);
  ASSERT_EQ(ratios.size(), 25u);
  for (int n : {5, 10, 25}) {
    EXPECT_GE(ratios[n - 1], 0.85) << "mode " << n;
    EXPECT_LE(ratios[n - 1], 1.15) << "mode " << n;
  }
  EXPECT_THROW(dl::eigen_asymptotics(25, 100), std::invalid_argument);
  EXPECT_THROW(dl::eigen_asymptotics(0, 512), std::invalid_argument);
}
