// Kernel assembly checks: closed forms of the asymptotic kernel, frozen
// reference values for the viscous kernel at eps = 1e-2, quadrature
// convergence, the residual definition, and CSV round trips.

#include <gtest/gtest.h>

#include <cmath>
#include <cstdio>

#include "driftlab/kernel.hpp"

namespace dl = driftlab;

namespace {

double bracket_all_ones(const dl::KernelMatrix& k) {
  const double h = 1.0 / k.size();
  return h * h * k.values.sum();
}

}  // namespace

TEST(Kernel, K0ClosedForms) {
  EXPECT_NEAR(dl::K0_value(0.0, 0.0), std::pow(2.0, 1.5), 1e-15);
  EXPECT_NEAR(dl::K0_value(1.0, 1.0), 0.0, 1e-15);
  EXPECT_NEAR(dl::K0_value(0.0, 1.0), 0.0, 1e-15);
  EXPECT_NEAR(dl::K0_value(0.3, 0.3), std::pow(1.4, 1.5), 1e-15);
  EXPECT_NEAR(dl::K0_value(0.25, 0.75), 1.0 - std::pow(0.5, 1.5), 1e-15);
  for (int i = 0; i < 12; ++i) {
    const double a = (i + 0.31) / 12.5, b = 1.0 - (i + 0.7) / 13.0;
    EXPECT_DOUBLE_EQ(dl::K0_value(a, b), dl::K0_value(b, a));
  }
  EXPECT_THROW(dl::K0_value(-0.1, 0.5), std::invalid_argument);
  EXPECT_THROW(dl::K0_value(0.5, 1.1), std::invalid_argument);
}

TEST(Kernel, NodesAreCellMidpoints) {
  const auto s = dl::kernel_nodes(8);
  ASSERT_EQ(s.size(), 8u);
  for (int i = 0; i < 8; ++i) EXPECT_NEAR(s[i], (i + 0.5) / 8.0, 1e-16);
  EXPECT_THROW(dl::kernel_nodes(1), std::invalid_argument);
}

TEST(Kernel, AssembleK0MatchesPointwiseFormula) {
  const dl::KernelMatrix k = dl::assemble_K0(17);
  EXPECT_EQ(k.size(), 17);
  EXPECT_TRUE(k.asymptotic());
  // lower triangle carries the computed entries, the upper is mirrored
  for (int i = 0; i < k.size(); ++i)
    for (int j = 0; j <= i; ++j) {
      EXPECT_DOUBLE_EQ(k.values(i, j), dl::K0_value(k.nodes[i], k.nodes[j]));
      EXPECT_EQ(k.values(j, i), k.values(i, j));
    }
}

TEST(Kernel, ViscousReferenceFormAtEps1em2) {
  const dl::KernelMatrix k = dl::assemble_K_eps(1e-2, 48, 400);
  EXPECT_EQ(k.size(), 48);
  EXPECT_FALSE(k.asymptotic());
  EXPECT_DOUBLE_EQ(k.eps, 1e-2);
  // requested resolution 400 is rounded up to a multiple of 2M = 96
  EXPECT_EQ(k.quad_resolution, 480);
  EXPECT_TRUE(k.values.allFinite());
  const double sym = (k.values - k.values.transpose()).cwiseAbs().maxCoeff();
  EXPECT_LE(sym, 1e-15);

  // frozen reference for <K^eps 1, 1> at this resolution
  const double q = bracket_all_ones(k);
  EXPECT_NEAR(q, 7.899111e-4, 2e-3 * 7.899111e-4);

  // quadrature refinement: the 200-point assembly is already within 1e-4
  const dl::KernelMatrix kc = dl::assemble_K_eps(1e-2, 48, 200);
  EXPECT_EQ(kc.quad_resolution, 288);
  const double qc = bracket_all_ones(kc);
  EXPECT_LE(std::fabs(qc - q) / std::fabs(q), 1e-4);
}

TEST(Kernel, ResidualMatchesItsDefinition) {
  const dl::KernelMatrix r = dl::residual_matrix(0.1, 12, 96);
  const dl::KernelMatrix k = dl::assemble_K_eps(0.1, 12, 96);
  const dl::KernelMatrix k0 = dl::assemble_K0(12);
  const double scale = std::sqrt(0.1) / (45.0 * std::sqrt(dl::kPi));
  const Eigen::MatrixXd expect = k.values - scale * k0.values;
  EXPECT_LE((r.values - expect).cwiseAbs().maxCoeff(), 1e-15);
}

TEST(Kernel, ResidualShrinksWithEps) {
  // Frobenius ratio ||K^eps - scale K0||_F / (sqrt(eps) ||K0||_F) against
  // frozen values at M = 48, quadrature 400.
  const dl::KernelMatrix k0 = dl::assemble_K0(48);
  const double k0_norm = k0.values.norm();
  auto ratio = [&](double eps) {
    const dl::KernelMatrix r = dl::residual_matrix(eps, 48, 400);
    return r.values.norm() / (std::sqrt(eps) * k0_norm);
  };
  const double r1 = ratio(0.1);
  const double r2 = ratio(1e-2);
  EXPECT_NEAR(r1, 1.14637e-2, 0.02 * 1.14637e-2);
  EXPECT_NEAR(r2, 3.39142e-3, 0.02 * 3.39142e-3);
  EXPECT_LT(r2, r1);
}

TEST(Kernel, CsvRoundTripIsExact) {
  const dl::KernelMatrix k = dl::assemble_K_eps(0.05, 6, 64);
  const std::string path = "kernel_roundtrip_tmp.csv";
  dl::save_kernel_csv(k, path);
  const dl::KernelMatrix back = dl::load_kernel_csv(path);
  std::remove(path.c_str());
  EXPECT_EQ(back.size(), k.size());
  EXPECT_DOUBLE_EQ(back.eps, k.eps);
  EXPECT_EQ(back.quad_resolution, k.quad_resolution);
  for (int i = 0; i < k.size(); ++i) EXPECT_DOUBLE_EQ(back.nodes[i], k.nodes[i]);
  EXPECT_EQ((back.values - k.values).cwiseAbs().maxCoeff(), 0.0);
}

TEST(Kernel, AssemblyPreconditions) {
  EXPECT_THROW(dl::assemble_K_eps(0.0, 8, 64), std::invalid_argument);
  EXPECT_THROW(dl::assemble_K_eps(0.1, 1, 64), std::invalid_argument);
  EXPECT_THROW(dl::assemble_K_eps(0.1, 8, 32), std::invalid_argument);
}
