#pragma once
// Quadratic forms over kernel matrices, the split-kernel identity for the
// asymptotic kernel, positivity of its smooth part, coercivity constants as
// generalized eigenvalues against the weak-norm Gram matrix, and the
// eigenvalue asymptotics of the -|x-y|^{3/2} integral operator.

#include <Eigen/Dense>
#include <cmath>
#include <vector>

#include "driftlab/common.hpp"
#include "driftlab/grids.hpp"
#include "driftlab/kernel.hpp"
#include "driftlab/riesz.hpp"

namespace driftlab {

// <K u, u> with cell weights: sum_ij K[i][j] u_i u_j h^2. The control's
// cells must sit exactly on the kernel nodes.
inline double quadratic_form(const KernelMatrix& k, const Control& u) {
  const int m = k.size();
  require(u.cells() == m, "quadratic_form: node count mismatch");
  for (int i = 0; i < m; ++i)
    require(std::fabs(u.node(i) - k.nodes[i]) < 1e-12, "quadratic_form: node mismatch");
  const double h = u.h();
  double total = 0.0;
  for (int i = 0; i < m; ++i) {
    double row = 0.0;
    for (int j = 0; j < m; ++j) row += k.values(i, j) * u.u[j];
    total += row * u.u[i];
  }
  return total * h * h;
}

struct IdentityCheck {
  double lhs = 0.0;
  double rhs = 0.0;
  double rel_gap = 0.0;
};

// The asymptotic kernel satisfies, after integrating the control by parts
// twice, the exact continuum identity
//   <K0 u, u> = (3/4) int int [(2-x-y)^{-1/2} + |x-y|^{-1/2}] U(x) U(y),
// with U the primitive of u. Both sides are discretized independently: the
// left through the pointwise kernel matrix, the right through closed-form
// singular cell integrals. Their gap is pure quadrature error.
inline IdentityCheck k0_identity_check(const Control& u, int cells) {
  require(u.cells() == cells, "k0_identity_check: resolution mismatch");
  require(u.T == 1.0, "k0_identity_check: unit horizon required");
  IdentityCheck out;
  out.lhs = quadratic_form(assemble_K0(cells), u);
  const Eigen::MatrixXd s = reflected_cell_matrix(cells) + riesz_cell_matrix(cells);
  const std::vector<double> up = u.primitive();
  double rhs = 0.0;
  for (int i = 0; i < cells; ++i) {
    double row = 0.0;
    for (int j = 0; j < cells; ++j) row += s(i, j) * up[j];
    rhs += row * up[i];
  }
  out.rhs = 0.75 * rhs;
  const double scale = std::max(std::fabs(out.lhs), std::fabs(out.rhs));
  out.rel_gap = scale > 0 ? std::fabs(out.lhs - out.rhs) / scale : 0.0;
  return out;
}

// Minimum eigenvalue of the (x+y)^{-1/2} cell matrix; the kernel is of
// positive type, so this should never dip below rounding noise.
inline double plus_kernel_psd_check(int cells) {
  require(cells >= 1, "plus_kernel_psd_check: cells >= 1");
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(plus_cell_matrix(cells),
                                                    Eigen::EigenvaluesOnly);
  require(es.info() == Eigen::Success, "plus_kernel_psd_check: eigensolve failed");
  return es.eigenvalues().minCoeff();
}

// inf_u <K u, u> / R(U) as the smallest generalized eigenvalue of the
// weighted kernel form against the weak-norm Gram matrix.
inline double coercivity_constant(const KernelMatrix& k, const GramOperator& gram) {
  const int m = k.size();
  require(gram.cells == m, "coercivity_constant: dimension mismatch");
  const double h = gram.horizon / m;
  const Eigen::MatrixXd kw = (h * h) * k.values;
  // whiten by the Cholesky factor of the Gram matrix, then a plain
  // symmetric eigensolve; the factorization doubles as the conditioning gate
  Eigen::LLT<Eigen::MatrixXd> llt(gram.matrix);
  if (llt.info() != Eigen::Success)
    throw conditioning_error("coercivity_constant: Gram matrix numerically singular");
  const Eigen::MatrixXd l = llt.matrixL();
  const Eigen::MatrixXd w =
      l.triangularView<Eigen::Lower>().solve(
           Eigen::MatrixXd(l.triangularView<Eigen::Lower>().solve(kw).transpose()));
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(0.5 * (w + w.transpose()),
                                                    Eigen::EigenvaluesOnly);
  require(es.info() == Eigen::Success, "coercivity_constant: eigensolve failed");
  return es.eigenvalues().minCoeff();
}

// Eigenvalues of the integral operator with kernel -|x-y|^{3/2} on (0,1),
// midpoint Nystrom discretization: the positive eigenvalues in descending
// order obey lambda_n ~ (3 sqrt(2) / (4 pi^2)) n^{-5/2}. Returns the ratios
// lambda_n / that prediction for n = 1..n_max (1-indexed in position 0).
inline std::vector<double> eigen_asymptotics(int n_max, int resolution) {
  require(n_max >= 1, "eigen_asymptotics: n_max >= 1");
  require(resolution >= 8 * n_max, "eigen_asymptotics: resolution too low");
  const double h = 1.0 / resolution;
  Eigen::MatrixXd a(resolution, resolution);
  for (int i = 0; i < resolution; ++i)
    for (int j = 0; j <= i; ++j) {
      const double d = (i - j) * h;  // |x_i - x_j| on the midpoint grid
      const double v = -std::pow(d, 1.5) * h;
      a(i, j) = v;
      a(j, i) = v;
    }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(a, Eigen::EigenvaluesOnly);
  require(es.info() == Eigen::Success, "eigen_asymptotics: eigensolve failed");
  std::vector<double> pos;
  for (int i = resolution - 1; i >= 0; --i)
    if (es.eigenvalues()(i) > 0) pos.push_back(es.eigenvalues()(i));
  require(static_cast<int>(pos.size()) >= n_max, "eigen_asymptotics: too few positive eigenvalues");
  const double c = 3.0 * kSqrt2 / (4.0 * kPi * kPi);
  std::vector<double> ratios(n_max);
  for (int n = 1; n <= n_max; ++n) ratios[n - 1] = pos[n - 1] / (c * std::pow(n, -2.5));
  return ratios;
}

}  // namespace driftlab
