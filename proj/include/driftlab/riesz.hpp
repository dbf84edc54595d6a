#pragma once
// Exact cell-pair integration of the weakly singular kernels |x-y|^{-1/2},
// (x+y)^{-1/2} and (2T-x-y)^{-1/2} over uniform partitions, plus the Riesz
// quadratic form and the primitive-map Gram matrix.
//
// Each cell-pair integral is a double difference of the kernel's second
// antiderivative evaluated at the four cell corners, so there is no singular
// quadrature error at all. With F(t) = (4/3)|t|^{3/2},
//   d2/dxdy F(x-y) = -|x-y|^{-1/2}
// (the inner derivative in y flips one sign), hence the difference-kernel
// integral carries an overall minus. For kernels of x+y the mixed derivative
// has no flip: d2/dxdy (4/3)(x+y)^{3/2} = (x+y)^{-1/2} and
// d2/dxdy (4/3)(2T-x-y)^{3/2} = (2T-x-y)^{-1/2}.

#include <Eigen/Dense>
#include <cmath>
#include <vector>

#include "driftlab/common.hpp"
#include "driftlab/grids.hpp"

namespace driftlab {

namespace detail {

inline double antideriv_abs32(double t) { return (4.0 / 3.0) * std::pow(std::fabs(t), 1.5); }
inline double antideriv_pow32(double s) { return (4.0 / 3.0) * std::pow(s, 1.5); }

// Double-difference over the corners of cell_i x cell_j with edges at i*h.
template <typename F>
double corner_difference(const F& anti, double xi, double xi1, double yj, double yj1, bool sum_mode) {
  if (sum_mode)
    return anti(xi1 + yj1) - anti(xi1 + yj) - anti(xi + yj1) + anti(xi + yj);
  return anti(xi1 - yj1) - anti(xi1 - yj) - anti(xi - yj1) + anti(xi - yj);
}

}  // namespace detail

// S[i][j] = int_{cell_i} int_{cell_j} |x-y|^{-1/2} dx dy on [0,T] split into
// M uniform cells.
inline Eigen::MatrixXd riesz_cell_matrix(int cells, double horizon = 1.0) {
  require(cells >= 1, "riesz_cell_matrix: cells >= 1");
  require(horizon > 0, "riesz_cell_matrix: horizon > 0");
  const double h = horizon / cells;
  Eigen::MatrixXd s(cells, cells);
  for (int i = 0; i < cells; ++i)
    for (int j = 0; j <= i; ++j) {
      const double v = -detail::corner_difference(detail::antideriv_abs32, i * h, (i + 1) * h,
                                                  j * h, (j + 1) * h, false);
      s(i, j) = v;
      s(j, i) = v;
    }
  return s;
}

// Cell-pair integrals of (x+y)^{-1/2} on [0,1]^2 (the smooth positive-type
// part of the split kernel).
inline Eigen::MatrixXd plus_cell_matrix(int cells) {
  require(cells >= 1, "plus_cell_matrix: cells >= 1");
  const double h = 1.0 / cells;
  Eigen::MatrixXd s(cells, cells);
  for (int i = 0; i < cells; ++i)
    for (int j = 0; j <= i; ++j) {
      const double v = detail::corner_difference(detail::antideriv_pow32, i * h, (i + 1) * h,
                                                 j * h, (j + 1) * h, true);
      s(i, j) = v;
      s(j, i) = v;
    }
  return s;
}

// Cell-pair integrals of (2T-x-y)^{-1/2} on [0,T]^2, the reflected twin of
// plus_cell_matrix appearing on the rhs of the asymptotic-kernel identity.
inline Eigen::MatrixXd reflected_cell_matrix(int cells, double horizon = 1.0) {
  require(cells >= 1, "reflected_cell_matrix: cells >= 1");
  require(horizon > 0, "reflected_cell_matrix: horizon > 0");
  const double h = horizon / cells;
  const double two_t = 2.0 * horizon;
  auto anti = [two_t](double s) { return (4.0 / 3.0) * std::pow(two_t - s, 1.5); };
  Eigen::MatrixXd s(cells, cells);
  for (int i = 0; i < cells; ++i)
    for (int j = 0; j <= i; ++j) {
      const double v = detail::corner_difference(anti, i * h, (i + 1) * h, j * h, (j + 1) * h, true);
      s(i, j) = v;
      s(j, i) = v;
    }
  return s;
}

// Riesz quadratic form of a piecewise-constant density given by its cell
// values: int int |x-y|^{-1/2} f(x) f(y) dx dy, exact for that density.
inline double riesz_form(const std::vector<double>& cell_values, double horizon = 1.0) {
  const int m = static_cast<int>(cell_values.size());
  require(m >= 1, "riesz_form: at least one cell");
  const Eigen::MatrixXd s = riesz_cell_matrix(m, horizon);
  double total = 0.0;
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j) total += s(i, j) * cell_values[i] * cell_values[j];
  return total;
}

// R(U): the Riesz form of the control's primitive, the operational weak-norm
// squared. U is sampled at cell midpoints (exact for piecewise-constant u)
// and treated as piecewise constant in the singular integral.
inline double weak_norm_sq(const Control& u) {
  return riesz_form(u.primitive(), u.T);
}

// P maps cell values of u to cell-midpoint values of its primitive:
// U_i = h*(u_0+...+u_{i-1}) + (h/2)*u_i. Lower-triangular, full rank.
inline Eigen::MatrixXd primitive_matrix(int cells, double horizon = 1.0) {
  require(cells >= 1, "primitive_matrix: cells >= 1");
  const double h = horizon / cells;
  Eigen::MatrixXd p = Eigen::MatrixXd::Zero(cells, cells);
  for (int i = 0; i < cells; ++i) {
    for (int j = 0; j < i; ++j) p(i, j) = h;
    p(i, i) = 0.5 * h;
  }
  return p;
}

// Gram matrix of the weak norm over u-cell values: G_R = P^T S P, so that
// u^T G_R u = weak_norm_sq(u). Symmetric positive definite.
struct GramOperator {
  Eigen::MatrixXd matrix;
  int cells = 0;
  double horizon = 1.0;
};

inline GramOperator riesz_gram(int cells, double horizon = 1.0) {
  GramOperator g;
  g.cells = cells;
  g.horizon = horizon;
  const Eigen::MatrixXd s = riesz_cell_matrix(cells, horizon);
  const Eigen::MatrixXd p = primitive_matrix(cells, horizon);
  Eigen::MatrixXd m = p.transpose() * s * p;
  // symmetrize away the last-bit asymmetry of the triple product
  g.matrix = 0.5 * (m + m.transpose());
  return g;
}

}  // namespace driftlab
