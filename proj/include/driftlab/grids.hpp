#pragma once
// Uniform grids on (0,1) x (0,T), space-time sample fields, and the
// cell-sampled scalar control with its running primitive.

#include <cstddef>
#include <vector>

#include "driftlab/common.hpp"

namespace driftlab {

// Interior nodes x_i = i*h, i = 1..n_x, h = 1/(n_x+1). Boundary values of
// Dirichlet fields are implied zero and never stored.
struct SpaceGrid {
  int n_x = 511;

  explicit SpaceGrid(int n) : n_x(n) { require(n >= 1, "SpaceGrid: n_x >= 1"); }
  SpaceGrid() = default;

  double h() const { return 1.0 / (n_x + 1); }
  double node(int i) const { return (i + 1) * h(); }  // i = 0..n_x-1
  std::vector<double> nodes() const {
    std::vector<double> x(n_x);
    for (int i = 0; i < n_x; ++i) x[i] = node(i);
    return x;
  }
};

// Nodes t_k = k*T/n_t, k = 0..n_t.
struct TimeGrid {
  int n_t = 512;
  double T = 1.0;

  TimeGrid(int n, double horizon) : n_t(n), T(horizon) {
    require(n >= 1 && horizon > 0, "TimeGrid: n_t >= 1, T > 0");
  }
  TimeGrid() = default;

  double dt() const { return T / n_t; }
  double node(int k) const { return k * dt(); }
};

// Row-major (time-major) sample matrix: value(k, i) = f(t_k, x_i).
struct Field {
  TimeGrid time;
  SpaceGrid space;
  std::vector<double> values;  // (n_t+1) * n_x entries

  Field() = default;
  Field(const TimeGrid& tg, const SpaceGrid& sg)
      : time(tg), space(sg), values(static_cast<std::size_t>(tg.n_t + 1) * sg.n_x, 0.0) {}

  double& at(int k, int i) { return values[static_cast<std::size_t>(k) * space.n_x + i]; }
  double at(int k, int i) const { return values[static_cast<std::size_t>(k) * space.n_x + i]; }
  const double* row(int k) const { return values.data() + static_cast<std::size_t>(k) * space.n_x; }
  double* row(int k) { return values.data() + static_cast<std::size_t>(k) * space.n_x; }
  std::vector<double> slice(int k) const {
    return std::vector<double>(row(k), row(k) + space.n_x);
  }
};

// Scalar control sampled as cell values on a uniform partition of (0,T):
// u is constant on ((i-1)h, ih), h = T/M. The matching node coordinates are
// the cell midpoints s_i = (i-1/2)h, which is also where the kernel matrices
// are sampled. The primitive U (with U(0) = 0) is exact for the piecewise
// constant interpolant and evaluated at the midpoints:
//   U(s_i) = h*(u_1 + ... + u_{i-1}) + (h/2)*u_i.
// Differencing U back recovers u, so no information is lost.
struct Control {
  std::vector<double> u;
  double T = 1.0;

  Control() = default;
  Control(std::vector<double> cells, double horizon = 1.0) : u(std::move(cells)), T(horizon) {
    require(!u.empty() && T > 0, "Control: nonempty cells, T > 0");
  }
  static Control constant(double value, int cells, double horizon = 1.0) {
    return Control(std::vector<double>(cells, value), horizon);
  }

  int cells() const { return static_cast<int>(u.size()); }
  double h() const { return T / cells(); }
  double node(int i) const { return (i + 0.5) * h(); }  // i = 0..M-1

  // u evaluated as the piecewise constant interpolant on [0,T].
  double eval(double t) const {
    int i = static_cast<int>(t / h());
    if (i < 0) i = 0;
    if (i >= cells()) i = cells() - 1;
    return u[i];
  }

  // Primitive at the cell midpoints, U(0) = 0.
  std::vector<double> primitive() const {
    std::vector<double> U(u.size());
    const double hh = h();
    double acc = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i) {
      U[i] = acc + 0.5 * hh * u[i];
      acc += hh * u[i];
    }
    return U;
  }

  // Exact L^2(0,T) and L^1(0,T) norms of the piecewise constant function.
  double l2_norm_sq() const {
    double s = 0;
    for (double v : u) s += v * v;
    return s * h();
  }
  double l1_norm() const {
    double s = 0;
    for (double v : u) s += std::abs(v);
    return s * h();
  }
};

}  // namespace driftlab
