#pragma once

// Finite-dimensional counterpart: the bilinear system da = M a + u m,
// db = L b + Q(a,a), the canonical chain examples with their conserved /
// drifting quantities, and the boundary-term computation behind the
// "Q(1,1) vanishes on admissible test functions" check.

#include <Eigen/Dense>
#include <cmath>
#include <functional>
#include <utility>
#include <vector>

#include "driftlab/common.hpp"

namespace driftlab {

struct FinDimSystem {
  Eigen::MatrixXd M;                // n x n
  Eigen::VectorXd m;                // n
  Eigen::MatrixXd L;                // p x p
  std::vector<Eigen::MatrixXd> Q;  // p matrices, n x n, stored symmetrized
};

inline FinDimSystem make_findim_system(Eigen::MatrixXd M, Eigen::VectorXd m,
                                       Eigen::MatrixXd L, std::vector<Eigen::MatrixXd> Q) {
  const int n = static_cast<int>(M.rows());
  const int p = static_cast<int>(L.rows());
  require(M.cols() == n && m.size() == n, "make_findim_system: M/m dimension mismatch");
  require(L.cols() == p, "make_findim_system: L must be square");
  require(static_cast<int>(Q.size()) == p, "make_findim_system: need one Q slab per b row");
  for (auto& q : Q) {
    require(q.rows() == n && q.cols() == n, "make_findim_system: Q slab dimension mismatch");
    q = 0.5 * (q + q.transpose()).eval();
  }
  return {std::move(M), std::move(m), std::move(L), std::move(Q)};
}

// The three worked examples share the integrator chain a1' = a2, a2' = a3,
// a3' = u and a scalar b with L = 0; they differ only in the quadratic form:
//   1: b' = a2^2 + a1 a3   (conserved against a1 a2)
//   2: b' = a3^2           (increment int theta''^2 under u = theta''')
//   3: b' = a2^2           (increment int theta'^2)
inline FinDimSystem findim_example(int which) {
  require(which >= 1 && which <= 3, "findim_example: which must be 1, 2 or 3");
  Eigen::MatrixXd M = Eigen::MatrixXd::Zero(3, 3);
  M(0, 1) = 1.0;
  M(1, 2) = 1.0;
  Eigen::VectorXd m = Eigen::VectorXd::Zero(3);
  m(2) = 1.0;
  Eigen::MatrixXd L = Eigen::MatrixXd::Zero(1, 1);
  Eigen::MatrixXd q = Eigen::MatrixXd::Zero(3, 3);
  if (which == 1) {
    q(1, 1) = 1.0;
    q(0, 2) = 0.5;
    q(2, 0) = 0.5;
  } else if (which == 2) {
    q(2, 2) = 1.0;
  } else {
    q(1, 1) = 1.0;
  }
  return make_findim_system(std::move(M), std::move(m), std::move(L), {std::move(q)});
}

struct AbTrajectory {
  std::vector<double> times;
  Eigen::MatrixXd a;  // (steps+1) x n
  Eigen::MatrixXd b;  // (steps+1) x p
};

inline AbTrajectory simulate_ab(const FinDimSystem& sys,
                                const std::function<double(double)>& u, double T,
                                const Eigen::VectorXd& a0, const Eigen::VectorXd& b0,
                                int steps = 4096) {
  const int n = static_cast<int>(sys.M.rows());
  const int p = static_cast<int>(sys.L.rows());
  require(a0.size() == n && b0.size() == p, "simulate_ab: initial state dimension mismatch");
  require(T > 0.0 && steps >= 1, "simulate_ab: need T > 0 and at least one step");

  auto quad = [&](const Eigen::VectorXd& a) {
    Eigen::VectorXd q(p);
    for (int j = 0; j < p; ++j) q(j) = a.dot(sys.Q[j] * a);
    return q;
  };
  auto rhs = [&](double t, const Eigen::VectorXd& a, const Eigen::VectorXd& b,
                 Eigen::VectorXd& da, Eigen::VectorXd& db) {
    da = sys.M * a + u(t) * sys.m;
    db = sys.L * b + quad(a);
  };

  AbTrajectory traj;
  traj.times.resize(steps + 1);
  traj.a.resize(steps + 1, n);
  traj.b.resize(steps + 1, p);
  Eigen::VectorXd a = a0, b = b0;
  Eigen::VectorXd ka1(n), ka2(n), ka3(n), ka4(n), kb1(p), kb2(p), kb3(p), kb4(p);
  const double h = T / steps;
  traj.times[0] = 0.0;
  traj.a.row(0) = a.transpose();
  traj.b.row(0) = b.transpose();
  for (int k = 0; k < steps; ++k) {
    const double t = k * h;
    rhs(t, a, b, ka1, kb1);
    rhs(t + 0.5 * h, a + 0.5 * h * ka1, b + 0.5 * h * kb1, ka2, kb2);
    rhs(t + 0.5 * h, a + 0.5 * h * ka2, b + 0.5 * h * kb2, ka3, kb3);
    rhs(t + h, a + h * ka3, b + h * kb3, ka4, kb4);
    a += (h / 6.0) * (ka1 + 2.0 * ka2 + 2.0 * ka3 + ka4);
    b += (h / 6.0) * (kb1 + 2.0 * kb2 + 2.0 * kb3 + kb4);
    traj.times[k + 1] = t + h;
    traj.a.row(k + 1) = a.transpose();
    traj.b.row(k + 1) = b.transpose();
  }
  return traj;
}

// Example 1 conserves b - a1 a2 along every trajectory; returns the largest
// excursion of that quantity from its initial value.
inline double conservation_check_example1(const std::function<double(double)>& u, double T,
                                          const Eigen::VectorXd& a0, double b0,
                                          int steps = 4096) {
  const FinDimSystem sys = findim_example(1);
  Eigen::VectorXd bv(1);
  bv(0) = b0;
  const AbTrajectory traj = simulate_ab(sys, u, T, a0, bv, steps);
  const double c0 = b0 - a0(0) * a0(1);
  double worst = 0.0;
  for (int k = 0; k <= steps; ++k) {
    const double c = traj.b(k, 0) - traj.a(k, 0) * traj.a(k, 1);
    worst = std::max(worst, std::abs(c - c0));
  }
  return worst;
}

struct ThetaProfile {
  std::function<double(double)> theta, d1, d2, d3;
};

struct DriftCheck {
  double increment = 0.0;  // simulated b(T) - b(0)
  double weak_norm = 0.0;  // quadrature oracle: int theta''^2 (Ex. 2) or int theta'^2 (Ex. 3)
  double rel_gap = 0.0;
};

// Runs example 2 or 3 with u = theta''' from rest and compares the b increment
// against the independent Simpson quadrature of the matching derivative. The
// substitution is only valid when theta, theta', theta'' vanish at both ends.
inline DriftCheck drift_check_examples23(int example, const ThetaProfile& th, double T,
                                         int steps = 4096, int oracle_panels = 4096) {
  require(example == 2 || example == 3, "drift_check_examples23: example must be 2 or 3");
  require(T > 0.0, "drift_check_examples23: T must be positive");
  require(oracle_panels >= 2 && oracle_panels % 2 == 0,
          "drift_check_examples23: oracle panel count must be even");
  for (double t : {0.0, T}) {
    const bool ok = std::abs(th.theta(t)) <= 1e-10 && std::abs(th.d1(t)) <= 1e-10 &&
                    std::abs(th.d2(t)) <= 1e-10;
    if (!ok)
      throw std::invalid_argument(
          "drift_check_examples23: theta must vanish to second order at both ends");
  }

  const FinDimSystem sys = findim_example(example);
  const Eigen::VectorXd a0 = Eigen::VectorXd::Zero(3);
  const Eigen::VectorXd b0 = Eigen::VectorXd::Zero(1);
  const AbTrajectory traj = simulate_ab(sys, th.d3, T, a0, b0, steps);

  DriftCheck out;
  out.increment = traj.b(steps, 0) - traj.b(0, 0);
  const auto& deriv = (example == 2) ? th.d2 : th.d1;
  std::vector<double> f(oracle_panels + 1);
  const double h = T / oracle_panels;
  for (int i = 0; i <= oracle_panels; ++i) {
    const double v = deriv(i * h);
    f[i] = v * v;
  }
  out.weak_norm = simpson(f, h);
  out.rel_gap = std::abs(out.increment - out.weak_norm) / std::max(out.weak_norm, 1e-300);
  return out;
}

inline int kalman_rank(const Eigen::MatrixXd& M, const Eigen::VectorXd& m) {
  const int n = static_cast<int>(M.rows());
  require(M.cols() == n && m.size() == n, "kalman_rank: dimension mismatch");
  Eigen::MatrixXd K(n, n);
  Eigen::VectorXd col = m;
  for (int j = 0; j < n; ++j) {
    K.col(j) = col;
    col = M * col;
  }
  return static_cast<int>(Eigen::FullPivLU<Eigen::MatrixXd>(K).rank());
}

struct Q11Check {
  double value = 0.0;
  bool admissible = false;
};

// The quadratic term evaluated on the constant pair reduces to the boundary
// term (1/2) int_0^1 phi' = (phi(1) - phi(0))/2; each panel increment of phi
// integrates phi' over that panel exactly, so the sum is the quadrature.
inline Q11Check lie_bracket_q11_check(const std::function<double(double)>& phi,
                                      int panels = 64) {
  require(panels >= 1, "lie_bracket_q11_check: need at least one panel");
  const double at0 = phi(0.0), at1 = phi(1.0);
  double acc = 0.0;
  double prev = at0;
  for (int i = 1; i <= panels; ++i) {
    const double next = phi(static_cast<double>(i) / panels);
    acc += next - prev;
    prev = next;
  }
  return {0.5 * acc, std::abs(at0) <= 1e-12 && std::abs(at1) <= 1e-12};
}

inline std::vector<Q11Check> lie_bracket_q11_check(
    const std::vector<std::function<double(double)>>& phis, int panels = 64) {
  std::vector<Q11Check> out;
  out.reserve(phis.size());
  for (const auto& phi : phis) out.push_back(lie_bracket_q11_check(phi, panels));
  return out;
}

}  // namespace driftlab
