#pragma once

// Adjoint-gradient machinery for J(u) = 1/2 ||y(T)||_2^2 subject to
// y_t - nu y_xx + y y_x = u(t), the projected-gradient null-control attempt,
// and the minimal-energy moment-problem control for the even-symmetric
// (odd-index) modes of the linear system.

#include <Eigen/Dense>
#include <cmath>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "driftlab/burgers.hpp"
#include "driftlab/common.hpp"
#include "driftlab/grids.hpp"
#include "driftlab/rho.hpp"
#include "driftlab/spectral.hpp"
#include "driftlab/transforms.hpp"

namespace driftlab {

namespace detail {

// Fixed-step forward integration in coefficient space; mirrors the solver's
// stepping exactly so costs compared during a line search and states fed to
// the backward solve come from one discretization.
inline SpectralState burgers_forward(double nu, const Control& u,
                                     const std::vector<double>& y0, double T, int n_modes,
                                     int steps, std::vector<std::vector<double>>* history) {
  const SpaceGrid sg;
  SpectralState st = sine_analyze(y0, sg, n_modes);
  st.viscosity = nu;
  double y0_max = 0.0;
  for (double v : y0) y0_max = std::max(y0_max, std::abs(v));
  const double ceiling = 10.0 * (y0_max + u.l1_norm()) + 1e-9;

  BurgersCore core(n_modes, nu, T / steps);
  if (history) {
    history->assign(steps + 1, {});
    (*history)[0] = st.c;
  }
  const double dt = T / steps;
  for (int k = 0; k < steps; ++k) {
    core.step(st.c, u.eval((k + 0.5) * dt));
    const double sm = core.step_max();
    if (!std::isfinite(sm) || sm > ceiling)
      throw blowup_error("burgers_forward: non-finite values or ceiling exceeded");
    if (history) (*history)[k + 1] = st.c;
  }
  return st;
}

// Backward (adjoint) core for q_tau - nu q_xx = y(T - tau) q_x, marched with
// the same integrating-factor RK4 stencil as the forward solver. The product
// y q_x has trigonometric degree 2N, so the P = 2N+2 interval grid evaluates
// its sine coefficients exactly.
class AdjointCore {
 public:
  AdjointCore(int n_modes, double nu, double dt)
      : n_(n_modes), p_(2 * n_modes + 2), hx_(1.0 / p_), h_(dt),
        eh_(n_modes), pad_(p_ - 1, 0.0), ygrid_(p_ - 1, 0.0),
        cosin_(p_ + 1, 0.0), cosout_(p_ + 1, 0.0),
        prod_(p_ - 1, 0.0), sine_(p_ - 1, 0.0),
        ra_(n_modes), rb_(n_modes), rc_(n_modes), rd_(n_modes),
        t1_(n_modes), t2_(n_modes), t3_(n_modes) {
    for (int n = 1; n <= n_; ++n)
      eh_[n - 1] = std::exp(-0.5 * nu * n * n * kPi * kPi * dt);
  }

  void step(std::vector<double>& q, const std::vector<double>& y_lo,
            const std::vector<double>& y_half, const std::vector<double>& y_hi) {
    source(q, y_lo, ra_);
    for (int n = 0; n < n_; ++n) t1_[n] = eh_[n] * (q[n] + 0.5 * h_ * ra_[n]);
    source(t1_, y_half, rb_);
    for (int n = 0; n < n_; ++n) t2_[n] = eh_[n] * q[n] + 0.5 * h_ * rb_[n];
    source(t2_, y_half, rc_);
    for (int n = 0; n < n_; ++n) t3_[n] = eh_[n] * (eh_[n] * q[n] + h_ * rc_[n]);
    source(t3_, y_hi, rd_);
    for (int n = 0; n < n_; ++n) {
      const double e = eh_[n];
      q[n] = e * e * q[n] +
             (h_ / 6.0) * (e * e * ra_[n] + 2.0 * e * (rb_[n] + rc_[n]) + rd_[n]);
    }
  }

 private:
  void source(const std::vector<double>& q, const std::vector<double>& ycoef,
              std::vector<double>& out) {
    // y on the product-grid interior
    for (int n = 0; n < n_; ++n) pad_[n] = ycoef[n] / kSqrt2;
    for (int n = n_; n < p_ - 1; ++n) pad_[n] = 0.0;
    dst_i(pad_, ygrid_);
    // q_x = sum q_n sqrt2 n pi cos(n pi x) via a cosine synthesis
    cosin_[0] = 0.0;
    for (int n = 1; n <= n_; ++n) cosin_[n] = 0.5 * q[n - 1] * kSqrt2 * n * kPi;
    for (int n = n_ + 1; n <= p_; ++n) cosin_[n] = 0.0;
    dct_i(cosin_, cosout_);
    for (int j = 0; j < p_ - 1; ++j) prod_[j] = ygrid_[j] * cosout_[j + 1];
    dst_i(prod_, sine_);
    const double scale = hx_ / kSqrt2;
    for (int n = 0; n < n_; ++n) out[n] = scale * sine_[n];
  }

  int n_, p_;
  double hx_, h_;
  std::vector<double> eh_, pad_, ygrid_, cosin_, cosout_, prod_, sine_;
  std::vector<double> ra_, rb_, rc_, rd_, t1_, t2_, t3_;
};

}  // namespace detail

struct AdjointGradient {
  std::vector<double> g_time;   // int_0^1 p(t,x) dx at the forward time nodes
  std::vector<double> g_cells;  // dJ/du_i for the piecewise-constant cells
  double cost = 0.0;            // J = 1/2 ||y(T)||_2^2
  double rho_projection = 0.0;  // <rho, y(T)>
  int steps = 0;
};

inline AdjointGradient adjoint_gradient(double nu, const Control& u,
                                        const std::vector<double>& y0, double T,
                                        int n_modes = 64, int steps = 0) {
  const SpaceGrid sg;
  require(nu > 0.0, "adjoint_gradient: viscosity must be positive");
  require(T > 0.0, "adjoint_gradient: horizon must be positive");
  require(std::abs(u.T - T) <= 1e-12 * std::max(1.0, T),
          "adjoint_gradient: control horizon must match T");
  require(static_cast<int>(y0.size()) == sg.n_x, "adjoint_gradient: y0 grid mismatch");
  require(n_modes >= 2 && n_modes <= sg.n_x, "adjoint_gradient: bad mode count");
  const int cells = u.cells();
  if (steps <= 0) steps = 256;
  steps = cells * ((steps + cells - 1) / cells);
  const double dt = T / steps;

  std::vector<std::vector<double>> hist;
  SpectralState fin = detail::burgers_forward(nu, u, y0, T, n_modes, steps, &hist);

  AdjointGradient out;
  out.steps = steps;
  for (double c : fin.c) out.cost += 0.5 * c * c;
  out.rho_projection = rho_spectral_projection(fin);

  auto g_of = [&](const std::vector<double>& q) {
    double acc = 0.0;
    for (int n = 1; n <= n_modes; n += 2) acc += q[n - 1] * constant_source_coeff(n);
    return acc;
  };

  out.g_time.assign(steps + 1, 0.0);
  std::vector<double> q = fin.c;  // p(T) = y(T)
  out.g_time[steps] = g_of(q);
  detail::AdjointCore core(n_modes, nu, dt);
  std::vector<double> y_half(n_modes);
  for (int k = 0; k < steps; ++k) {
    const int j = steps - k;  // forward index of y(T - tau_k)
    for (int n = 0; n < n_modes; ++n) y_half[n] = 0.5 * (hist[j][n] + hist[j - 1][n]);
    core.step(q, hist[j], y_half, hist[j - 1]);
    for (double v : q)
      if (!std::isfinite(v)) throw blowup_error("adjoint_gradient: backward solve went non-finite");
    out.g_time[j - 1] = g_of(q);
  }

  // dJ/du_i integrates g over cell i (trapezoid over the aligned steps)
  out.g_cells.assign(cells, 0.0);
  const int per_cell = steps / cells;
  for (int i = 0; i < cells; ++i) {
    double acc = 0.0;
    for (int k = 0; k <= per_cell; ++k) {
      const double w = (k == 0 || k == per_cell) ? 0.5 : 1.0;
      acc += w * out.g_time[i * per_cell + k];
    }
    out.g_cells[i] = acc * dt;
  }
  return out;
}

struct NullControlOptions {
  int cells = 64;
  double nu = 1.0;
  int n_modes = 64;
  int steps = 64;
};

struct OptRun {
  std::vector<double> cost_history;  // J at the initial point and each accepted step
  std::vector<double> proj_history;  // <rho, y(T)> alongside
  Control u;
  double cost = 0.0;
  double rho_projection = 0.0;
  double final_l2 = 0.0;
  bool stalled = false;
  int accepted = 0;
};

// Projected gradient with Armijo backtracking on the ball |u|_2 <= eta,
// started from y0 = delta rho. With delta = 0 the start is the critical point
// u = 0 and the optimizer stays there.
inline OptRun attempt_null_control(double delta, double T, double eta, int iterations,
                                   std::uint64_t seed, const NullControlOptions& opt = {}) {
  require(delta >= 0.0, "attempt_null_control: delta must be nonnegative");
  require(T > 0.0 && eta > 0.0, "attempt_null_control: need T > 0 and eta > 0");
  require(iterations >= 0, "attempt_null_control: negative iteration budget");

  const SpaceGrid sg;
  std::vector<double> y0 = rho_profile(sg);
  for (double& v : y0) v *= delta;

  Rng rng(seed);
  Control u = delta > 0.0 ? random_control(rng, opt.cells, 0.5 * eta, T)
                          : Control::constant(0.0, opt.cells, T);
  const double cell_h = u.h();

  auto project_ball = [&](Control& c) {
    const double norm = std::sqrt(c.l2_norm_sq());
    if (norm > eta) {
      const double s = eta / norm;
      for (double& v : c.u) v *= s;
    }
  };
  auto evaluate = [&](const Control& c) {
    SpectralState st =
        detail::burgers_forward(opt.nu, c, y0, T, opt.n_modes, opt.steps, nullptr);
    double cost = 0.0;
    for (double v : st.c) cost += 0.5 * v * v;
    return std::make_pair(cost, rho_spectral_projection(st));
  };

  OptRun run{{}, {}, u, 0.0, 0.0, 0.0, false, 0};
  AdjointGradient ag = adjoint_gradient(opt.nu, u, y0, T, opt.n_modes, opt.steps);
  run.cost = ag.cost;
  run.rho_projection = ag.rho_projection;
  run.cost_history.push_back(ag.cost);
  run.proj_history.push_back(ag.rho_projection);

  double stp = 1.0;
  for (int it = 0; it < iterations; ++it) {
    // L2 gradient direction: dJ/du_i divided by the cell width
    double gnorm_sq = 0.0;
    for (double g : ag.g_cells) gnorm_sq += g * g;
    if (gnorm_sq <= 1e-32) break;  // critical point (the delta = 0 start)

    bool moved = false;
    for (int halve = 0; halve <= 30; ++halve) {
      Control cand = run.u;
      for (int i = 0; i < cand.cells(); ++i) cand.u[i] -= stp * ag.g_cells[i] / cell_h;
      project_ball(cand);
      double predicted = 0.0;
      for (int i = 0; i < cand.cells(); ++i)
        predicted += ag.g_cells[i] * (cand.u[i] - run.u.u[i]);
      double cost, proj;
      try {
        std::tie(cost, proj) = evaluate(cand);
      } catch (const blowup_error&) {
        stp *= 0.5;
        continue;
      }
      const bool ok = predicted < 0.0 ? cost <= run.cost + 1e-4 * predicted
                                      : cost < run.cost;
      if (ok) {
        run.u = std::move(cand);
        run.cost = cost;
        run.rho_projection = proj;
        run.cost_history.push_back(cost);
        run.proj_history.push_back(proj);
        ++run.accepted;
        stp = std::min(stp * 2.0, 1e8);
        moved = true;
        break;
      }
      stp *= 0.5;
    }
    if (!moved) {
      run.stalled = true;
      break;
    }
    ag = adjoint_gradient(opt.nu, run.u, y0, T, opt.n_modes, opt.steps);
  }
  run.final_l2 = std::sqrt(2.0 * run.cost);
  return run;
}

struct MomentControl {
  Control u;
  double gram_condition = 0.0;
  double predicted_residual = 0.0;
};

// Minimal-L2 piecewise-constant control steering prescribed odd-index sine
// modes of a_t - eps a_xx = u(t) to their targets at time T. Even-index modes
// have zero source coefficient and are untouchable (and untouched). The
// moment matrix row for mode n integrates the semigroup over each cell:
//   B_{n,i} = m_n (e^{-lam_n (T - t_{i+1})} - e^{-lam_n (T - t_i)}) / lam_n.
// Targets are met through the pseudoinverse; a residual beyond tolerance
// after thresholding tiny singular values means the moment problem is
// numerically unsolvable and raises conditioning_error.
inline MomentControl even_mode_control(double eps, double T,
                                       const std::vector<std::pair<int, double>>& targets,
                                       int n_ctrl, const std::vector<double>& a0 = {}) {
  require(eps > 0.0 && T > 0.0, "even_mode_control: need eps > 0 and T > 0");
  require(n_ctrl >= 1, "even_mode_control: need at least one control cell");
  require(!targets.empty(), "even_mode_control: no targets given");
  for (const auto& [n, tv] : targets) {
    (void)tv;
    require(n >= 1 && n % 2 == 1, "even_mode_control: targets must name odd-index modes");
  }

  const int K = static_cast<int>(targets.size());
  Eigen::MatrixXd B(K, n_ctrl);
  Eigen::VectorXd r(K);
  const double h = T / n_ctrl;
  for (int kk = 0; kk < K; ++kk) {
    const int n = targets[kk].first;
    const double lam = eps * n * n * kPi * kPi;
    const double mn = constant_source_coeff(n);
    for (int i = 0; i < n_ctrl; ++i) {
      const double t0 = i * h, t1 = (i + 1) * h;
      B(kk, i) = mn * (std::exp(-lam * (T - t1)) - std::exp(-lam * (T - t0))) / lam;
    }
    const double from = (n <= static_cast<int>(a0.size())) ? a0[n - 1] : 0.0;
    r(kk) = targets[kk].second - std::exp(-lam * T) * from;
  }

  Eigen::JacobiSVD<Eigen::MatrixXd> svd(B, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const auto& sv = svd.singularValues();
  const double smax = sv.size() > 0 ? sv(0) : 0.0;
  const double tol = 1e-12 * smax;
  double smin = smax;
  Eigen::VectorXd inv = Eigen::VectorXd::Zero(sv.size());
  for (int i = 0; i < sv.size(); ++i) {
    if (sv(i) > tol) {
      inv(i) = 1.0 / sv(i);
      smin = sv(i);
    }
  }
  Eigen::VectorXd sol =
      svd.matrixV() * inv.asDiagonal() * svd.matrixU().transpose() * r;

  MomentControl out{Control(std::vector<double>(sol.data(), sol.data() + n_ctrl), T),
                    0.0, 0.0};
  out.gram_condition = (smin > 0.0) ? (smax / smin) * (smax / smin) : 0.0;
  out.predicted_residual = (B * sol - r).cwiseAbs().maxCoeff();
  const double scale = std::max(1.0, r.cwiseAbs().maxCoeff());
  if (!(out.predicted_residual <= 1e-8 * scale))
    throw conditioning_error("even_mode_control: moment problem unsolvable, condition " +
                             std::to_string(out.gram_condition));
  return out;
}

}  // namespace driftlab
