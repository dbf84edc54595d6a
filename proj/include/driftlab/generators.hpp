#pragma once
// The six-generator split of the kernel integrand. For fixed (t, s1, s2)
// with s1, s2 <= t, write erf_i = erf(x/sqrt(4 eps (t-s_i))) and
// H_i = G(t-s_i, .) - erf_i. On (0, 1/2):
//   A1 = int rho_x(0) (erf_1 erf_2 - 1)
//   A2 = int (rho_x - rho_x(0)) (erf_1 erf_2 - 1)
//   A3 = int eps phi_x(1-t, .) (erf_1 erf_2 - 1)
//   A4 = int Phi_x(1-t, .) H_1 erf_2
//   A5 = int Phi_x(1-t, .) H_2 erf_1
//   A6 = int Phi_x(1-t, .) H_1 H_2
// and the total A = int_0^{1/2} Phi_x G_1 G_2, evaluated here as half the
// integral over (0,1) (the integrand is even about x = 1/2). Since
// eps phi_x = Phi_x - rho_x and H = G - erf are both formed by subtraction,
// the G-dependent parts of the sum telescope exactly and
//   sum_i A_i - A = -quadrature(int_0^{1/2} Phi_x dx),
// which vanishes analytically (Phi = 0 at x = 0 and x = 1/2), so the
// decomposition identity holds to quadrature precision at every triple.
//
// erf_identity is the closed form int_0^inf (1 - erf(ax)erf(bx)) dx =
// sqrt(a^2+b^2)/(a b sqrt(pi)); it gives the eps->0 limit of A1.

#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <vector>

#include "driftlab/common.hpp"
#include "driftlab/greens.hpp"
#include "driftlab/phi.hpp"
#include "driftlab/rho.hpp"

namespace driftlab {

inline constexpr int kGeneratorTotal = 0;

inline double erf_identity(double alpha, double beta) {
  require(alpha > 0 && beta > 0, "erf_identity: positive rates required");
  return std::sqrt(alpha * alpha + beta * beta) / (alpha * beta * std::sqrt(kPi));
}

// Holds the Simpson grid on (0,1) and the mode table of Phi_x for one eps.
// The half grid (0,1/2) is the first half of the full grid by construction.
class GeneratorWorkspace {
 public:
  explicit GeneratorWorkspace(double eps, int intervals = 4000)
      : eps_(eps), n_full_(intervals + 1), n_half_(intervals / 2 + 1), h_(1.0 / intervals) {
    require(eps > 0, "GeneratorWorkspace: eps > 0");
    require(intervals >= 8 && intervals % 4 == 0, "GeneratorWorkspace: intervals divisible by 4");
    xs_.resize(n_full_);
    for (int j = 0; j < n_full_; ++j) xs_[j] = j * h_;
    rho_x_.resize(n_half_);
    for (int j = 0; j < n_half_; ++j) rho_x_[j] = rho_eval(xs_[j], 1);
    table_ = std::make_unique<PhiXTable>(eps, xs_);
    last_t_ = -1.0;
  }

  double eps() const { return eps_; }

  // which: 1..6 for the generators, kGeneratorTotal for A itself.
  double value(double t, double s1, double s2, int which) {
    require(which >= 0 && which <= 6, "generator: which in {total,1..6}");
    require(t > 0 && t <= 1 && s1 >= 0 && s2 >= 0, "generator: 0 <= s_i, 0 < t <= 1");
    require(t >= s1 && t >= s2, "generator: t below max(s1,s2) rejected");

    if (which == kGeneratorTotal) {
      phi_row(1.0 - t);
      row(t - s1, g1_, /*full=*/true);
      row(t - s2, g2_, /*full=*/true);
      f_.resize(n_full_);
      for (int j = 0; j < n_full_; ++j) f_[j] = phix_[j] * g1_[j] * g2_[j];
      return 0.5 * simpson(f_, h_);
    }

    f_.assign(n_half_, 0.0);
    if (which <= 3) {
      erf_row(t - s1, e1_);
      erf_row(t - s2, e2_);
      if (which == 1) {
        const double c = rho_eval(0.0, 1);
        for (int j = 0; j < n_half_; ++j) f_[j] = c * (e1_[j] * e2_[j] - 1.0);
      } else if (which == 2) {
        const double c = rho_eval(0.0, 1);
        for (int j = 0; j < n_half_; ++j) f_[j] = (rho_x_[j] - c) * (e1_[j] * e2_[j] - 1.0);
      } else {
        phi_row(1.0 - t);
        for (int j = 0; j < n_half_; ++j)
          f_[j] = (phix_[j] - rho_x_[j]) * (e1_[j] * e2_[j] - 1.0);
      }
    } else {
      phi_row(1.0 - t);
      if (which == 4 || which == 6) {
        row(t - s1, g1_, /*full=*/false);
        erf_row(t - s1, e1_);
      }
      if (which == 5 || which == 6) {
        row(t - s2, g2_, /*full=*/false);
        erf_row(t - s2, e2_);
      }
      if (which == 4) {
        erf_row(t - s2, e2_);
        for (int j = 0; j < n_half_; ++j) f_[j] = phix_[j] * (g1_[j] - e1_[j]) * e2_[j];
      } else if (which == 5) {
        erf_row(t - s1, e1_);
        for (int j = 0; j < n_half_; ++j) f_[j] = phix_[j] * (g2_[j] - e2_[j]) * e1_[j];
      } else {
        for (int j = 0; j < n_half_; ++j)
          f_[j] = phix_[j] * (g1_[j] - e1_[j]) * (g2_[j] - e2_[j]);
      }
    }
    return simpson(f_, h_);
  }

 private:
  void phi_row(double tau) {
    if (tau == last_t_ && !phix_.empty()) return;
    table_->eval(tau, phix_);
    last_t_ = tau;
  }
  // G(dt, .) over the full or half grid
  void row(double dt, std::vector<double>& out, bool full) {
    if (full) {
      elementary_G_row(eps_, dt, xs_, out);
      return;
    }
    half_view_.assign(xs_.begin(), xs_.begin() + n_half_);
    elementary_G_row(eps_, dt, half_view_, out);
  }
  void erf_row(double dt, std::vector<double>& out) {
    out.resize(n_half_);
    if (dt == 0.0) {
      // dt -> 0 limit of the collapsed boundary layer; the constant 1 keeps
      // the limiting integrands continuous down to x = 0, so the generators
      // vanish identically at coincident arguments
      for (int j = 0; j < n_half_; ++j) out[j] = 1.0;
      return;
    }
    const double s = std::sqrt(4.0 * eps_ * dt);
    for (int j = 0; j < n_half_; ++j) out[j] = std::erf(xs_[j] / s);
  }

  double eps_;
  int n_full_, n_half_;
  double h_;
  std::vector<double> xs_, rho_x_;
  std::unique_ptr<PhiXTable> table_;
  double last_t_;
  std::vector<double> phix_, g1_, g2_, e1_, e2_, f_, half_view_;
};

// Convenience entry point with a per-eps workspace cache (the mode table is
// expensive to rebuild).
inline double generator_A(double eps, double t, double s1, double s2, int which) {
  static std::mutex mu;
  static std::map<double, std::unique_ptr<GeneratorWorkspace>> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto it = cache.find(eps);
  if (it == cache.end())
    it = cache.emplace(eps, std::make_unique<GeneratorWorkspace>(eps)).first;
  return it->second->value(t, s1, s2, which);
}

}  // namespace driftlab
