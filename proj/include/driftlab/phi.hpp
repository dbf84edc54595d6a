#pragma once
// Backward weight Phi: the heat evolution of the observation polynomial rho,
//   Phi_t = eps Phi_xx, Phi(0,.) = rho.
// Only even sine modes are present (rho is odd about x = 1/2), so
//   Phi(tau,x)   = sum_{n even} rho_n e^{-eps n^2 pi^2 tau} sin(n pi x),
//   Phi_x(tau,x) = sum_{n even} -(48/(n pi)^4) e^{-eps n^2 pi^2 tau} cos(n pi x),
// with rho_n = -24 sqrt(2)/(n pi)^5. The first-order corrector is
//   phi = (Phi - rho)/eps,
// computed by subtraction so that eps*phi_x + rho_x reproduces Phi_x to the
// last bit, which the generator-sum identity relies on.

#include <cmath>
#include <vector>

#include "driftlab/common.hpp"
#include "driftlab/grids.hpp"
#include "driftlab/rho.hpp"
#include "driftlab/spectral.hpp"

namespace driftlab {

// Tabulated evaluation of Phi_x(tau, .) on a fixed x-grid. The cosine table
// is precomputed once; eval() truncates the mode sum adaptively in tau. At
// tau = 0 the series converges like n^-4 which is too slow, so the exact
// polynomial derivative rho_x is substituted there.
class PhiXTable {
 public:
  PhiXTable(double eps, std::vector<double> xs, int max_even_modes = 1200)
      : eps_(eps), xs_(std::move(xs)) {
    require(eps > 0, "PhiXTable: eps > 0 required");
    require(max_even_modes >= 2, "PhiXTable: need at least one even mode");
    for (int n = 2; n <= max_even_modes; n += 2) {
      const double npi = n * kPi;
      coeff_.push_back(-48.0 / (npi * npi * npi * npi));
      rate_.push_back(eps * npi * npi);
    }
    cos_table_.resize(coeff_.size() * xs_.size());
    for (std::size_t q = 0; q < coeff_.size(); ++q) {
      const int n = 2 * static_cast<int>(q) + 2;
      for (std::size_t j = 0; j < xs_.size(); ++j)
        cos_table_[q * xs_.size() + j] = std::cos(n * kPi * xs_[j]);
    }
  }

  const std::vector<double>& grid() const { return xs_; }

  void eval(double tau, std::vector<double>& out) const {
    out.assign(xs_.size(), 0.0);
    if (tau == 0.0) {
      for (std::size_t j = 0; j < xs_.size(); ++j) out[j] = rho_eval(xs_[j], 1);
      return;
    }
    require(tau > 0, "PhiXTable::eval: tau >= 0 required");
    for (std::size_t q = 0; q < coeff_.size(); ++q) {
      const double amp = coeff_[q] * std::exp(-rate_[q] * tau);
      if (std::fabs(amp) < 1e-17) break;
      const double* row = &cos_table_[q * xs_.size()];
      for (std::size_t j = 0; j < xs_.size(); ++j) out[j] += amp * row[j];
    }
  }

 private:
  double eps_;
  std::vector<double> xs_;
  std::vector<double> coeff_, rate_;
  std::vector<double> cos_table_;
};

struct PhiSolution {
  Field Phi;    // Phi(tau_k, x_i)
  Field Phi_x;  // derivative in x
  Field phi;    // (Phi - rho)/eps
};

// Dense-grid solve used by the verification suite; kernel assembly uses
// PhiXTable directly instead.
inline PhiSolution solve_Phi(double eps, const TimeGrid& tg, const SpaceGrid& sg,
                             int max_even_modes = 1200) {
  require(eps > 0, "solve_Phi: eps > 0 required");
  PhiSolution out;
  out.Phi = Field(tg, sg);
  out.Phi_x = Field(tg, sg);
  out.phi = Field(tg, sg);
  std::vector<double> rho_vals(sg.n_x);
  for (int i = 0; i < sg.n_x; ++i) rho_vals[i] = rho_eval(sg.node(i), 0);
  PhiXTable table(eps, sg.nodes(), max_even_modes);
  std::vector<double> phix_row;
  for (int k = 0; k <= tg.n_t; ++k) {
    const double tau = tg.node(k);
    table.eval(tau, phix_row);
    for (int i = 0; i < sg.n_x; ++i) {
      const double x = sg.node(i);
      double val = 0.0;
      if (tau == 0.0) {
        val = rho_vals[i];
      } else {
        for (int n = 2; n <= max_even_modes; n += 2) {
          const double amp = rho_coeff(n) * std::exp(-eps * n * n * kPi * kPi * tau);
          if (std::fabs(amp) < 1e-17) break;
          val += amp * std::sin(n * kPi * x);
        }
      }
      out.Phi.at(k, i) = val;
      out.Phi_x.at(k, i) = phix_row[i];
      out.phi.at(k, i) = (val - rho_vals[i]) / eps;
    }
  }
  return out;
}

}  // namespace driftlab
