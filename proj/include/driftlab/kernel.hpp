#pragma once
// The quadratic-form kernel of the controlled second-order drift:
//   K(s1,s2) = (1/2) int_{max(s1,s2)}^1 int_0^1 Phi_x(1-t,x) G(t-s1,x) G(t-s2,x) dx dt,
// its closed-form small-viscosity limit
//   K0(s1,s2) = (2-s1-s2)^{3/2} - |s1-s2|^{3/2},
// and the residual between the two. Kernel matrices are sampled at cell
// midpoints s_i = (i-1/2)/M, the same nodes piecewise-constant controls use.

#include <Eigen/Dense>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "driftlab/common.hpp"
#include "driftlab/greens.hpp"
#include "driftlab/phi.hpp"

namespace driftlab {

struct KernelMatrix {
  std::vector<double> nodes;  // s-grid, cell midpoints in (0,1)
  Eigen::MatrixXd values;
  double eps = 0.0;          // 0 marks the asymptotic kernel
  int quad_resolution = 0;   // t-nodes actually used (0 for closed form)
  int size() const { return static_cast<int>(nodes.size()); }
  bool asymptotic() const { return eps == 0.0; }
};

inline double K0_value(double s1, double s2) {
  require(s1 >= 0 && s1 <= 1 && s2 >= 0 && s2 <= 1, "K0_value: s in [0,1]");
  return std::pow(2.0 - s1 - s2, 1.5) - std::pow(std::fabs(s1 - s2), 1.5);
}

inline std::vector<double> kernel_nodes(int cells) {
  require(cells >= 2, "kernel nodes: M >= 2");
  std::vector<double> s(cells);
  for (int i = 0; i < cells; ++i) s[i] = (i + 0.5) / cells;
  return s;
}

inline KernelMatrix assemble_K0(int cells) {
  KernelMatrix k;
  k.nodes = kernel_nodes(cells);
  k.values.resize(cells, cells);
  for (int i = 0; i < cells; ++i)
    for (int j = 0; j <= i; ++j) {
      const double v = K0_value(k.nodes[i], k.nodes[j]);
      k.values(i, j) = v;
      k.values(j, i) = v;
    }
  return k;
}

// Tensor trapezoid assembly of the viscous kernel. The t-grid is the
// requested resolution rounded up to a multiple of 2M so that every node
// s_i = (2i-1)/(2M) lands exactly on a t-node; the x-grid uses the same
// resolution count of interior points (the integrand vanishes at both
// walls, so interior sums are the full trapezoid rule). The t-loop runs
// outermost: each Phi_x row is computed once and every Greens row G(t-s_i)
// once, then all active pairs accumulate a weighted dot product.
inline KernelMatrix assemble_K_eps(double eps, int cells, int quad_resolution = 400) {
  require(eps > 0, "assemble_K_eps: eps > 0");
  require(cells >= 2, "assemble_K_eps: M >= 2");
  require(quad_resolution >= 64, "assemble_K_eps: quadrature resolution below minimum (64)");

  const int stride = (quad_resolution + 2 * cells - 1) / (2 * cells);
  const int nt = stride * 2 * cells;  // t-nodes: k/nt, k=0..nt
  const int nx = quad_resolution;     // interior x-nodes
  const double ht = 1.0 / nt;
  const double hx = 1.0 / (nx + 1);

  std::vector<double> xs(nx);
  for (int j = 0; j < nx; ++j) xs[j] = (j + 1) * hx;

  KernelMatrix k;
  k.eps = eps;
  k.quad_resolution = nt;
  k.nodes = kernel_nodes(cells);
  k.values = Eigen::MatrixXd::Zero(cells, cells);

  PhiXTable phix(eps, xs);
  std::vector<double> w;                                   // Phi_x row * hx/2
  std::vector<std::vector<double>> g(cells), wg(cells);    // G rows, weighted G rows
  // t-node index of s_i is (2i+1)*stride for 0-based i
  auto node_of = [stride](int i) { return (2 * i + 1) * stride; };

  for (int kk = node_of(0); kk <= nt; ++kk) {
    // elapsed times by node-index differences so that t - s_i is exactly
    // zero on the node where the pair's interval opens
    phix.eval((nt - kk) * ht, w);
    for (int j = 0; j < nx; ++j) w[j] *= 0.5 * hx;

    int active = 0;
    while (active < cells && node_of(active) <= kk) ++active;
    for (int i = 0; i < active; ++i) {
      elementary_G_row(eps, (kk - node_of(i)) * ht, xs, g[i]);
      wg[i].resize(nx);
      for (int j = 0; j < nx; ++j) wg[i][j] = w[j] * g[i][j];
    }

    for (int i = 0; i < active; ++i)
      for (int j = 0; j <= i; ++j) {
        // trapezoid endpoints of the pair's t-interval [s_max, 1]
        double wt = ht;
        if (kk == node_of(i) || kk == nt) wt *= 0.5;
        double dot = 0.0;
        const double* a = wg[i].data();
        const double* b = g[j].data();
        for (int q = 0; q < nx; ++q) dot += a[q] * b[q];
        k.values(i, j) += wt * dot;
      }
  }
  for (int i = 0; i < cells; ++i)
    for (int j = i + 1; j < cells; ++j) k.values(i, j) = k.values(j, i);
  return k;
}

// R = K^eps - (sqrt(eps)/(45 sqrt(pi))) K0 at matched nodes.
inline KernelMatrix residual_matrix(double eps, int cells, int quad_resolution = 400) {
  KernelMatrix k = assemble_K_eps(eps, cells, quad_resolution);
  const KernelMatrix k0 = assemble_K0(cells);
  const double scale = std::sqrt(eps) / (45.0 * std::sqrt(kPi));
  k.values -= scale * k0.values;
  return k;
}

inline void save_kernel_csv(const KernelMatrix& k, const std::string& path) {
  std::ofstream out(path);
  require(out.good(), "save_kernel_csv: cannot open " + path);
  char buf[32];
  auto put = [&](double v, char sep) {
    std::snprintf(buf, sizeof buf, "%.17g%c", v, sep);
    out << buf;
  };
  out << k.size() << ",";
  put(k.eps, ',');
  out << k.quad_resolution << "\n";
  for (int i = 0; i < k.size(); ++i) put(k.nodes[i], i + 1 == k.size() ? '\n' : ',');
  for (int i = 0; i < k.size(); ++i)
    for (int j = 0; j < k.size(); ++j) put(k.values(i, j), j + 1 == k.size() ? '\n' : ',');
  require(out.good(), "save_kernel_csv: write failed for " + path);
}

inline KernelMatrix load_kernel_csv(const std::string& path) {
  std::ifstream in(path);
  require(in.good(), "load_kernel_csv: cannot open " + path);
  auto next_line = [&in, &path]() {
    std::string line;
    require(static_cast<bool>(std::getline(in, line)), "load_kernel_csv: truncated file " + path);
    return line;
  };
  auto split = [](const std::string& line) {
    std::vector<double> vals;
    std::stringstream ss(line);
    std::string tok;
    while (std::getline(ss, tok, ',')) vals.push_back(std::stod(tok));
    return vals;
  };
  const std::vector<double> header = split(next_line());
  require(header.size() == 3, "load_kernel_csv: malformed header");
  KernelMatrix k;
  const int m = static_cast<int>(header[0]);
  require(m >= 1, "load_kernel_csv: bad node count");
  k.eps = header[1];
  k.quad_resolution = static_cast<int>(header[2]);
  k.nodes = split(next_line());
  require(static_cast<int>(k.nodes.size()) == m, "load_kernel_csv: node row length mismatch");
  k.values.resize(m, m);
  for (int i = 0; i < m; ++i) {
    const std::vector<double> row = split(next_line());
    require(static_cast<int>(row.size()) == m, "load_kernel_csv: row length mismatch");
    for (int j = 0; j < m; ++j) k.values(i, j) = row[j];
  }
  return k;
}

}  // namespace driftlab
