#pragma once
// Shared numeric helpers: constants, quadrature weights, least-squares slope
// fits, seeded random draws, and the error types used across the library.

#include <cmath>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

namespace driftlab {

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kSqrt2 = 1.41421356237309504880;

// Exact L^2 mass of the drift profile rho(x) = x^5/5 - x^4/2 + x^3/3 - x/30,
// int_0^1 rho^2 = 1/83160.
inline constexpr double kRhoL2Sq = 1.0 / 83160.0;

// Thrown when a solver produces non-finite values or violates its a-priori
// bound by a wide margin. Distinct from precondition violations
// (std::invalid_argument) so the command-line layer can map it to its own
// exit code.
struct blowup_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Ill-conditioned linear algebra (singular Gram matrices and the like).
struct conditioning_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

inline void require(bool cond, const std::string& what) {
  if (!cond) throw std::invalid_argument(what);
}

// Trapezoid rule on equispaced samples spanning the whole interval,
// f[0]..f[n-1] at spacing h.
inline double trapezoid(const std::vector<double>& f, double h) {
  if (f.size() < 2) return 0.0;
  double s = 0.5 * (f.front() + f.back());
  for (std::size_t i = 1; i + 1 < f.size(); ++i) s += f[i];
  return s * h;
}

// Composite Simpson rule; needs an odd sample count (even interval count).
inline double simpson(const std::vector<double>& f, double h) {
  require(f.size() >= 3 && f.size() % 2 == 1, "simpson: odd sample count required");
  double s = f.front() + f.back();
  for (std::size_t i = 1; i + 1 < f.size(); ++i) s += f[i] * (i % 2 == 1 ? 4.0 : 2.0);
  return s * h / 3.0;
}

// Least-squares slope of y against x. Used for the log-log rate fits.
inline double ls_slope(const std::vector<double>& x, const std::vector<double>& y) {
  require(x.size() == y.size() && x.size() >= 2, "ls_slope: need >= 2 points");
  const double n = static_cast<double>(x.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sx += x[i];
    sy += y[i];
    sxx += x[i] * x[i];
    sxy += x[i] * y[i];
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

inline double loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
  std::vector<double> lx(x.size()), ly(y.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    require(x[i] > 0 && y[i] > 0, "loglog_slope: positive data required");
    lx[i] = std::log(x[i]);
    ly[i] = std::log(y[i]);
  }
  return ls_slope(lx, ly);
}

// Centralised randomness so every experiment is reproducible from a seed.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}
  double normal() { return normal_(gen_); }
  double uniform() { return uniform_(gen_); }
  double uniform(double a, double b) { return a + (b - a) * uniform(); }

 private:
  std::mt19937_64 gen_;
  std::normal_distribution<double> normal_{0.0, 1.0};
  std::uniform_real_distribution<double> uniform_{0.0, 1.0};
};

}  // namespace driftlab
