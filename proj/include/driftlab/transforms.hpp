#pragma once
// Thin FFTW r2r wrappers with per-size plan caching.
//
// Conventions used throughout (h = 1/(n+1) for n interior nodes):
//   DST-I  (RODFT00, size n):  Y_k = 2 sum_j X_j sin(pi (j+1)(k+1)/(n+1))
//   DCT-I  (REDFT00, size n):  Y_k = X_0 + (-1)^k X_{n-1}
//                                    + 2 sum_{j=1}^{n-2} X_j cos(pi j k/(n-1))
// Both are unnormalised; callers apply the h-dependent scalings. Plans are
// created with FFTW_ESTIMATE so results do not depend on accumulated wisdom,
// and each cached plan owns its buffers (we copy in and out, which is noise
// compared to the transform itself).

#include <fftw3.h>

#include <map>
#include <vector>

#include "driftlab/common.hpp"

namespace driftlab {

namespace detail {

class R2RPlan {
 public:
  R2RPlan(int n, fftw_r2r_kind kind) : n_(n) {
    in_ = fftw_alloc_real(n);
    out_ = fftw_alloc_real(n);
    plan_ = fftw_plan_r2r_1d(n, in_, out_, kind, FFTW_ESTIMATE);
  }
  ~R2RPlan() {
    fftw_destroy_plan(plan_);
    fftw_free(in_);
    fftw_free(out_);
  }
  R2RPlan(const R2RPlan&) = delete;
  R2RPlan& operator=(const R2RPlan&) = delete;

  void execute(const double* src, double* dst) {
    for (int i = 0; i < n_; ++i) in_[i] = src[i];
    fftw_execute(plan_);
    for (int i = 0; i < n_; ++i) dst[i] = out_[i];
  }

 private:
  int n_;
  double* in_;
  double* out_;
  fftw_plan plan_;
};

inline R2RPlan& cached_plan(int n, fftw_r2r_kind kind) {
  static std::map<std::pair<int, int>, R2RPlan> cache;
  auto key = std::make_pair(n, static_cast<int>(kind));
  auto it = cache.find(key);
  if (it == cache.end()) {
    it = cache.emplace(std::piecewise_construct, std::forward_as_tuple(key),
                       std::forward_as_tuple(n, kind)).first;
  }
  return it->second;
}

}  // namespace detail

// In-place-safe DST-I of the n interior samples.
inline void dst_i(const std::vector<double>& src, std::vector<double>& dst) {
  require(!src.empty(), "dst_i: empty input");
  dst.resize(src.size());
  detail::cached_plan(static_cast<int>(src.size()), FFTW_RODFT00)
      .execute(src.data(), dst.data());
}

// DCT-I over src including both endpoint samples (size >= 3).
inline void dct_i(const std::vector<double>& src, std::vector<double>& dst) {
  require(src.size() >= 3, "dct_i: need >= 3 samples");
  dst.resize(src.size());
  detail::cached_plan(static_cast<int>(src.size()), FFTW_REDFT00)
      .execute(src.data(), dst.data());
}

}  // namespace driftlab
