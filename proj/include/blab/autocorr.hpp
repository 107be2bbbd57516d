#pragma once

#include "blab/core.hpp"

#include <fftw3.h>

#include <array>
#include <memory>
#include <mutex>

namespace blab {

/// Sum_{p,q} F(|p-q|^2) g(|p|^2) g(|q|^2) over integer vectors with
/// |p|, |q| <= K. g and F are given per integer norm^2.
struct ConvSum {
  double full = 0.0;     ///< with the diagonal p = q
  double diagonal = 0.0; ///< F(0) sum g^2
  double value() const { return full - diagonal; }
};

namespace detail {

inline std::mutex &fftw_plan_mutex() {
  static std::mutex m;
  return m;
}

/// Smallest n >= lo of the form 2^a 3^b 5^c 7^d.
inline std::size_t fft_size(std::size_t lo) {
  for (std::size_t n = std::max<std::size_t>(lo, 1);; ++n) {
    std::size_t m = n;
    for (std::size_t f : {2, 3, 5, 7})
      while (m % f == 0)
        m /= f;
    if (m == 1)
      return n;
  }
}

struct FftwFree {
  void operator()(void *p) const { fftw_free(p); }
};

} // namespace detail

inline std::size_t autocorr_grid_size(int K) { return detail::fft_size(4 * std::size_t(K) + 1); }

inline std::size_t autocorr_bytes(int K) {
  std::size_t L = autocorr_grid_size(K);
  return L * L * L * sizeof(double) + L * L * (L / 2 + 1) * sizeof(fftw_complex);
}

/// Autocorrelation of g on a zero-padded cube by real FFTs, then the
/// F-weighted sum. The padded side is >= 4K+1, so no wrap-around.
inline ConvSum autocorr_conv_sum(const std::vector<double> &g_by_m,
                                 const std::vector<double> &f_by_m, int K) {
  if (K < 1)
    throw ConfigError("autocorr: cutoff must be >= 1");
  const std::int64_t K2 = std::int64_t(K) * K;
  if (g_by_m.size() < std::size_t(K2) + 1 || f_by_m.size() < std::size_t(4 * K2) + 1)
    throw ConfigError("autocorr: weight tables do not cover the cutoff");
  check_budget(autocorr_bytes(K), "convolution grid (cutoff " + std::to_string(K) + ")");
  const std::size_t L = autocorr_grid_size(K), Lh = L / 2 + 1;
  const std::size_t nreal = L * L * L, ncplx = L * L * Lh;

  std::unique_ptr<double, detail::FftwFree> a(fftw_alloc_real(nreal));
  std::unique_ptr<fftw_complex, detail::FftwFree> c(fftw_alloc_complex(ncplx));
  if (!a || !c)
    throw ResourceError("autocorr: FFT buffer allocation failed");
  fftw_plan fwd, bwd;
  {
    std::lock_guard lock(detail::fftw_plan_mutex());
    int n = int(L);
    fwd = fftw_plan_dft_r2c_3d(n, n, n, a.get(), c.get(), FFTW_ESTIMATE);
    bwd = fftw_plan_dft_c2r_3d(n, n, n, c.get(), a.get(), FFTW_ESTIMATE);
  }
  auto wrap = [L](std::int64_t i) { return std::size_t(i < 0 ? i + std::int64_t(L) : i); };
  std::fill(a.get(), a.get() + nreal, 0.0);
  for (std::int64_t x = -K; x <= K; ++x)
    for (std::int64_t y = -K; y <= K; ++y)
      for (std::int64_t z = -K; z <= K; ++z) {
        std::int64_t m = x * x + y * y + z * z;
        if (m <= K2)
          a.get()[(wrap(x) * L + wrap(y)) * L + wrap(z)] = g_by_m[std::size_t(m)];
      }
  fftw_execute(fwd);
  for (std::size_t i = 0; i < ncplx; ++i) {
    double re = c.get()[i][0], im = c.get()[i][1];
    c.get()[i][0] = re * re + im * im;
    c.get()[i][1] = 0.0;
  }
  fftw_execute(bwd);
  {
    std::lock_guard lock(detail::fftw_plan_mutex());
    fftw_destroy_plan(fwd);
    fftw_destroy_plan(bwd);
  }
  // a now holds L^3 * C(d), C(d) = sum_p g_p g_{p+d}. Accumulate per |d|^2.
  const std::int64_t D = 2 * K, D2 = 4 * K2;
  std::vector<double> by_m(std::size_t(D2) + 1, 0.0);
  const double scale = 1.0 / double(nreal);
  for (std::int64_t x = -D; x <= D; ++x)
    for (std::int64_t y = -D; y <= D; ++y)
      for (std::int64_t z = -D; z <= D; ++z) {
        std::int64_t m = x * x + y * y + z * z;
        if (m <= D2)
          by_m[std::size_t(m)] += a.get()[(wrap(x) * L + wrap(y)) * L + wrap(z)] * scale;
      }
  std::vector<double> terms(by_m.size());
  for (std::size_t m = 0; m < by_m.size(); ++m)
    terms[m] = f_by_m[m] * by_m[m];
  ConvSum r;
  r.full = pairwise_sum(terms);
  std::vector<double> diag;
  for (std::int64_t x = -K; x <= K; ++x)
    for (std::int64_t y = -K; y <= K; ++y)
      for (std::int64_t z = -K; z <= K; ++z) {
        std::int64_t m = x * x + y * y + z * z;
        if (m <= K2)
          diag.push_back(g_by_m[std::size_t(m)] * g_by_m[std::size_t(m)]);
      }
  r.diagonal = f_by_m[0] * pairwise_sum(diag);
  return r;
}

/// Direct double sum, outer index restricted to 0 <= a <= b <= c and weighted
/// by its orbit size (the inner sum is invariant under the cube group).
inline ConvSum direct_conv_sum(const std::vector<double> &g_by_m,
                               const std::vector<double> &f_by_m, int K) {
  const std::int64_t K2 = std::int64_t(K) * K;
  std::vector<std::array<int, 3>> pts;
  std::vector<double> gv;
  for (int x = -K; x <= K; ++x)
    for (int y = -K; y <= K; ++y)
      for (int z = -K; z <= K; ++z) {
        std::int64_t m = std::int64_t(x) * x + std::int64_t(y) * y + std::int64_t(z) * z;
        if (m <= K2 && g_by_m[std::size_t(m)] != 0.0) {
          pts.push_back({x, y, z});
          gv.push_back(g_by_m[std::size_t(m)]);
        }
      }
  std::vector<std::array<int, 3>> outer;
  for (int c = 0; c <= K; ++c)
    for (int b = 0; b <= c; ++b)
      for (int a = 0; a <= b; ++a)
        if (std::int64_t(a) * a + std::int64_t(b) * b + std::int64_t(c) * c <= K2)
          outer.push_back({a, b, c});
  std::vector<double> per(outer.size(), 0.0);
  parallel_for(outer.size(), [&](std::size_t i) {
    auto [a, b, c] = outer[i];
    double gp = g_by_m[std::size_t(a * a + b * b + c * c)];
    if (gp == 0.0)
      return;
    std::vector<double> inner(pts.size());
    for (std::size_t j = 0; j < pts.size(); ++j) {
      std::int64_t dx = a - pts[j][0], dy = b - pts[j][1], dz = c - pts[j][2];
      inner[j] = f_by_m[std::size_t(dx * dx + dy * dy + dz * dz)] * gv[j];
    }
    int nz = (a != 0) + (b != 0) + (c != 0);
    int perms = (a == b && b == c) ? 1 : (a == b || b == c) ? 3 : 6;
    per[i] = double(perms << nz) * gp * pairwise_sum(inner);
  });
  ConvSum r;
  r.full = pairwise_sum(per);
  std::vector<double> diag(gv.size());
  for (std::size_t j = 0; j < gv.size(); ++j)
    diag[j] = gv[j] * gv[j];
  r.diagonal = f_by_m[0] * pairwise_sum(diag);
  return r;
}

} // namespace blab
