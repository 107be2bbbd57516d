#pragma once

#include "blab/lattice.hpp"
#include "blab/params.hpp"
#include "blab/potential.hpp"

#include <array>

namespace blab {

using IVec = std::array<int, 3>;

struct SupKernelResult {
  std::vector<IVec> shifts;
  std::vector<double> ratio; ///< (1/N) sum_{r != s} N^k Vhat(r/N^{1-k}) / |r - s|^2
  std::vector<double> tail;  ///< bound on the omitted |r| > cutoff part, same units
  int cutoff = 0;            ///< integer radius of the summation ball
  double sup() const { return ratio.empty() ? 0.0 : *std::max_element(ratio.begin(), ratio.end()); }
};

/// Shifts along the axis, face and body diagonals, from 0 out to 1.5 N^{1-k} R.
inline std::vector<IVec> default_shifts(const ScalingParams &prm, double R) {
  std::vector<IVec> s{{0, 0, 0}};
  double reach = 1.5 * prm.scale() * R / (2.0 * pi);
  for (double k = 1.0; k <= reach; k *= 2.0) {
    int n = int(std::lround(k));
    s.push_back({n, 0, 0});
    s.push_back({n, n, 0});
    s.push_back({n, n, n});
  }
  int n = std::max(1, int(std::lround(reach)));
  s.push_back({n, 0, 0});
  return s;
}

inline SupKernelResult sup_kernel_bound(const ScalingParams &prm, const Potential &pot,
                                        std::vector<IVec> shifts = {},
                                        double cutoff_factor = 6.0) {
  if (shifts.empty())
    shifts = default_shifts(prm, pot.radius());
  const double S = prm.scale(), nk = prm.n_kappa();
  const int K = int(std::ceil(cutoff_factor * S / (2.0 * pi)));
  const std::int64_t K2 = std::int64_t(K) * K;
  check_budget(std::size_t(K2 + 1) * sizeof(double), "sup-kernel table");
  SupKernelResult out;
  out.cutoff = K;
  out.shifts = shifts;
  if (pot.is_zero()) {
    out.ratio.assign(shifts.size(), 0.0);
    out.tail.assign(shifts.size(), 0.0);
    return out;
  }
  const double P = ShellTable::momentum(K2);
  FourierHat vh(pot, 16.0 * P / S);
  std::vector<double> w(std::size_t(K2) + 1);
  parallel_for(w.size(), [&](std::size_t m) { w[m] = nk * vh(ShellTable::momentum(std::int64_t(m)) / S); });
  for (const auto &s : shifts) {
    const double smag = 2.0 * pi * std::sqrt(double(s[0]) * s[0] + double(s[1]) * s[1] + double(s[2]) * s[2]);
    // one partial sum per x-slab, combined in slab order
    std::vector<double> slab(2 * std::size_t(K) + 1, 0.0);
    auto run = [&](std::size_t ix) {
      int x = int(ix) - K;
      std::vector<double> t;
      for (int y = -K; y <= K; ++y)
        for (int z = -K; z <= K; ++z) {
          std::int64_t m = std::int64_t(x) * x + std::int64_t(y) * y + std::int64_t(z) * z;
          if (m > K2)
            continue;
          double dx = x - s[0], dy = y - s[1], dz = z - s[2];
          double d2 = dx * dx + dy * dy + dz * dz;
          if (d2 == 0.0)
            continue;
          t.push_back(w[std::size_t(m)] / (4.0 * pi * pi * d2));
        }
      slab[ix] = pairwise_sum(t);
    };
    if (thread_count() > 1) {
      std::vector<std::jthread> pool;
      int nt = thread_count();
      for (int t = 0; t < nt; ++t)
        pool.emplace_back([&, t] {
          for (std::size_t ix = t; ix < slab.size(); ix += nt)
            run(ix);
        });
    } else {
      for (std::size_t ix = 0; ix < slab.size(); ++ix)
        run(ix);
    }
    out.ratio.push_back(pairwise_sum(slab) / prm.n);
    double tl = majorant_tail(
        [&](double u) {
          double d = std::max(u - smag, 0.5 * u);
          return nk * vh(u / S) / (d * d);
        },
        P);
    out.tail.push_back(tl / prm.n);
  }
  return out;
}

} // namespace blab
