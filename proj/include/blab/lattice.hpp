#pragma once

#include "blab/core.hpp"

#include <cstring>
#include <filesystem>
#include <fstream>
#include <limits>
#include <optional>

namespace blab {

/// Multiplicities r3(m) = #{n in Z^3 : |n|^2 = m} for 0 <= m <= max_norm2,
/// plus the list of occupied shells (m >= 1) in increasing order.
class ShellTable {
public:
  ShellTable() = default;

  std::int64_t max_norm2() const { return max_norm2_; }
  std::uint32_t r3(std::int64_t m) const {
    return (m < 0 || m > max_norm2_) ? 0u : counts_[static_cast<std::size_t>(m)];
  }
  /// Occupied nonzero shells.
  std::size_t size() const { return norms_.size(); }
  std::int64_t norm2(std::size_t i) const { return norms_[i]; }
  std::uint32_t multiplicity(std::size_t i) const { return r3(norms_[i]); }
  double radius(std::size_t i) const { return momentum(norms_[i]); }
  static double momentum(std::int64_t m) { return 2.0 * pi * std::sqrt(double(m)); }
  /// Largest |p| fully covered by the table.
  double max_momentum() const { return momentum(max_norm2_); }
  const std::vector<std::int64_t> &norms() const { return norms_; }

  static std::size_t bytes_needed(std::int64_t max_norm2) {
    // dense counts plus at most 5/6 of norms occupied
    return static_cast<std::size_t>(max_norm2 + 1) * (sizeof(std::uint32_t) + sizeof(std::int64_t));
  }

  static ShellTable build(std::int64_t max_norm2);
  static ShellTable from_counts(std::vector<std::uint32_t> counts);

  void save(const std::filesystem::path &file) const;
  static std::optional<ShellTable> load(const std::filesystem::path &file,
                                        std::int64_t max_norm2);

private:
  void index() {
    norms_.clear();
    for (std::size_t m = 1; m < counts_.size(); ++m)
      if (counts_[m])
        norms_.push_back(static_cast<std::int64_t>(m));
  }

  std::int64_t max_norm2_ = 0;
  std::vector<std::uint32_t> counts_;
  std::vector<std::int64_t> norms_;
};

/// Enumerate 0 <= a <= b <= c only and weight each point by its orbit under
/// sign changes and coordinate permutations.
inline ShellTable ShellTable::build(std::int64_t max_norm2) {
  if (max_norm2 < 1)
    throw ConfigError("build_shells: max_norm2 must be >= 1");
  check_budget(bytes_needed(max_norm2), "shell table");
  const auto cmax = static_cast<std::int64_t>(std::sqrt(double(max_norm2))) + 1;
  // Integer counts: per-thread partial arrays merge exactly.
  int nt = std::max(1, thread_count());
  std::vector<std::vector<std::uint32_t>> part(
      nt, std::vector<std::uint32_t>(static_cast<std::size_t>(max_norm2) + 1, 0));
  auto visit_c = [&](std::int64_t c, std::vector<std::uint32_t> &cnt) {
    for (std::int64_t b = 0; b <= c; ++b) {
      std::int64_t bc = b * b + c * c;
      if (bc > max_norm2)
        break;
      for (std::int64_t a = 0; a <= b; ++a) {
        std::int64_t m = a * a + bc;
        if (m > max_norm2)
          break;
        int nz = (a != 0) + (b != 0) + (c != 0);
        std::uint32_t perms = (a == b && b == c) ? 1 : (a == b || b == c) ? 3 : 6;
        cnt[static_cast<std::size_t>(m)] += perms << nz;
      }
    }
  };
  {
    std::vector<std::jthread> pool;
    for (int t = 0; t < nt; ++t)
      pool.emplace_back([&, t] {
        for (std::int64_t c = t; c <= cmax; c += nt)
          visit_c(c, part[t]);
      });
  }
  for (int t = 1; t < nt; ++t)
    for (std::size_t m = 0; m < part[0].size(); ++m)
      part[0][m] += part[t][m];
  ShellTable s;
  s.max_norm2_ = max_norm2;
  s.counts_ = std::move(part[0]);
  s.index();
  return s;
}

inline ShellTable ShellTable::from_counts(std::vector<std::uint32_t> counts) {
  ShellTable s;
  s.max_norm2_ = static_cast<std::int64_t>(counts.size()) - 1;
  s.counts_ = std::move(counts);
  s.index();
  return s;
}

namespace detail {
inline constexpr char shell_magic[8] = {'B', 'L', 'A', 'B', 'S', 'H', 'L', '\0'};
inline constexpr std::uint32_t shell_version = 1;
} // namespace detail

inline void ShellTable::save(const std::filesystem::path &file) const {
  std::filesystem::create_directories(file.parent_path());
  auto tmp = file;
  tmp += ".tmp" + std::to_string(std::hash<std::thread::id>{}(std::this_thread::get_id()));
  {
    std::ofstream out(tmp, std::ios::binary);
    out.write(detail::shell_magic, 8);
    out.write(reinterpret_cast<const char *>(&detail::shell_version), 4);
    out.write(reinterpret_cast<const char *>(&max_norm2_), 8);
    out.write(reinterpret_cast<const char *>(counts_.data()),
              static_cast<std::streamsize>(counts_.size() * sizeof(std::uint32_t)));
    if (!out)
      throw ResourceError("cannot write shell cache " + tmp.string());
  }
  std::filesystem::rename(tmp, file);
}

inline std::optional<ShellTable> ShellTable::load(const std::filesystem::path &file,
                                                  std::int64_t max_norm2) {
  std::ifstream in(file, std::ios::binary);
  if (!in)
    return std::nullopt;
  char magic[8];
  std::uint32_t ver = 0;
  std::int64_t m = 0;
  in.read(magic, 8);
  in.read(reinterpret_cast<char *>(&ver), 4);
  in.read(reinterpret_cast<char *>(&m), 8);
  if (!in || std::memcmp(magic, detail::shell_magic, 8) != 0 ||
      ver != detail::shell_version || m != max_norm2)
    return std::nullopt;
  std::vector<std::uint32_t> counts(static_cast<std::size_t>(m) + 1);
  in.read(reinterpret_cast<char *>(counts.data()),
          static_cast<std::streamsize>(counts.size() * sizeof(std::uint32_t)));
  if (!in)
    return std::nullopt;
  return from_counts(std::move(counts));
}

/// Build, or reuse the copy cached under $BLAB_CACHE_DIR.
inline ShellTable build_shells(std::int64_t max_norm2) {
  const char *dir = std::getenv("BLAB_CACHE_DIR");
  if (!dir || !*dir)
    return ShellTable::build(max_norm2);
  std::filesystem::path f =
      std::filesystem::path(dir) / ("shells_" + std::to_string(max_norm2) + ".bin");
  if (auto t = ShellTable::load(f, max_norm2))
    return std::move(*t);
  auto t = ShellTable::build(max_norm2);
  try {
    t.save(f);
  } catch (const std::exception &) {
    // an unwritable cache only costs time
  }
  return t;
}

//==============================================================================
// Tails. Beyond the table the summand is bounded by an envelope c |p|^{-s}
// measured on the last octave; the lattice sum past P is then at most
// (2 pi)^{-3} \int_{|k| > P - sqrt(3) pi} c |k|^{-s} d^3k.

struct TailModel {
  double c = 0.0;
  double s = 0.0;
  double cutoff = 0.0; ///< |p| at the table edge

  static constexpr double lattice_offset = 1.7320508075688772 * pi;

  double bound() const {
    if (c == 0.0)
      return 0.0;
    if (!(s > 3.0))
      return std::numeric_limits<double>::infinity();
    double r = cutoff - lattice_offset;
    return c * 4.0 * pi * std::pow(r, 3.0 - s) / ((s - 3.0) * std::pow(2.0 * pi, 3.0));
  }

  /// Fit from samples (|p|, |f(p)|) with |p| in the last octave [P/2, P].
  static TailModel fit(const std::vector<std::pair<double, double>> &pts, double cutoff) {
    TailModel t;
    t.cutoff = cutoff;
    constexpr int nbins = 8;
    double lo = 0.5 * cutoff;
    std::vector<double> bmax(nbins, 0.0), bp(nbins, 0.0);
    for (auto [p, v] : pts) {
      if (p < lo || !(v > 0.0))
        continue;
      int b = std::min(nbins - 1, int(nbins * std::log2(p / lo)));
      if (v > bmax[b]) {
        bmax[b] = v;
        bp[b] = p;
      }
    }
    std::vector<double> xs, ys;
    for (int b = 0; b < nbins; ++b)
      if (bmax[b] > 0.0) {
        xs.push_back(std::log(bp[b]));
        ys.push_back(std::log(bmax[b]));
      }
    if (xs.empty())
      return t;
    if (xs.size() < 2) {
      t.s = 0.0; // cannot tell; report an unbounded tail
      t.c = bmax[0] + 1.0;
      return t;
    }
    double mx = 0, my = 0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
      mx += xs[i];
      my += ys[i];
    }
    mx /= xs.size();
    my /= ys.size();
    double sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
      sxx += (xs[i] - mx) * (xs[i] - mx);
      sxy += (xs[i] - mx) * (ys[i] - my);
    }
    t.s = -sxy / sxx;
    for (auto [p, v] : pts)
      if (p >= lo)
        t.c = std::max(t.c, v * std::pow(p, t.s));
    return t;
  }
};

/// Tail bound from the summand itself, g(|p|) on continuous |p|. With the
/// decreasing majorant env(u) = sup_{u' >= u} |g(u')| every lattice point
/// past P is dominated on its cell, giving
///   tail <= (2 pi^2)^{-1} \int_{P - 2 delta}^inf (u + delta)^2 env(u) du.
/// env is sampled up to 16 P; beyond that a power law fitted on [4P, 16P].
template <class G> double majorant_tail(G &&g, double P) {
  constexpr double delta = TailModel::lattice_offset;
  const double u0 = std::max(0.0, P - 2.0 * delta), u1 = 16.0 * P;
  const std::size_t n = 16000;
  const double h = (u1 - u0) / n;
  std::vector<double> env(n + 1);
  parallel_for(n + 1, [&](std::size_t i) { env[i] = std::abs(g(u0 + h * i)); });
  std::vector<std::pair<double, double>> far;
  for (std::size_t i = 0; i <= n; ++i) {
    double u = u0 + h * i;
    if (u >= 4.0 * P)
      far.emplace_back(u, env[i]);
  }
  for (std::size_t i = n; i-- > 0;)
    env[i] = std::max(env[i], env[i + 1]);
  std::vector<double> pieces(n);
  for (std::size_t i = 0; i < n; ++i) {
    double a = u0 + h * i + delta, b = a + h;
    pieces[i] = env[i] * (b * b * b - a * a * a) / 3.0;
  }
  double body = pairwise_sum(pieces);
  // Power-law remainder: 4 log bins on [4P, 16P], each wider than the
  // oscillation scale of the kernels in use.
  TailModel far_model;
  {
    std::vector<double> bx, by;
    for (int b = 0; b < 4; ++b) {
      double lo = 4.0 * P * std::pow(2.0, 0.5 * b), hi = lo * std::sqrt(2.0);
      double mx = 0, px = 0;
      for (auto [u, v] : far)
        if (u >= lo && u < hi && v > mx) {
          mx = v;
          px = u;
        }
      if (mx > 0) {
        bx.push_back(std::log(px));
        by.push_back(std::log(mx));
      }
    }
    if (bx.size() >= 2) {
      double mx = 0, my = 0;
      for (std::size_t i = 0; i < bx.size(); ++i) {
        mx += bx[i] / bx.size();
        my += by[i] / by.size();
      }
      double sxx = 0, sxy = 0;
      for (std::size_t i = 0; i < bx.size(); ++i) {
        sxx += (bx[i] - mx) * (bx[i] - mx);
        sxy += (bx[i] - mx) * (by[i] - my);
      }
      far_model.s = -sxy / sxx;
      for (auto [u, v] : far)
        if (u >= 8.0 * P)
          far_model.c = std::max(far_model.c, v * std::pow(u, far_model.s));
    } else if (!bx.empty()) {
      far_model.c = 1.0; // isolated nonzero samples: treat as undecided
    }
  }
  double rest = 0.0;
  if (far_model.c > 0.0) {
    if (!(far_model.s > 3.0))
      return std::numeric_limits<double>::infinity();
    double k = 1.0 + delta / u1;
    rest = k * k * far_model.c * std::pow(u1, 3.0 - far_model.s) / (far_model.s - 3.0);
  }
  return (body + rest) / (2.0 * pi * pi);
}

struct SumResult {
  double value = 0.0;
  double tail = 0.0;
};

/// Sum of f(i) * r3 over the shells i with keep(i), in shell order with a
/// fixed pairwise tree. With `tail` set the region is taken to extend past the
/// table and a TailModel bound is attached.
template <class F, class Keep>
SumResult radial_sum(const ShellTable &shells, F &&f, Keep &&keep, bool tail) {
  const std::size_t n = shells.size();
  std::vector<double> per(n, 0.0);
  std::vector<char> in(n, 0);
  parallel_for(n, [&](std::size_t i) {
    if (keep(i)) {
      in[i] = 1;
      per[i] = f(i);
    }
  });
  std::vector<double> terms;
  terms.reserve(n);
  for (std::size_t i = 0; i < n; ++i)
    if (in[i]) {
      if (!std::isfinite(per[i]))
        throw SolverError("radial_sum: non-finite summand at |n|^2=" +
                          std::to_string(shells.norm2(i)));
      terms.push_back(per[i] * shells.multiplicity(i));
    }
  SumResult r;
  if (terms.empty())
    return r;
  r.value = pairwise_sum(terms);
  if (tail) {
    std::vector<std::pair<double, double>> pts;
    double P = shells.max_momentum();
    for (std::size_t i = 0; i < n; ++i)
      if (in[i] && shells.radius(i) >= 0.5 * P)
        pts.emplace_back(shells.radius(i), std::abs(per[i]));
    r.tail = TailModel::fit(pts, P).bound();
  }
  return r;
}

/// As above, with the tail bounded by majorant_tail of the continuous summand.
template <class F, class Keep, class G>
SumResult radial_sum(const ShellTable &shells, F &&f, Keep &&keep, G &&tail_fn) {
  SumResult r = radial_sum(shells, f, keep, false);
  r.tail = majorant_tail(tail_fn, shells.max_momentum());
  return r;
}

} // namespace blab
