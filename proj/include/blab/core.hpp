#pragma once

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <numeric>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <thread>
#include <vector>

namespace blab {

/// Failure classes. Each maps onto one CLI exit code.
enum class ErrorKind { config = 2, resource = 3, solver = 4 };

class Error : public std::runtime_error {
public:
  Error(ErrorKind kind, const std::string &what)
      : std::runtime_error(what), kind_(kind) {}
  ErrorKind kind() const noexcept { return kind_; }
  int exit_code() const noexcept { return static_cast<int>(kind_); }

private:
  ErrorKind kind_;
};

struct ConfigError : Error {
  explicit ConfigError(const std::string &w) : Error(ErrorKind::config, w) {}
};
struct ResourceError : Error {
  explicit ResourceError(const std::string &w)
      : Error(ErrorKind::resource, w) {}
};
struct SolverError : Error {
  explicit SolverError(const std::string &w) : Error(ErrorKind::solver, w) {}
};

//==============================================================================
// Exact rationals for exponent bookkeeping.

class Rational {
public:
  constexpr Rational() = default;
  constexpr Rational(std::int64_t n, std::int64_t d = 1) : num_(n), den_(d) {
    if (d == 0)
      throw ConfigError("rational with zero denominator");
    normalize();
  }

  constexpr std::int64_t num() const { return num_; }
  constexpr std::int64_t den() const { return den_; }
  double to_double() const {
    return static_cast<double>(num_) / static_cast<double>(den_);
  }

  friend constexpr Rational operator+(Rational a, Rational b) {
    return {a.num_ * b.den_ + b.num_ * a.den_, a.den_ * b.den_};
  }
  friend constexpr Rational operator-(Rational a, Rational b) {
    return {a.num_ * b.den_ - b.num_ * a.den_, a.den_ * b.den_};
  }
  friend constexpr Rational operator*(Rational a, Rational b) {
    return {a.num_ * b.num_, a.den_ * b.den_};
  }
  friend constexpr Rational operator/(Rational a, Rational b) {
    return {a.num_ * b.den_, a.den_ * b.num_};
  }
  constexpr Rational operator-() const { return {-num_, den_}; }

  friend constexpr bool operator==(Rational a, Rational b) {
    return a.num_ == b.num_ && a.den_ == b.den_;
  }
  friend constexpr auto operator<=>(Rational a, Rational b) {
    return a.num_ * b.den_ <=> b.num_ * a.den_;
  }

  std::string str() const {
    return den_ == 1 ? std::to_string(num_)
                     : std::to_string(num_) + "/" + std::to_string(den_);
  }

  /// Accepts "p/q", integers, and finite decimals ("0.55" -> 11/20).
  static Rational parse(std::string_view s) {
    auto bad = [&] { return ConfigError("not a rational: '" + std::string(s) + "'"); };
    auto to_int = [&](std::string_view t) {
      std::int64_t v = 0;
      auto [p, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
      if (ec != std::errc{} || p != t.data() + t.size() || t.empty())
        throw bad();
      return v;
    };
    if (auto slash = s.find('/'); slash != std::string_view::npos)
      return {to_int(s.substr(0, slash)), to_int(s.substr(slash + 1))};
    if (auto dot = s.find('.'); dot != std::string_view::npos) {
      auto ip = s.substr(0, dot);
      auto fp = s.substr(dot + 1);
      if (fp.size() > 15)
        throw bad();
      bool neg = !ip.empty() && ip.front() == '-';
      if (neg)
        ip.remove_prefix(1);
      std::int64_t scale = 1;
      for (std::size_t i = 0; i < fp.size(); ++i)
        scale *= 10;
      std::int64_t whole = ip.empty() ? 0 : to_int(ip);
      std::int64_t frac = fp.empty() ? 0 : to_int(fp);
      std::int64_t n = whole * scale + frac;
      return {neg ? -n : n, scale};
    }
    return {to_int(s), 1};
  }

private:
  constexpr void normalize() {
    if (den_ < 0) {
      num_ = -num_;
      den_ = -den_;
    }
    auto g = std::gcd(num_ < 0 ? -num_ : num_, den_);
    if (g > 1) {
      num_ /= g;
      den_ /= g;
    }
  }
  std::int64_t num_ = 0;
  std::int64_t den_ = 1;
};

//==============================================================================
// Summation. The reduction tree depends only on the input length, so results
// are bit-identical however the inputs were produced.

inline double pairwise_sum(std::span<const double> xs) {
  constexpr std::size_t leaf = 16;
  if (xs.size() <= leaf) {
    double s = 0.0;
    for (double x : xs)
      s += x;
    return s;
  }
  std::size_t half = xs.size() / 2;
  return pairwise_sum(xs.first(half)) + pairwise_sum(xs.subspan(half));
}

inline double pairwise_sum(const std::vector<double> &xs) {
  return pairwise_sum(std::span<const double>(xs));
}

//==============================================================================
// Threading. Work is split in contiguous static chunks; every index writes its
// own output slot, so the schedule never affects results.

inline std::atomic<int> &thread_count_setting() {
  static std::atomic<int> n{1};
  return n;
}
inline void set_thread_count(int n) { thread_count_setting() = std::max(1, n); }
inline int thread_count() { return thread_count_setting().load(); }

template <class F> void parallel_for(std::size_t n, F &&f) {
  int nt = std::min<std::size_t>(thread_count(), std::max<std::size_t>(n, 1));
  if (nt <= 1 || n < 1024) {
    for (std::size_t i = 0; i < n; ++i)
      f(i);
    return;
  }
  std::vector<std::jthread> pool;
  pool.reserve(nt);
  std::size_t chunk = (n + nt - 1) / nt;
  for (int t = 0; t < nt; ++t) {
    std::size_t lo = t * chunk, hi = std::min(n, lo + chunk);
    if (lo >= hi)
      break;
    pool.emplace_back([lo, hi, &f] {
      for (std::size_t i = lo; i < hi; ++i)
        f(i);
    });
  }
}

/// Upper limit on large allocations (shell tables, convolution grids).
/// BLAB_MEM_BUDGET_MB overrides the 1 GiB default.
inline std::atomic<std::size_t> &memory_budget_setting() {
  static std::atomic<std::size_t> b{[] {
    if (const char *e = std::getenv("BLAB_MEM_BUDGET_MB"))
      return static_cast<std::size_t>(std::strtoull(e, nullptr, 10)) << 20;
    return std::size_t{1} << 30;
  }()};
  return b;
}
inline std::size_t memory_budget() { return memory_budget_setting().load(); }
inline void set_memory_budget(std::size_t bytes) { memory_budget_setting() = bytes; }

inline void check_budget(std::size_t bytes, const std::string &what) {
  if (bytes > memory_budget())
    throw ResourceError(what + " needs " + std::to_string(bytes >> 20) +
                        " MiB, over the " + std::to_string(memory_budget() >> 20) +
                        " MiB budget; lower the cutoff or N");
}

//==============================================================================

inline constexpr double pi = 3.14159265358979323846;

/// sin(x)/x, accurate near 0.
inline double sinc(double x) {
  if (std::abs(x) < 1e-4) {
    double x2 = x * x;
    return 1.0 - x2 / 6.0 + x2 * x2 / 120.0;
  }
  return std::sin(x) / x;
}

/// Shortest round-trip decimal form; locale independent and deterministic.
inline std::string fmt_double(double x) {
  if (std::isnan(x))
    return "nan";
  if (std::isinf(x))
    return x > 0 ? "inf" : "-inf";
  char buf[64];
  auto [p, ec] = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, p);
}

} // namespace blab
