#pragma once

#include "blab/core.hpp"
#include "blab/quadrature.hpp"

#include <boost/math/tools/toms748_solve.hpp>

#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

namespace blab {

//==============================================================================
// Potential profiles. Lengths are in units of the unit box side.

/// V(r) = V0 on r < R.
struct SoftSphere {
  double v0 = 1.0;
  double radius = 1.0;
};

/// V(r) = V0 (1 - (r/R)^2)^3 on r < R; C^2 at the support edge.
struct Bump {
  double v0 = 1.0;
  double radius = 1.0;
};

/// Piecewise-linear profile through (r_i, V_i), zero beyond `radius`.
struct Tabulated {
  std::vector<double> r;
  std::vector<double> v;
  double radius = 0.0;
};

class Potential {
public:
  using Model = std::variant<SoftSphere, Bump, Tabulated>;

  Potential() : model_(SoftSphere{}) {}
  explicit Potential(Model m) : model_(std::move(m)) { validate(); }

  static Potential soft_sphere(double v0, double radius) {
    return Potential(SoftSphere{v0, radius});
  }
  static Potential bump(double v0, double radius) {
    return Potential(Bump{v0, radius});
  }
  static Potential tabulated(std::vector<double> r, std::vector<double> v,
                             double radius = -1.0) {
    Tabulated t{std::move(r), std::move(v), radius};
    if (t.radius < 0.0 && !t.r.empty())
      t.radius = t.r.back();
    return Potential(std::move(t));
  }

  /// Two-column CSV "r,V" (header line optional, '#' comments skipped).
  static Potential from_csv(const std::string &path) {
    std::ifstream in(path);
    if (!in)
      throw ConfigError("cannot open potential file '" + path + "'");
    std::vector<double> r, v;
    std::string line;
    while (std::getline(in, line)) {
      if (line.empty() || line[0] == '#')
        continue;
      std::replace(line.begin(), line.end(), ',', ' ');
      std::istringstream ss(line);
      double a, b;
      if (!(ss >> a >> b)) {
        if (r.empty())
          continue; // header
        throw ConfigError("malformed potential row: '" + line + "'");
      }
      r.push_back(a);
      v.push_back(b);
    }
    return tabulated(std::move(r), std::move(v));
  }

  const Model &model() const { return model_; }

  double operator()(double r) const {
    return std::visit(
        [r](const auto &m) -> double {
          using T = std::decay_t<decltype(m)>;
          if (r < 0.0 || r >= m.radius)
            return 0.0;
          if constexpr (std::is_same_v<T, SoftSphere>) {
            return m.v0;
          } else if constexpr (std::is_same_v<T, Bump>) {
            double x = 1.0 - (r / m.radius) * (r / m.radius);
            return m.v0 * x * x * x;
          } else {
            if (r <= m.r.front())
              return m.v.front();
            if (r >= m.r.back())
              return 0.0;
            auto it = std::upper_bound(m.r.begin(), m.r.end(), r);
            auto i = static_cast<std::size_t>(it - m.r.begin());
            double t = (r - m.r[i - 1]) / (m.r[i] - m.r[i - 1]);
            return (1.0 - t) * m.v[i - 1] + t * m.v[i];
          }
        },
        model_);
  }

  double radius() const {
    return std::visit([](const auto &m) { return m.radius; }, model_);
  }

  double max_value() const {
    return std::visit(
        [](const auto &m) -> double {
          using T = std::decay_t<decltype(m)>;
          if constexpr (std::is_same_v<T, Tabulated>)
            return *std::max_element(m.v.begin(), m.v.end());
          else
            return m.v0;
        },
        model_);
  }

  bool is_zero() const { return max_value() == 0.0; }

  /// Points where the profile or its derivatives may jump; quadrature and
  /// ODE steps are aligned with them.
  std::vector<double> breakpoints() const {
    return std::visit(
        [](const auto &m) {
          using T = std::decay_t<decltype(m)>;
          std::vector<double> b{0.0};
          if constexpr (std::is_same_v<T, Tabulated>) {
            for (double x : m.r)
              if (x > 0.0 && x < m.radius)
                b.push_back(x);
          }
          b.push_back(m.radius);
          return b;
        },
        model_);
  }

  std::string id() const {
    return std::visit(
        [](const auto &m) -> std::string {
          using T = std::decay_t<decltype(m)>;
          if constexpr (std::is_same_v<T, SoftSphere>)
            return "soft-sphere(v0=" + fmt_double(m.v0) +
                   ",R=" + fmt_double(m.radius) + ")";
          else if constexpr (std::is_same_v<T, Bump>)
            return "bump(v0=" + fmt_double(m.v0) +
                   ",R=" + fmt_double(m.radius) + ")";
          else
            return "tabulated(n=" + std::to_string(m.r.size()) +
                   ",R=" + fmt_double(m.radius) + ")";
        },
        model_);
  }

private:
  void validate() const {
    std::visit(
        [](const auto &m) {
          using T = std::decay_t<decltype(m)>;
          if (!(m.radius > 0.0) || !std::isfinite(m.radius))
            throw ConfigError("invalid potential: support radius must be > 0");
          if constexpr (std::is_same_v<T, Tabulated>) {
            if (m.r.size() < 2 || m.r.size() != m.v.size())
              throw ConfigError(
                  "invalid potential: tabulated profile needs >= 2 samples");
            for (std::size_t i = 0; i < m.r.size(); ++i) {
              if (!(m.v[i] >= 0.0) || !std::isfinite(m.v[i]))
                throw ConfigError("invalid potential: V(r) must be >= 0");
              if (m.r[i] < 0.0 || (i > 0 && !(m.r[i] > m.r[i - 1])))
                throw ConfigError(
                    "invalid potential: sample radii must increase from >= 0");
            }
            if (m.radius < m.r.back())
              throw ConfigError(
                  "invalid potential: samples extend beyond support radius");
          } else {
            if (!(m.v0 >= 0.0) || !std::isfinite(m.v0))
              throw ConfigError("invalid potential: V0 must be >= 0");
          }
        },
        model_);
  }

  Model model_;
};

//==============================================================================
// Fourier transform of the profile.

/// Precomputed evaluator of Vhat(s) for s <= kmax.
class FourierHat {
public:
  FourierHat(const Potential &pot, double kmax) : kmax_(kmax) {
    double R = pot.radius();
    QuadRule rule =
        panel_rule(pot.breakpoints(), oscillation_panel(kmax, R / 4.0));
    x_ = rule.x;
    c_.resize(rule.x.size());
    for (std::size_t i = 0; i < rule.x.size(); ++i)
      c_[i] = 4.0 * pi * rule.w[i] * rule.x[i] * rule.x[i] * pot(rule.x[i]);
    pot_ = pot;
  }

  double operator()(double s) const {
    if (s > kmax_)
      return FourierHat(pot_, s)(s);
    std::vector<double> t(x_.size());
    for (std::size_t i = 0; i < x_.size(); ++i)
      t[i] = c_[i] * sinc(s * x_[i]);
    return pairwise_sum(t);
  }

  double kmax() const { return kmax_; }

private:
  double kmax_;
  std::vector<double> x_, c_;
  Potential pot_;
};

inline double fourier_hat(const Potential &pot, double s) {
  if (s < 0.0)
    throw ConfigError("fourier_hat: wave-vector magnitude must be >= 0");
  return FourierHat(pot, s)(s);
}

//==============================================================================
// Radial ODE  u'' = q(y) u  on [0, R] with u(0) = 0, u'(0) = 1, integrated by
// classical RK4 on steps aligned with the profile breakpoints. The trajectory
// is kept for Hermite interpolation.

struct RadialTrajectory {
  std::vector<double> y, u, du;

  double u_end() const { return u.back(); }
  double du_end() const { return du.back(); }

  /// Cubic Hermite interpolation of u (and u' via q u = u'').
  double eval(double t) const {
    if (t <= 0.0)
      return 0.0;
    if (t >= y.back())
      return u.back();
    auto it = std::upper_bound(y.begin(), y.end(), t);
    auto i = static_cast<std::size_t>(it - y.begin());
    double h = y[i] - y[i - 1];
    double s = (t - y[i - 1]) / h;
    double h00 = (1 + 2 * s) * (1 - s) * (1 - s), h10 = s * (1 - s) * (1 - s);
    double h01 = s * s * (3 - 2 * s), h11 = s * s * (s - 1);
    return h00 * u[i - 1] + h10 * h * du[i - 1] + h01 * u[i] + h11 * h * du[i];
  }
};

template <class Q>
RadialTrajectory integrate_radial(const std::vector<double> &breaks,
                                  double step, Q &&q) {
  RadialTrajectory tr;
  double u = 0.0, du = 1.0;
  tr.y.push_back(0.0);
  tr.u.push_back(u);
  tr.du.push_back(du);
  for (std::size_t b = 0; b + 1 < breaks.size(); ++b) {
    double lo = breaks[b], hi = breaks[b + 1];
    auto n = std::max<std::size_t>(
        1, static_cast<std::size_t>(std::ceil((hi - lo) / step)));
    double h = (hi - lo) / static_cast<double>(n);
    // Evaluate q strictly inside the interval so jumps at the ends are seen
    // from the correct side.
    auto qin = [&](double y) {
      double eps = 1e-12 * (hi - lo);
      return q(std::clamp(y, lo + eps, hi - eps));
    };
    for (std::size_t k = 0; k < n; ++k) {
      double y0 = lo + k * h;
      double k1u = du, k1d = qin(y0) * u;
      double k2u = du + 0.5 * h * k1d, k2d = qin(y0 + 0.5 * h) * (u + 0.5 * h * k1u);
      double k3u = du + 0.5 * h * k2d, k3d = qin(y0 + 0.5 * h) * (u + 0.5 * h * k2u);
      double k4u = du + h * k3d, k4d = qin(y0 + h) * (u + h * k3u);
      u += h / 6.0 * (k1u + 2 * k2u + 2 * k3u + k4u);
      du += h / 6.0 * (k1d + 2 * k2d + 2 * k3d + k4d);
      tr.y.push_back(y0 + h);
      tr.u.push_back(u);
      tr.du.push_back(du);
    }
  }
  return tr;
}

/// RK4 step small against both the support and the local wavelength.
inline double radial_step(const Potential &pot) {
  double R = pot.radius();
  double k0 = std::sqrt(0.5 * pot.max_value());
  return std::min(R / 4000.0, k0 > 0.0 ? 2e-3 / k0 : R);
}

/// Zero-energy scattering length for  -Delta f + V f / 2 = 0.
inline double scattering_length(const Potential &pot) {
  if (pot.is_zero())
    return 0.0;
  double R = pot.radius();
  auto tr = integrate_radial(pot.breakpoints(), radial_step(pot),
                             [&](double y) { return 0.5 * pot(y); });
  // Beyond the support u = c (y - a).
  return R - tr.u_end() / tr.du_end();
}

//==============================================================================
// Neumann problem on the ball of radius Lb = N^{1-kappa} l.

struct NeumannGeometry {
  double n;      ///< particle-number scale N
  double kappa;
  double ell;
  double scale() const { return std::pow(n, 1.0 - kappa); } ///< N^{1-kappa}
  double ball_radius() const { return scale() * ell; }
};

/// Solution of [-Delta + V/2] f = lambda f on |y| < Lb with f(Lb) = 1,
/// f'(Lb) = 0. Holds the inner trajectory and the analytic outer piece.
class ScatteringSolution {
public:
  ScatteringSolution() = default;

  double lambda() const { return lambda_; }
  double scattering_length() const { return a_; }
  double ball_radius() const { return lb_; }
  double support_radius() const { return r_; }
  const NeumannGeometry &geometry() const { return geo_; }
  bool trivial() const { return trivial_; }

  /// Radial profile u(y) = y f(y) before normalization.
  double u_raw(double y) const {
    if (y <= r_)
      return inner_.eval(y);
    double s = y - r_;
    return ur_ * std::cos(mu_ * s) + dur_ * s * sinc(mu_ * s);
  }
  double du_raw(double y) const {
    double s = y - r_;
    return -ur_ * mu_ * std::sin(mu_ * s) + dur_ * std::cos(mu_ * s);
  }

  double f(double y) const {
    if (trivial_)
      return 1.0;
    if (y <= 0.0)
      return inner_.du.front() / norm_;
    return u_raw(y) / (norm_ * y);
  }
  double w(double y) const { return 1.0 - f(y); }

  /// Neumann residual  Lb u'(Lb) - u(Lb), scaled by the normalization.
  double boundary_slope() const {
    if (trivial_)
      return 0.0;
    return (lb_ * du_raw(lb_) - u_raw(lb_)) / (norm_ * lb_ * lb_);
  }

  /// Fourier transform of w_l on R^3 (supported in the ball) at |k|.
  /// Quadrature on [0, R], closed form on [R, Lb].
  class WHat {
  public:
    WHat(const ScatteringSolution &sol, double kmax) : sol_(&sol), kmax_(kmax) {
      if (sol.trivial_)
        return;
      auto breaks = std::vector<double>{0.0, sol.r_};
      QuadRule rule = panel_rule(breaks, oscillation_panel(kmax, sol.r_ / 8.0));
      x_ = rule.x;
      c_.resize(x_.size());
      for (std::size_t i = 0; i < x_.size(); ++i)
        c_[i] = 4.0 * pi * rule.w[i] * x_[i] * x_[i] * sol.w(x_[i]);
    }

    double operator()(double k) const {
      const auto &s = *sol_;
      if (s.trivial_)
        return 0.0;
      if (k > kmax_)
        return WHat(s, k)(k);
      std::vector<double> t(x_.size());
      for (std::size_t i = 0; i < x_.size(); ++i)
        t[i] = c_[i] * sinc(k * x_[i]);
      double inner = pairwise_sum(t);
      return inner + s.outer_transform(k);
    }

  private:
    const ScatteringSolution *sol_;
    double kmax_;
    std::vector<double> x_, c_;
  };

  WHat w_hat(double kmax) const { return WHat(*this, kmax); }

  /// 4 pi \int_0^{Lb} y^2 w(y)^2 dy.
  double w_l2_squared() const {
    if (trivial_)
      return 0.0;
    std::vector<double> br{0.0, r_};
    for (double y = 2.0 * r_; y < lb_; y *= 2.0)
      br.push_back(y);
    br.push_back(lb_);
    QuadRule rule = panel_rule(br, r_ / 4.0);
    return 4.0 * pi * rule.integrate([&](double y) {
      double ww = w(y);
      return y * y * ww * ww;
    });
  }

  /// Samples of f on a radial grid (inner trajectory subsampled, outer uniform).
  std::vector<std::pair<double, double>> f_samples(std::size_t n_outer = 200) const {
    std::vector<std::pair<double, double>> out;
    if (trivial_) {
      out.emplace_back(0.0, 1.0);
      out.emplace_back(lb_, 1.0);
      return out;
    }
    std::size_t stride = std::max<std::size_t>(1, inner_.y.size() / 200);
    for (std::size_t i = 0; i < inner_.y.size(); i += stride)
      out.emplace_back(inner_.y[i], f(inner_.y[i]));
    for (std::size_t i = 1; i <= n_outer; ++i) {
      double y = r_ + (lb_ - r_) * static_cast<double>(i) / n_outer;
      out.emplace_back(y, f(y));
    }
    return out;
  }

private:
  friend ScatteringSolution solve_neumann(const Potential &,
                                          const NeumannGeometry &);

  /// 4 pi \int_R^{Lb} y^2 w(y) sinc(k y) dy in closed form.
  double outer_transform(double k) const {
    if (k * lb_ < 1e-8) {
      std::vector<double> br{r_};
      for (double y = 2.0 * r_; y < lb_; y *= 2.0)
        br.push_back(y);
      br.push_back(lb_);
      return 4.0 * pi * panel_rule(br, r_ / 4.0).integrate([&](double y) { return y * y * w(y); });
    }
    double S = lb_ - r_, b = k * r_;
    // \int_R^{Lb} y sin(ky) dy
    auto prim = [k](double y) {
      return std::sin(k * y) / (k * k) - y * std::cos(k * y) / k;
    };
    double i1 = prim(lb_) - prim(r_);
    // \int_0^S sin(a s + b) ds and \int_0^S cos(a s + b) ds, stable in a.
    auto fsin = [&](double a) {
      return S * sinc(0.5 * a * S) * std::sin(0.5 * a * S + b);
    };
    auto fcos = [&](double a) {
      return S * sinc(0.5 * a * S) * std::cos(0.5 * a * S + b);
    };
    double jc = 0.5 * (fsin(k + mu_) + fsin(k - mu_));
    double js;
    if (mu_ * S < 1e-6) {
      // limit mu -> 0: \int_0^S s sin(k s + b) ds
      auto p = [&](double s) {
        return std::sin(k * s + b) / (k * k) - s * std::cos(k * s + b) / k;
      };
      js = p(S) - p(0.0);
    } else {
      js = (fcos(k - mu_) - fcos(k + mu_)) / (2.0 * mu_);
    }
    double i2 = ur_ * jc + dur_ * js;
    return 4.0 * pi / k * (i1 - i2 / norm_);
  }

  NeumannGeometry geo_{};
  bool trivial_ = false;
  double lambda_ = 0.0, a_ = 0.0, lb_ = 0.0, r_ = 0.0;
  double mu_ = 0.0, ur_ = 0.0, dur_ = 0.0, norm_ = 1.0;
  RadialTrajectory inner_;
};

inline ScatteringSolution solve_neumann(const Potential &pot,
                                        const NeumannGeometry &geo) {
  ScatteringSolution sol;
  sol.geo_ = geo;
  sol.r_ = pot.radius();
  sol.lb_ = geo.ball_radius();
  if (!(sol.lb_ > sol.r_))
    throw ConfigError("geometry: potential support R=" + fmt_double(sol.r_) +
                      " not strictly inside Neumann ball radius N^{1-kappa} l=" +
                      fmt_double(sol.lb_));
  if (!(sol.r_ / geo.scale() < 0.5))
    throw ConfigError("geometry: rescaled support R/N^{1-kappa} must be < 1/2");
  sol.a_ = scattering_length(pot);
  if (pot.is_zero()) {
    sol.trivial_ = true;
    return sol;
  }

  const auto breaks = pot.breakpoints();
  const double step = radial_step(pot);
  const double lb = sol.lb_, R = sol.r_;

  auto mismatch = [&](double lambda) {
    auto tr = integrate_radial(breaks, step,
                               [&](double y) { return 0.5 * pot(y) - lambda; });
    double mu = std::sqrt(lambda), S = lb - R;
    double ul = tr.u_end() * std::cos(mu * S) + tr.du_end() * S * sinc(mu * S);
    double dul =
        -tr.u_end() * mu * std::sin(mu * S) + tr.du_end() * std::cos(mu * S);
    return (lb * dul - ul) / (tr.du_end() * lb);
  };

  double lo = 0.0, hi = (pi / (lb - R)) * (pi / (lb - R));
  double flo = mismatch(lo), fhi = mismatch(hi);
  if (!(flo > 0.0) || !(fhi < 0.0))
    throw SolverError("Neumann eigenvalue bracket failure: mismatch(0)=" +
                      fmt_double(flo) + ", mismatch(" + fmt_double(hi) +
                      ")=" + fmt_double(fhi) + ", ball radius " + fmt_double(lb));
  std::uintmax_t iters = 200;
  auto tol = [](double a, double b) {
    return std::abs(b - a) <= 1e-15 * std::max(std::abs(a), std::abs(b));
  };
  auto [x0, x1] = boost::math::tools::toms748_solve(mismatch, lo, hi, flo, fhi,
                                                    tol, iters);
  if (iters >= 200)
    throw SolverError("Neumann eigenvalue root search did not converge");
  sol.lambda_ = 0.5 * (x0 + x1);

  sol.inner_ = integrate_radial(
      breaks, step, [&](double y) { return 0.5 * pot(y) - sol.lambda_; });
  sol.mu_ = std::sqrt(sol.lambda_);
  sol.ur_ = sol.inner_.u_end();
  sol.dur_ = sol.inner_.du_end();
  sol.norm_ = 1.0;
  sol.norm_ = sol.u_raw(lb) / lb;
  return sol;
}

} // namespace blab

namespace blab {

/// R - tanh(k0 R)/k0, k0 = sqrt(V0/2), for the soft sphere; empty otherwise.
inline std::optional<double> closed_form_scattering_length(const Potential &pot) {
  const auto *s = std::get_if<SoftSphere>(&pot.model());
  if (!s)
    return std::nullopt;
  if (s->v0 == 0.0)
    return 0.0;
  double k0 = std::sqrt(0.5 * s->v0);
  return s->radius - std::tanh(k0 * s->radius) / k0;
}

} // namespace blab
