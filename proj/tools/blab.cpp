// blab: command-line front end for the LHY upper-bound lab.

#include "blab/energy.hpp"
#include "blab/errbounds.hpp"
#include "blab/fock.hpp"
#include "blab/report.hpp"
#include "blab/sup_kernel.hpp"

#include <CLI11.hpp>

#include <iostream>
#include <thread>

using namespace blab;
using ojson = nlohmann::ordered_json;

namespace {

struct Opts {
  std::string potential = "soft_sphere";
  double v0 = 1.0, radius = 1.0;
  std::string kappa = "0.55";
  std::string eps; // empty: default for kappa (0 for exponents)
  double ell = 0.25;
  double n = 1e4;
  std::string sweep;
  std::string sup_sweep = "1e3:1e5:3";
  std::string terms;
  std::string modes;
  std::string out = "blab_out";
  int threads = 0;
  double tolerance = -1.0; // negative: subcommand default
  int m_max = 3;
  int term5_cutoff = 0;
  bool sup_kernel = false;
  bool fock_kernels = false;
  double parseval_factor = 20.0;
  std::size_t memory_mib = 1024;
  std::vector<std::string> inputs;
};

ojson echo(const Opts &o) {
  ojson j;
  j["potential"] = o.potential;
  j["v0"] = o.v0;
  j["radius"] = o.radius;
  j["kappa"] = o.kappa;
  j["eps"] = o.eps.empty() ? "default" : o.eps;
  j["ell"] = o.ell;
  j["n"] = o.n;
  j["sweep"] = o.sweep;
  if (o.sup_kernel)
    j["sup_sweep"] = o.sup_sweep;
  j["terms"] = o.terms;
  j["modes"] = o.modes;
  j["out"] = o.out;
  j["tolerance"] = o.tolerance;
  j["m_max"] = o.m_max;
  j["term5_cutoff"] = o.term5_cutoff;
  j["sup_kernel"] = o.sup_kernel;
  j["fock_kernels"] = o.fock_kernels;
  j["parseval_factor"] = o.parseval_factor;
  j["memory_mib"] = o.memory_mib;
  // threads are left out on purpose: outputs must not depend on them
  return j;
}

Potential make_potential(const Opts &o) {
  if (o.potential == "soft_sphere" || o.potential == "soft-sphere")
    return Potential::soft_sphere(o.v0, o.radius);
  if (o.potential == "bump")
    return Potential::bump(o.v0, o.radius);
  if (o.potential.rfind("csv:", 0) == 0)
    return Potential::from_csv(o.potential.substr(4));
  throw ConfigError("unknown potential '" + o.potential + "' (soft_sphere | bump | csv:FILE)");
}

ScalingParams make_params(const Opts &o, double n) {
  Rational kq = Rational::parse(o.kappa);
  std::optional<double> e;
  std::optional<Rational> eq;
  if (!o.eps.empty()) {
    eq = Rational::parse(o.eps);
    e = eq->to_double();
  }
  auto p = ScalingParams::make(n, kq.to_double(), e, o.ell);
  p.kappa_q = kq;
  p.eps_q = eq;
  return p;
}

std::vector<double> parse_sweep(const std::string &s) {
  auto c1 = s.find(':');
  auto c2 = c1 == std::string::npos ? c1 : s.find(':', c1 + 1);
  if (c2 == std::string::npos)
    throw ConfigError("--sweep expects lo:hi:count, got '" + s + "'");
  double lo, hi;
  int count;
  try {
    lo = std::stod(s.substr(0, c1));
    hi = std::stod(s.substr(c1 + 1, c2 - c1 - 1));
    count = std::stoi(s.substr(c2 + 1));
  } catch (const std::exception &) {
    throw ConfigError("--sweep expects lo:hi:count, got '" + s + "'");
  }
  if (count < 1)
    throw ConfigError("empty N grid: --sweep count must be >= 1");
  return log_grid(lo, hi, count);
}

std::vector<double> grid_or_single(const Opts &o) {
  return o.sweep.empty() ? std::vector<double>{o.n} : parse_sweep(o.sweep);
}

std::vector<std::string> split(const std::string &s, char sep) {
  std::vector<std::string> v;
  std::string cur;
  for (char c : s) {
    if (c == sep) {
      if (!cur.empty())
        v.push_back(cur);
      cur.clear();
    } else if (c != ' ') {
      cur += c;
    }
  }
  if (!cur.empty())
    v.push_back(cur);
  return v;
}

std::string csv_num(double x) { return std::isfinite(x) ? fmt_double(x) : "nan"; }

struct Run {
  Manifest manifest;
  OutputSet files;
  explicit Run(std::string sub) : manifest(std::move(sub)) {}
  void add(const std::string &name, std::string content, const std::string &what) {
    manifest.outputs()[name] = what;
    files.add(name, std::move(content));
  }
};

//==============================================================================

void cmd_scatter(const Opts &o, Run &run) {
  auto pot = make_potential(o);
  auto prm = make_params(o, o.n);
  auto sol = solve_neumann(pot, NeumannGeometry{prm.n, prm.kappa, prm.ell});
  const double a = sol.scattering_length();

  ojson j;
  j["potential"] = pot.id();
  j["scattering_length"] = {{"value", a}, {"kind", "shooting, toms748 bracket"}};
  j["lambda"] = sol.lambda();
  j["ball_radius"] = sol.ball_radius();
  j["support_radius"] = sol.support_radius();
  j["boundary_slope"] = sol.boundary_slope();
  j["w_l2_squared"] = sol.w_l2_squared();

  if (auto cf = closed_form_scattering_length(pot)) {
    double rel = *cf > 0 ? std::abs(a - *cf) / *cf : std::abs(a);
    j["closed_form"] = {{"value", *cf}, {"rel_error", rel}};
    run.manifest.check("scattering_length_closed_form", rel < 1e-8, "rel error " + fmt_double(rel));
  }
  // Born: a <= (1/8 pi) int V
  double born = fourier_hat(pot, 0.0) / (8.0 * pi);
  j["born_bound"] = born;
  run.manifest.check("born_upper_bound", a <= born * (1 + 1e-12),
                     "a=" + fmt_double(a) + " born=" + fmt_double(born));

  if (!sol.trivial()) {
    auto pc = parseval_check(sol, prm, o.parseval_factor);
    j["parseval"] = {{"lattice", pc.lattice}, {"tail", pc.tail}, {"integral", pc.integral},
                     {"rel_gap", pc.rel_gap()}, {"cutoff_factor", o.parseval_factor}};
    run.manifest.check("parseval_w_hat", pc.rel_gap() < 1e-6, "rel gap " + fmt_double(pc.rel_gap()));
  }

  std::ostringstream f;
  f << "y,f,w\n";
  std::vector<double> ys, fs;
  for (auto [y, fy] : sol.f_samples()) {
    f << fmt_double(y) << ',' << fmt_double(fy) << ',' << fmt_double(1.0 - fy) << '\n';
    ys.push_back(y);
    fs.push_back(fy);
  }
  run.manifest.plot("f_profile", ys, fs);
  run.add("solution.json", j.dump(2) + "\n", "scattering solution summary");
  run.add("f_profile.csv", f.str(), "f and w = 1 - f on the ball");
}

void cmd_kernels(const Opts &o, Run &run) {
  auto pot = make_potential(o);
  auto prm = make_params(o, o.n);
  auto t = make_kernels(pot, prm);
  double gs = 0.0, tr = 0.0;
  const double A = 8.0 * pi * t.a * prm.n_kappa();
  for (const auto &r : t.rows) {
    gs = std::max(gs, std::abs(r.gamma * r.gamma - r.sigma * r.sigma - 1.0));
    if (t.regions.in_low_set(r.p) && t.a > 0)
      tr = std::max(tr, std::abs(std::tanh(2.0 * r.nu) + A / (r.p * r.p + A)));
  }
  auto meta = t.metadata();
  meta["max_gamma2_minus_sigma2_minus_1"] = gs;
  meta["max_tau_residual"] = tr;
  double n0 = n_zero(t);
  meta["N0"] = n0;
  run.manifest.check("gamma2_minus_sigma2", gs <= 1e-12, "max residual " + fmt_double(gs));
  run.manifest.check("tau_residual", tr <= 1e-12, "max residual " + fmt_double(tr));
  run.manifest.check("condensate_fraction", n0 > 0 && n0 < prm.n, "N0=" + fmt_double(n0));
  std::ostringstream os;
  t.write_csv(os);
  run.add("kernels.csv", os.str(), "per-shell eta, nu, sigma, gamma with region tags");
  run.add("kernels.json", meta.dump(2) + "\n", "kernel table metadata");
}

void cmd_norms(const Opts &o, Run &run) {
  auto pot = make_potential(o);
  auto base = make_params(o, o.n);
  auto sw = run_norm_sweep(pot, base, grid_or_single(o));
  std::ostringstream os;
  os << "N,status";
  for (const auto &n : NormReport::names())
    os << ',' << n << ',' << n << "_tail";
  os << ",S_empty\n";
  for (std::size_t i = 0; i < sw.ns.size(); ++i) {
    os << fmt_double(sw.ns[i]);
    if (!sw.norms[i]) {
      os << ",failed";
      for (std::size_t k = 0; k < 2 * NormReport::names().size(); ++k)
        os << ",nan";
      os << ",nan\n";
      run.manifest.check("norms_at_N=" + fmt_double(sw.ns[i]), false, sw.failures[i]);
      continue;
    }
    os << ",ok";
    auto v = sw.norms[i]->values(), t = sw.norms[i]->tails();
    for (std::size_t k = 0; k < v.size(); ++k)
      os << ',' << csv_num(v[k]) << ',' << csv_num(t[k]);
    os << ',' << (sw.norms[i]->s_empty ? 1 : 0) << '\n';
  }
  run.add("norms.csv", os.str(), "lattice norms per N with tail bounds (0 = exact finite sum)");
  if (sw.ns.size() < 3)
    return;
  auto fits = norm_fits(sw, o.tolerance > 0 ? o.tolerance : 0.15);
  std::ostringstream fs;
  fs << "name,target,tolerance,kind,slope,intercept,r2,used,pass\n";
  for (const auto &f : fits) {
    fs << f.name << ',' << fmt_double(f.target) << ',' << fmt_double(f.tolerance) << ','
       << (f.upper_only ? "upper" : "band") << ',';
    if (f.fit)
      fs << fmt_double(f.fit->slope) << ',' << fmt_double(f.fit->intercept) << ',' << fmt_double(f.fit->r2);
    else
      fs << "nan,nan,nan";
    fs << ',' << f.used << ',' << (f.pass() ? 1 : 0) << '\n';
    std::string d = f.fit ? "slope " + fmt_double(f.fit->slope) + " target " + fmt_double(f.target) : f.error;
    run.manifest.check("slope_" + f.name, f.pass(), d);
    if (f.fit)
      run.manifest.plot(f.name, f.fit->ns, f.fit->values);
  }
  run.add("norms_fit.csv", fs.str(), "fitted log-log slopes");
}

void cmd_energy(const Opts &o, Run &run) {
  auto pot = make_potential(o);
  auto prm = make_params(o, o.n);
  auto t = make_kernels(pot, prm);
  auto e = c_gn_breakdown(t, pot, o.term5_cutoff);
  auto j = e.to_json();
  j["scattering_length"] = t.a;
  j["lhy_constant"] = lhy_constant();
  j["rho_a3"] = prm.n * t.a * t.a * t.a / std::pow(prm.scale(), 3);
  bool finite = std::isfinite(e.c_gn()) && std::isfinite(e.main.total());
  run.manifest.check("energy_finite", finite, "C_GN=" + fmt_double(e.c_gn()));
  if (!pot.is_zero() && e.term5_cutoff > 0 && e.term5_cutoff <= 40) {
    FourierHat vh(pot, 16.0 * t.shells->max_momentum() / prm.scale());
    auto tb = term5_tables(t, vh, e.term5_cutoff);
    double fast = autocorr_conv_sum(tb.g, tb.f, e.term5_cutoff).value();
    double slow = direct_conv_sum(tb.g, tb.f, e.term5_cutoff).value();
    double rel = std::abs(fast - slow) / std::max(std::abs(slow), 1e-300);
    j["term5_direct_check"] = {{"fft", fast}, {"direct", slow}, {"rel_gap", rel}};
    run.manifest.check("term5_fft_vs_direct", rel <= 1e-8, "rel gap " + fmt_double(rel));
  }
  run.add("energy.json", j.dump(2) + "\n", "C_GN breakdown with tails");
}

void cmd_errbounds(const Opts &o, Run &run) {
  auto pot = make_potential(o);
  auto base = make_params(o, o.n);
  auto grid = grid_or_single(o);
  std::vector<ErrorTermId> ids;
  if (o.terms.empty() || o.terms == "all")
    ids = all_error_terms();
  else
    for (const auto &s : split(o.terms, ','))
      ids.push_back(parse_term(s));
  auto sw = run_norm_sweep(pot, base, grid);
  auto fits = sweep_fit(ids, sw, o.tolerance > 0 ? o.tolerance : 0.1);

  std::ostringstream vs, fs;
  vs << "id,N,value,normalized,excluded\n";
  fs << "id,label,target,tolerance,slope,intercept,r2,used,growth,max_over_min,pass,bounded\n";
  for (const auto &f : fits) {
    std::size_t used = 0;
    for (std::size_t i = 0; i < f.ns.size(); ++i) {
      vs << term_name(f.id) << ',' << fmt_double(f.ns[i]) << ',' << csv_num(f.values[i]) << ','
         << csv_num(f.normalized[i]) << ',' << f.excluded[i] << '\n';
      used += f.excluded[i].empty();
    }
    fs << term_name(f.id) << ',' << term_label(f.id) << ',' << fmt_double(f.target) << ','
       << fmt_double(f.tolerance) << ',';
    if (f.fit)
      fs << fmt_double(f.fit->slope) << ',' << fmt_double(f.fit->intercept) << ',' << fmt_double(f.fit->r2);
    else
      fs << "nan,nan,nan";
    fs << ',' << used << ',' << csv_num(f.growth) << ',' << csv_num(f.max_over_min) << ','
       << (f.pass() ? 1 : 0) << ',' << (f.bounded() ? 1 : 0) << '\n';
    std::string d = f.fit ? "slope " + fmt_double(f.fit->slope) + " <= " + fmt_double(f.target + f.tolerance)
                          : f.error;
    if (grid.size() > 1) {
      run.manifest.check("slope_" + term_name(f.id), f.pass(), d);
      run.manifest.check("bounded_" + term_name(f.id), f.bounded(),
                         f.fit ? "growth " + fmt_double(f.growth) : f.error);
    }
    if (f.fit) {
      std::vector<double> z;
      for (std::size_t i = 0; i < f.normalized.size(); ++i)
        if (f.excluded[i].empty())
          z.push_back(f.normalized[i]);
      run.manifest.plot(term_name(f.id) + "_normalized", f.fit->ns, z);
    }
  }
  run.add("errbounds.csv", vs.str(), "composite bounds per N (all constants 1)");
  run.add("errbounds_fit.csv", fs.str(), "slope fits against 5k/2 - eps");

  if (o.sup_kernel) {
    std::ostringstream ss;
    ss << "N,cutoff,sup_ratio,tail\n";
    double lo = 0, hi = 0;
    for (double n : parse_sweep(o.sup_sweep)) {
      auto r = sup_kernel_bound(base.with_n(n), pot);
      double tl = *std::max_element(r.tail.begin(), r.tail.end());
      ss << fmt_double(n) << ',' << r.cutoff << ',' << fmt_double(r.sup()) << ',' << fmt_double(tl) << '\n';
      lo = lo == 0 ? r.sup() : std::min(lo, r.sup());
      hi = std::max(hi, r.sup());
    }
    run.manifest.check("sup_kernel_band", lo > 0 && hi / lo <= 4.0, "max/min " + fmt_double(hi / lo));
    run.add("sup_kernel.csv", ss.str(), "sup over shifts of the kernel ratio");
  }
}

void cmd_exponents(const Opts &o, Run &run) {
  Rational k = Rational::parse(o.kappa);
  Rational e = o.eps.empty() ? Rational(0) : Rational::parse(o.eps);
  auto b = exponent_budget(k, e);
  std::ostringstream os;
  os << "name,value,slope_kappa,offset,threshold,sign\n";
  for (const auto &x : b.entries) {
    const char *sign = x.value < Rational(0) ? "negative" : x.value == Rational(0) ? "zero" : "positive";
    os << x.name << ',' << x.value.str() << ',' << x.slope_kappa.str() << ',' << x.offset.str() << ','
       << (x.threshold ? x.threshold->str() : "none") << ',' << sign << '\n';
  }
  ojson j;
  j["kappa"] = k.str();
  j["eps"] = e.str();
  j["old_admissible"] = b.old_admissible;
  j["new_admissible"] = b.new_admissible;
  j["on_boundary"] = b.on_boundary;
  run.manifest.config()["kappa_exact"] = k.str();
  run.manifest.config()["eps_exact"] = e.str();
  run.manifest.outputs()["budget"] = j;
  run.manifest.check("threshold_9k-5", b.at("9k-5+6e").threshold == Rational(5, 9), b.at("9k-5+6e").threshold->str());
  run.manifest.check("threshold_21k/4-3", b.at("21k/4-3+3e").threshold == Rational(4, 7),
                     b.at("21k/4-3+3e").threshold->str());
  run.manifest.check("threshold_12k-7", b.at("12k-7+5e").threshold == Rational(7, 12),
                     b.at("12k-7+5e").threshold->str());
  run.add("exponents.csv", os.str(), "exact exponent budget");
}

void cmd_fock(const Opts &o, Run &run) {
  std::vector<std::pair<std::string, fock::ModeSet>> sets;
  if (!o.modes.empty()) {
    std::ifstream in(o.modes);
    if (!in)
      throw ConfigError("cannot open mode-set file '" + o.modes + "'");
    nlohmann::json j;
    try {
      in >> j;
    } catch (const nlohmann::json::exception &e) {
      throw ConfigError("mode-set file: " + std::string(e.what()));
    }
    if (j.is_array())
      for (std::size_t i = 0; i < j.size(); ++i)
        sets.emplace_back("set" + std::to_string(i), fock::ModeSet::from_json(j[i]));
    else
      sets.emplace_back("set0", fock::ModeSet::from_json(j));
  } else {
    const int shapes[3][3] = {{1, 1, 1}, {1, 2, 2}, {2, 0, 3}};
    for (const auto &s : shapes) {
      auto ms = fock::generic_mode_set(s[0], s[1], std::uint64_t(s[2]));
      sets.emplace_back("generic_" + std::to_string(ms.size()) + "_modes_seed" + std::to_string(s[2]), ms);
    }
  }
  if (o.fock_kernels) {
    auto pot = make_potential(o);
    auto t = make_kernels(pot, make_params(o, o.n));
    for (auto &[name, ms] : sets)
      fock::assign_from_kernels(ms, t, pot);
  }
  ojson rep;
  for (auto &[name, ms] : sets) {
    auto v = fock::verify(ms, o.m_max);
    auto j = v.to_json();
    j["name"] = name;
    j["modes"] = ms.to_json();
    rep["sets"].push_back(j);
    std::string tag = v.generic ? "" : " (degenerate set: finding, not a failure)";
    if (v.generic)
      run.manifest.check("fock_" + name, v.passed(), "norm gap " + fmt_double(v.norm_total.abs_gap()));
    else
      run.manifest.outputs()["finding_" + name] = v.passed() ? "identities hold" : "identities differ" + tag;
  }
  run.add("fock_report.json", rep.dump(2) + "\n", "matrix vs contraction series per family and order");
}

void cmd_report(const Opts &o, Run &run) {
  if (o.inputs.empty())
    throw ConfigError("report: need at least one manifest");
  std::vector<ojson> ms;
  for (const auto &p : o.inputs) {
    std::ifstream in(p);
    if (!in)
      throw ConfigError("cannot open manifest '" + p + "'");
    try {
      ms.push_back(ojson::parse(in));
    } catch (const nlohmann::json::exception &e) {
      throw ConfigError("manifest '" + p + "': " + e.what());
    }
  }
  auto r = emit_report(ms);
  run.manifest.check("inputs_pass", r.passed, "conjunction of " + std::to_string(ms.size()) + " manifests");
  run.add("report.json", r.summary.dump(2) + "\n", "merged summary");
  for (const auto &[name, content] : r.plot_files)
    run.add("plots/" + name, content, "two-column plot data");
}

} // namespace

int main(int argc, char **argv) {
  CLI::App app{"blab: numerical lab for the second-order upper bound on the dilute Bose gas energy"};
  app.set_config("--config", "", "flat key=value file; flags override it");
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(version));
  Opts o;
  app.add_option("--potential", o.potential, "soft_sphere | bump | csv:FILE")->capture_default_str();
  app.add_option("--v0", o.v0, "potential height")->capture_default_str();
  app.add_option("--radius", o.radius, "support radius R")->capture_default_str();
  app.add_option("--kappa", o.kappa, "kappa, decimal or p/q")->capture_default_str();
  app.add_option("--eps", o.eps, "eps, decimal or p/q");
  app.add_option("--ell", o.ell, "Neumann ball radius fraction")->capture_default_str();
  app.add_option("--n", o.n, "particle number N")->capture_default_str();
  app.add_option("--sweep", o.sweep, "N grid lo:hi:count, log-spaced");
  app.add_option("--terms", o.terms, "comma-separated error-term ids, or all");
  app.add_option("--modes", o.modes, "mode-set JSON file for fock-verify");
  app.add_option("--out", o.out, "output directory")->capture_default_str();
  app.add_option("--threads", o.threads, "worker threads (0 = hardware)");
  app.add_option("--tolerance", o.tolerance, "slope tolerance (default 0.15 norms, 0.1 errbounds)");
  app.add_option("--m-max", o.m_max, "Fock expansion order")->capture_default_str();
  app.add_option("--term5-cutoff", o.term5_cutoff, "integer cutoff for energy term 5 (0 = automatic)");
  app.add_flag("--sup-kernel", o.sup_kernel, "errbounds: also run the sup-kernel band check");
  app.add_option("--sup-sweep", o.sup_sweep, "errbounds: N grid of the sup-kernel check")->capture_default_str();
  app.add_flag("--fock-kernels", o.fock_kernels, "fock-verify: take coefficients from the kernel table");
  app.add_option("--parseval-factor", o.parseval_factor, "scatter: lattice cutoff in units of N^{1-k}")
      ->capture_default_str();
  app.add_option("--memory-mib", o.memory_mib, "memory budget in MiB")->capture_default_str();

  std::map<std::string, std::function<void(const Opts &, Run &)>> cmds{
      {"scatter", cmd_scatter},     {"kernels", cmd_kernels},     {"norms", cmd_norms},
      {"energy", cmd_energy},       {"errbounds", cmd_errbounds}, {"exponents", cmd_exponents},
      {"fock-verify", cmd_fock},    {"report", cmd_report}};
  std::map<std::string, CLI::App *> subs;
  for (const auto &[name, fn] : cmds) {
    auto *s = app.add_subcommand(name);
    s->fallthrough();
    if (name == "report")
      s->add_option("manifests", o.inputs, "run manifests to merge");
    subs[name] = s;
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError &e) {
    int rc = app.exit(e);
    return rc == 0 ? 0 : int(ErrorKind::config);
  }

  std::string sub;
  for (const auto &[name, s] : subs)
    if (s->parsed())
      sub = name;

  try {
    set_thread_count(o.threads > 0 ? o.threads : int(std::max(1u, std::thread::hardware_concurrency())));
    set_memory_budget(o.memory_mib << 20);
    Run run(sub);
    run.manifest.config() = echo(o);
    if (sub != "report" && sub != "exponents" && sub != "fock-verify")
      make_params(o, o.n); // reject invalid parameters before any work
    cmds[sub](o, run);
    auto m = run.manifest.finish();
    run.files.add(sub + ".json", m.dump(2) + "\n");
    run.files.write(o.out);
    for (const auto &c : m["checks"])
      std::cout << (c["pass"].get<bool>() ? "PASS " : "FAIL ") << c["name"].get<std::string>()
                << (c.contains("detail") ? "  " + c["detail"].get<std::string>() : "") << '\n';
    std::cout << sub << ": " << (run.manifest.passed() ? "PASS" : "FAIL") << " -> " << o.out << '\n';
    return run.manifest.passed() ? 0 : 1;
  } catch (const Error &e) {
    std::cerr << "blab " << sub << ": " << e.what() << '\n';
    return int(e.kind());
  } catch (const std::bad_alloc &) {
    std::cerr << "blab " << sub << ": out of memory\n";
    return int(ErrorKind::resource);
  } catch (const nlohmann::json::exception &e) {
    std::cerr << "blab " << sub << ": " << e.what() << '\n';
    return int(ErrorKind::config);
  }
}
