#pragma once

#include "blab/core.hpp"

#include <json.hpp>

#include <chrono>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace blab {

inline constexpr const char *version = "1.0.0";

/// Run manifest. Everything that varies between identical runs (clock
/// readings) lives under "header"; the rest is deterministic.
class Manifest {
public:
  explicit Manifest(std::string subcommand) : sub_(std::move(subcommand)), t0_(std::chrono::steady_clock::now()) {
    body_["subcommand"] = sub_;
    body_["version"] = version;
    body_["config"] = nlohmann::ordered_json::object();
    body_["outputs"] = nlohmann::ordered_json::object();
    body_["checks"] = nlohmann::ordered_json::array();
  }

  nlohmann::ordered_json &config() { return body_["config"]; }
  nlohmann::ordered_json &outputs() { return body_["outputs"]; }

  void check(const std::string &name, bool pass, const std::string &detail = {}) {
    nlohmann::ordered_json c{{"name", name}, {"pass", pass}};
    if (!detail.empty())
      c["detail"] = detail;
    body_["checks"].push_back(c);
  }

  /// Two-column series for plotting (x, y).
  void plot(const std::string &name, const std::vector<double> &x, const std::vector<double> &y) {
    body_["plots"].push_back({{"name", name}, {"x", x}, {"y", y}});
  }

  bool passed() const {
    for (const auto &c : body_["checks"])
      if (!c["pass"].get<bool>())
        return false;
    return true;
  }

  std::vector<std::string> failures() const {
    std::vector<std::string> f;
    for (const auto &c : body_["checks"])
      if (!c["pass"].get<bool>())
        f.push_back(c["name"].get<std::string>());
    return f;
  }

  nlohmann::ordered_json finish() const {
    nlohmann::ordered_json j;
    auto now = std::chrono::system_clock::now();
    std::time_t tt = std::chrono::system_clock::to_time_t(now);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&tt));
    double el = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0_).count();
    j["header"] = {{"tool", "blab"}, {"finished", buf}, {"elapsed_s", el}};
    for (auto it = body_.begin(); it != body_.end(); ++it)
      j[it.key()] = it.value();
    j["passed"] = passed();
    j["failures"] = failures();
    return j;
  }

private:
  std::string sub_;
  std::chrono::steady_clock::time_point t0_;
  nlohmann::ordered_json body_;
};

/// Files staged in memory and written together once a run has succeeded,
/// so a failing configuration leaves nothing behind.
class OutputSet {
public:
  void add(std::string name, std::string content) { files_.emplace_back(std::move(name), std::move(content)); }

  void write(const std::filesystem::path &dir) const {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec)
      throw ConfigError("cannot create output directory '" + dir.string() + "': " + ec.message());
    for (const auto &[name, content] : files_) {
      auto path = dir / name;
      std::filesystem::create_directories(path.parent_path(), ec);
      auto tmp = path;
      tmp += ".tmp";
      {
        std::ofstream os(tmp, std::ios::binary);
        if (!os)
          throw ResourceError("cannot write '" + tmp.string() + "'");
        os << content;
      }
      std::filesystem::rename(tmp, path);
    }
  }

  const std::vector<std::pair<std::string, std::string>> &files() const { return files_; }

private:
  std::vector<std::pair<std::string, std::string>> files_;
};

/// Merge manifests: grouped by (subcommand, kappa); within a group the
/// configs must agree. Overall PASS is the conjunction of the inputs.
struct MergedReport {
  nlohmann::ordered_json summary;
  std::vector<std::pair<std::string, std::string>> plot_files; ///< name, two-column text
  bool passed = true;
};

inline std::string group_key(const nlohmann::json &m) {
  std::string sub = m.value("subcommand", "?");
  std::string k = "none";
  if (m.contains("config") && m["config"].contains("kappa"))
    k = m["config"]["kappa"].is_string() ? m["config"]["kappa"].get<std::string>() : m["config"]["kappa"].dump();
  return sub + "/kappa=" + k;
}

inline MergedReport emit_report(const std::vector<nlohmann::ordered_json> &manifests) {
  if (manifests.empty())
    throw ConfigError("report: need at least one manifest");
  MergedReport r;
  std::map<std::string, std::vector<const nlohmann::ordered_json *>> groups;
  for (const auto &m : manifests) {
    if (!m.contains("subcommand") || !m.contains("config") || !m.contains("passed"))
      throw ConfigError("report: input is not a run manifest");
    groups[group_key(m)].push_back(&m);
  }
  r.summary["inputs"] = manifests.size();
  for (const auto &[key, ms] : groups) {
    const auto &c0 = (*ms.front())["config"];
    for (std::size_t i = 1; i < ms.size(); ++i) {
      const auto &ci = (*ms[i])["config"];
      std::vector<std::string> diff;
      for (auto it = c0.begin(); it != c0.end(); ++it)
        if (!ci.contains(it.key()) || ci[it.key()] != it.value())
          diff.push_back(it.key());
      for (auto it = ci.begin(); it != ci.end(); ++it)
        if (!c0.contains(it.key()))
          diff.push_back(it.key());
      if (!diff.empty()) {
        std::string f;
        for (const auto &d : diff)
          f += (f.empty() ? "" : ", ") + d;
        throw ConfigError("report: conflicting configs in group " + key + ": " + f);
      }
    }
    nlohmann::ordered_json g;
    g["config"] = c0;
    bool pass = true;
    for (const auto *m : ms) {
      pass = pass && (*m)["passed"].get<bool>();
      for (const auto &c : (*m)["checks"])
        g["checks"].push_back(c);
      g["outputs"].push_back((*m)["outputs"]);
      if (m->contains("plots"))
        for (const auto &p : (*m)["plots"]) {
          std::ostringstream os;
          const auto &x = p["x"], &y = p["y"];
          for (std::size_t i = 0; i < x.size() && i < y.size(); ++i)
            os << fmt_double(x[i].get<double>()) << ' ' << fmt_double(y[i].get<double>()) << '\n';
          std::string name = key + "/" + p["name"].get<std::string>();
          for (char &ch : name)
            if (ch == '/' || ch == '=' || ch == ' ')
              ch = '_';
          r.plot_files.emplace_back(name + ".dat", os.str());
        }
    }
    g["passed"] = pass;
    r.passed = r.passed && pass;
    r.summary["groups"][key] = g;
  }
  r.summary["passed"] = r.passed;
  return r;
}

} // namespace blab
