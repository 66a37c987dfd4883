#pragma once
// Run configuration: line-oriented `key = value` files with [sections], schema
// validation, and inline (non-bundled) systems built from Gaussian packets or a
// saved wave field. The schema is documented in README.md.

#include <algorithm>
#include <charconv>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "io.hpp"
#include "scenarios.hpp"

namespace mpqhd {

inline constexpr std::uint64_t default_seed = 0x5eed5eed5eedULL;

inline const std::vector<std::string>& verbs() {
  static const std::vector<std::string> v{"list", "fields", "tensors", "check", "cyl", "report"};
  return v;
}

/** @brief Everything one CLI invocation needs; flags override file values. */
struct RunConfig {
  std::string verb;
  std::string scenario;              // bundled name; empty for `report` (all) or an inline system
  std::optional<Scenario> custom;    // from [system]/[sort.*]/[grid]
  std::string filter;                // `list` only
  std::filesystem::path out = "mpqhd-out";
  std::size_t levels = 3;
  std::optional<std::size_t> points;  // reference resolution override for fields/tensors/cyl
  double eps = default_eps;
  std::size_t cap = default_point_cap;
  std::uint64_t seed = default_seed;

  bool has_scenario() const { return custom.has_value() || !scenario.empty(); }

  Scenario resolve() const {
    if (custom) return *custom;
    return find_scenario(scenario);
  }

  /// Throws ConfigError listing every problem found.
  void validate() const;
};

namespace detail {

inline std::string trim(std::string s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

inline std::optional<double> to_double(const std::string& s) {
  double v = 0.0;
  const auto t = trim(s);
  const char* b = t.data();
  const char* e = b + t.size();
  if (!t.empty() && *b == '+') ++b;
  const auto r = std::from_chars(b, e, v);
  if (t.empty() || r.ec != std::errc() || r.ptr != e || !std::isfinite(v)) return std::nullopt;
  return v;
}

inline std::optional<std::uint64_t> to_u64(const std::string& s) {
  const auto t = trim(s);
  if (t.empty() || t[0] == '-' || t[0] == '+') return std::nullopt;
  try {
    std::size_t pos = 0;
    const auto v = std::stoull(t, &pos, 0);
    if (pos != t.size()) return std::nullopt;
    return v;
  } catch (const std::exception&) {
    return std::nullopt;
  }
}

/// "a b; c d" -> {{a, b}, {c, d}}.
inline std::optional<std::vector<std::vector<double>>> to_rows(const std::string& s) {
  std::vector<std::vector<double>> rows;
  std::stringstream ss(s);
  std::string part;
  while (std::getline(ss, part, ';')) {
    std::vector<double> row;
    std::istringstream is(part);
    std::string tok;
    while (is >> tok) {
      auto v = to_double(tok);
      if (!v) return std::nullopt;
      row.push_back(*v);
    }
    if (row.empty()) return std::nullopt;
    rows.push_back(std::move(row));
  }
  if (rows.empty()) return std::nullopt;
  return rows;
}

struct Entry {
  std::string value;
  int line = 0;
};

using Section = std::map<std::string, Entry>;

/// Collects schema problems as "line N: message".
struct Diagnostics {
  std::vector<std::string> items;
  void add(int line, const std::string& msg) {
    items.push_back(line > 0 ? "line " + std::to_string(line) + ": " + msg : msg);
  }
  void raise() const {
    if (items.empty()) return;
    std::string all = "invalid configuration:";
    for (const auto& s : items) all += "\n  " + s;
    throw ConfigError(all);
  }
};

/// Typed access to one section; unknown keys are reported by `finish`.
class Reader {
 public:
  Reader(const std::string& name, const Section& s, Diagnostics& d) : name_(name), s_(s), d_(d) {}

  std::optional<std::string> str(const std::string& key) {
    used_.insert(key);
    auto it = s_.find(key);
    if (it == s_.end()) return std::nullopt;
    return it->second.value;
  }

  std::optional<double> real(const std::string& key) {
    auto v = str(key);
    if (!v) return std::nullopt;
    auto r = to_double(*v);
    if (!r) d_.add(line(key), "[" + name_ + "] " + key + ": expected a finite number, got '" + *v + "'");
    return r;
  }

  std::optional<std::uint64_t> count(const std::string& key) {
    auto v = str(key);
    if (!v) return std::nullopt;
    auto r = to_u64(*v);
    if (!r) d_.add(line(key), "[" + name_ + "] " + key + ": expected a non-negative integer, got '" + *v + "'");
    return r;
  }

  std::optional<std::vector<std::vector<double>>> rows(const std::string& key) {
    auto v = str(key);
    if (!v) return std::nullopt;
    auto r = to_rows(*v);
    if (!r) d_.add(line(key), "[" + name_ + "] " + key + ": expected numbers separated by spaces and ';'");
    return r;
  }

  int line(const std::string& key) const {
    auto it = s_.find(key);
    return it == s_.end() ? 0 : it->second.line;
  }

  void finish() {
    for (const auto& [k, e] : s_)
      if (!used_.count(k)) d_.add(e.line, "[" + name_ + "] unknown key '" + k + "'");
  }

 private:
  std::string name_;
  const Section& s_;
  Diagnostics& d_;
  std::set<std::string> used_;
};

/// Isotropic d-dimensional Gaussian packet sampled on the physical mesh.
inline std::vector<cplx> packet(const Mesh& phys, const std::vector<double>& x0, double sigma,
                                const std::vector<double>& k) {
  std::vector<std::vector<cplx>> f1;
  for (std::size_t a = 0; a < phys.rank(); ++a) f1.push_back(gaussian_1d(phys.axes[a], x0[a], sigma, k[a]));
  std::vector<cplx> out(phys.size());
  for (std::size_t lin = 0; lin < out.size(); ++lin) {
    const auto idx = phys.unravel(lin);
    cplx v = 1.0;
    for (std::size_t a = 0; a < idx.size(); ++a) v *= f1[a][idx[a]];
    out[lin] = v;
  }
  return out;
}

struct PacketSet {
  std::vector<std::vector<double>> x0, k;
  std::vector<double> sigma;
};

}  // namespace detail

/**
 * @brief Parses a configuration file body. Flags given on the command line are
 * applied afterwards by the caller.
 */
inline RunConfig parse_config(std::istream& in) {
  detail::Diagnostics diag;
  std::map<std::string, detail::Section> sections;
  std::vector<std::string> order;
  std::string current;
  std::string raw;
  int ln = 0;
  while (std::getline(in, raw)) {
    ++ln;
    const auto hash = raw.find('#');
    const std::string line = detail::trim(hash == std::string::npos ? raw : raw.substr(0, hash));
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']' || line.size() < 3) {
        diag.add(ln, "malformed section header '" + line + "'");
        continue;
      }
      current = detail::trim(line.substr(1, line.size() - 2));
      if (sections.count(current)) diag.add(ln, "duplicate section [" + current + "]");
      sections[current];
      order.push_back(current);
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      diag.add(ln, "expected 'key = value', got '" + line + "'");
      continue;
    }
    if (current.empty()) {
      diag.add(ln, "key outside of any section");
      continue;
    }
    const std::string key = detail::trim(line.substr(0, eq));
    const std::string val = detail::trim(line.substr(eq + 1));
    if (key.empty()) diag.add(ln, "empty key");
    if (val.empty()) diag.add(ln, "key '" + key + "' has an empty value");
    auto& sec = sections[current];
    if (sec.count(key)) diag.add(ln, "duplicate key '" + key + "' in [" + current + "]");
    sec[key] = {val, ln};
  }

  RunConfig cfg;
  for (const auto& name : order) {
    const bool known = name == "run" || name == "system" || name == "grid" || name == "wavefield" ||
                       name == "tolerances" || name.rfind("sort.", 0) == 0;
    if (!known) diag.add(0, "unknown section [" + name + "]");
  }

  if (sections.count("run")) {
    detail::Reader r("run", sections["run"], diag);
    if (auto v = r.str("verb")) cfg.verb = *v;
    if (auto v = r.str("scenario")) cfg.scenario = *v;
    if (auto v = r.str("filter")) cfg.filter = *v;
    if (auto v = r.str("out")) cfg.out = *v;
    if (auto v = r.count("levels")) cfg.levels = *v;
    if (auto v = r.count("points")) cfg.points = *v;
    if (auto v = r.real("eps")) cfg.eps = *v;
    if (auto v = r.count("cap")) cfg.cap = *v;
    if (auto v = r.count("seed")) cfg.seed = *v;
    r.finish();
  }

  std::vector<std::string> sort_names;
  for (const auto& name : order)
    if (name.rfind("sort.", 0) == 0) sort_names.push_back(name);
  const bool inline_system = sections.count("system") || !sort_names.empty() || sections.count("grid") ||
                             sections.count("wavefield");
  if (!inline_system) {
    diag.raise();
    return cfg;
  }
  if (!cfg.scenario.empty()) diag.add(sections["run"]["scenario"].line, "give either [run] scenario or an inline [system], not both");
  if (!sections.count("system")) diag.add(0, "inline system needs a [system] section");
  if (sort_names.empty()) diag.add(0, "inline system needs at least one [sort.<label>] section");
  if (!sections.count("grid")) diag.add(0, "inline system needs a [grid] section");

  Scenario sc;
  sc.name = "custom";
  sc.description = "inline system from the configuration file";
  if (sections.count("system")) {
    detail::Reader r("system", sections["system"], diag);
    if (auto v = r.count("dim")) sc.spec.spatial_dim = static_cast<int>(*v);
    else diag.add(0, "[system] dim is required");
    if (auto v = r.real("hbar")) sc.spec.hbar = *v;
    if (auto v = r.str("potential")) {
      try {
        sc.spec.potential.kind = parse_potential_kind(*v);
      } catch (const ConfigError& e) {
        diag.add(r.line("potential"), std::string("[system] potential: ") + e.what());
      }
    }
    if (auto v = r.real("a")) sc.spec.potential.a = *v;
    if (auto v = r.real("b")) sc.spec.potential.b = *v;
    if (auto v = r.rows("coeff")) sc.spec.potential.coeff = *v;
    r.finish();
  }

  std::vector<detail::PacketSet> packets;
  bool any_packets = false;
  for (const auto& name : sort_names) {
    detail::Reader r(name, sections[name], diag);
    SortSpec s;
    s.label = name.substr(5);
    if (s.label.empty()) diag.add(0, "[sort.] needs a label");
    if (auto v = r.real("mass")) s.mass = *v;
    if (auto v = r.real("charge")) s.charge = *v;
    if (auto v = r.count("count")) s.count = static_cast<int>(*v);
    if (auto v = r.str("statistics")) {
      try {
        s.statistics = parse_statistics(*v);
      } catch (const ConfigError& e) {
        diag.add(r.line("statistics"), "[" + name + "] statistics: " + e.what());
      }
    }
    detail::PacketSet p;
    auto x0 = r.rows("x0");
    auto sg = r.rows("sigma");
    auto k = r.rows("k");
    if (x0 || sg || k) {
      any_packets = true;
      const std::size_t n = static_cast<std::size_t>(std::max(s.count, 0));
      const std::size_t d = static_cast<std::size_t>(std::max(sc.spec.spatial_dim, 0));
      if (!x0 || !sg) {
        diag.add(0, "[" + name + "] packets need both x0 and sigma");
      } else {
        p.x0 = *x0;
        p.k = k ? *k : std::vector<std::vector<double>>(n, std::vector<double>(d, 0.0));
        for (const auto& row : *sg) {
          if (row.size() != 1) diag.add(r.line("sigma"), "[" + name + "] sigma: one width per particle");
          p.sigma.push_back(row.front());
        }
        if (p.x0.size() != n || p.k.size() != n || p.sigma.size() != n)
          diag.add(r.line("x0"), "[" + name + "] x0, sigma and k need one ';'-separated entry per particle (" +
                                     std::to_string(n) + ")");
        for (const auto& row : p.x0)
          if (row.size() != d) diag.add(r.line("x0"), "[" + name + "] x0 entries need " + std::to_string(d) + " components");
        for (const auto& row : p.k)
          if (row.size() != d) diag.add(r.line("k"), "[" + name + "] k entries need " + std::to_string(d) + " components");
        for (double w : p.sigma)
          if (!(w > 0.0)) diag.add(r.line("sigma"), "[" + name + "] sigma must be positive");
      }
    }
    packets.push_back(std::move(p));
    sc.spec.sorts.push_back(s);
    r.finish();
  }

  Axis axis;
  if (sections.count("grid")) {
    detail::Reader r("grid", sections["grid"], diag);
    auto mn = r.real("min");
    auto mx = r.real("max");
    auto n = r.count("n");
    if (!mn || !mx || !n) diag.add(0, "[grid] needs min, max and n");
    if (mn) axis.min = *mn;
    if (mx) axis.max = *mx;
    if (n) axis.n = *n;
    if (auto lv = r.rows("levels")) {
      for (const auto& row : *lv)
        for (double x : row) {
          if (x < static_cast<double>(min_axis_points) || x != std::floor(x))
            diag.add(r.line("levels"), "[grid] levels must be integers >= " + std::to_string(min_axis_points));
          else
            sc.levels.push_back(static_cast<std::size_t>(x));
        }
    }
    r.finish();
  }
  std::string file;
  if (sections.count("wavefield")) {
    detail::Reader r("wavefield", sections["wavefield"], diag);
    if (auto v = r.str("file")) file = *v;
    r.finish();
  }
  if (sections.count("tolerances")) {
    detail::Reader r("tolerances", sections["tolerances"], diag);
    if (auto v = r.real("residual_rel")) sc.tol.residual_rel = *v;
    if (auto v = r.real("min_order")) sc.tol.min_order = *v;
    if (auto v = r.real("identity_rel")) sc.tol.identity_rel = *v;
    if (auto v = r.real("quantum_rel")) sc.tol.quantum_rel = *v;
    if (auto v = r.real("classical_rel")) sc.tol.classical_rel = *v;
    r.finish();
  }
  if (file.empty() == !any_packets) diag.add(0, "inline system needs either packets (x0/sigma/k in every [sort.*]) or [wavefield] file, exactly one");
  if (any_packets)
    for (std::size_t A = 0; A < packets.size(); ++A)
      if (packets[A].x0.empty()) diag.add(0, "[" + sort_names[A] + "] has no packets (x0/sigma)");

  diag.raise();
  try {
    sc.spec.validate();
  } catch (const ConfigError& e) {
    diag.add(0, std::string("[system] ") + e.what());
  }
  diag.raise();

  const std::size_t d = static_cast<std::size_t>(sc.spec.spatial_dim);
  sc.axes.assign(d, axis);
  if (sc.levels.empty()) sc.levels = {axis.n};
  if (!file.empty()) {
    sc.levels = {axis.n};
    sc.make = [file](const Scenario& s, const Grid& g, bool) {
      auto psi = io::load_wavefield(file, s.spec);
      if (!(psi.grid.mesh.axes == g.mesh.axes))
        throw ConfigError("wave field in '" + file + "' is not on the configured [grid]");
      return psi;
    };
  } else {
    sc.make = [packets](const Scenario& s, const Grid& g, bool) {
      const auto phys = g.physical();
      std::vector<std::vector<std::vector<cplx>>> f(s.spec.sorts.size());
      for (std::size_t A = 0; A < f.size(); ++A)
        for (std::size_t i = 0; i < packets[A].x0.size(); ++i)
          f[A].push_back(detail::packet(phys, packets[A].x0[i], packets[A].sigma[i], packets[A].k[i]));
      return symmetrize(f, s.spec, g);
    };
  }
  cfg.custom = std::move(sc);
  return cfg;
}

inline RunConfig load_config(const std::filesystem::path& p) {
  std::ifstream in(p);
  if (!in) throw ConfigError("cannot read configuration file '" + p.string() + "'");
  return parse_config(in);
}

inline void RunConfig::validate() const {
  detail::Diagnostics d;
  const auto& vs = verbs();
  if (std::find(vs.begin(), vs.end(), verb) == vs.end()) d.add(0, "unknown verb '" + verb + "'");
  d.raise();
  if (verb == "list") return;
  if (!(eps > 0.0) || !std::isfinite(eps)) d.add(0, "--eps must be a positive finite number");
  if (levels < 1) d.add(0, "--levels must be at least 1");
  if (points && *points < min_axis_points)
    d.add(0, "--points must be at least " + std::to_string(min_axis_points));
  if (cap < 1) d.add(0, "--cap-override must be positive");
  if (out.empty()) d.add(0, "--out must not be empty");
  if (verb != "report" && !has_scenario()) d.add(0, "verb '" + verb + "' needs a scenario");
  d.raise();
  if (!has_scenario()) return;
  Scenario sc;
  try {
    sc = resolve();
  } catch (const ConfigError& e) {
    d.add(0, e.what());
    d.raise();
  }
  if (levels > sc.levels.size() && (verb == "check" || verb == "cyl" || verb == "report"))
    d.add(0, "scenario '" + sc.name + "' has " + std::to_string(sc.levels.size()) + " refinement levels; --levels " +
                 std::to_string(levels) + " is too many");
  if (verb == "cyl" && !sc.azimuthal)
    d.add(0, "scenario '" + sc.name + "' is not an azimuthally symmetric 3D state; 'cyl' needs one (e.g. ring3d)");
  d.raise();
}

}  // namespace mpqhd
