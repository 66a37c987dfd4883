#pragma once
// Verb execution behind the CLI. Everything is computed in memory first and
// written only afterwards, so a failed validation or an exceeded cap leaves no
// output directory behind.

#include <cstdio>
#include <functional>
#include <memory>
#include <ostream>
#include <string>
#include <vector>

#include "config.hpp"
#include "io.hpp"
#include "suite.hpp"

namespace mpqhd {

namespace exit_code {
inline constexpr int pass = 0;
inline constexpr int fail = 1;          // some requested verdict failed
inline constexpr int invalid = 2;       // configuration / schema error
inline constexpr int cap_exceeded = 3;  // grid above the point cap
inline constexpr int internal = 4;      // I/O or unexpected failure
}  // namespace exit_code

namespace detail {

using io::json;
namespace fs = std::filesystem;

/// Deferred file writes; run only once every computation has succeeded.
struct Bundle {
  std::vector<std::pair<std::string, std::function<void(const fs::path&)>>> files;
  json summary = json::object();

  void add(std::string name, std::function<void(const fs::path&)> w) { files.emplace_back(std::move(name), std::move(w)); }
  void add_json(std::string name, json j) {
    auto p = std::make_shared<json>(std::move(j));
    add(std::move(name), [p](const fs::path& f) { io::write_json(*p, f); });
  }
};

inline std::string entry_line(const suite::Entry& e) {
  const auto& r = e.report;
  char buf[320];
  const auto o = r.order();
  char ord[32] = "-";
  if (o) std::snprintf(ord, sizeof ord, "%.3f", *o);
  const auto& f = r.finest();
  std::snprintf(buf, sizeof buf, "[%2d] %-4s %s %-20s %-34s %-6s %-2s Linf/scale=%.3e order=%s", e.criterion,
                r.pass ? "PASS" : "FAIL", r.informational ? "i" : " ", e.scenario.c_str(), r.law.c_str(),
                r.scope.c_str(), r.version.c_str(), f.scale > 0 ? f.Linf / f.scale : f.Linf, ord);
  return buf;
}

inline json entries_json(const std::vector<suite::Entry>& entries) {
  json a = json::array();
  for (const auto& e : entries) {
    auto j = io::to_json(e.report);
    j["criterion"] = e.criterion;
    j["scenario"] = e.scenario;
    a.push_back(std::move(j));
  }
  return a;
}

inline json checks_json(const std::vector<suite::Entry>& entries) {
  json a = json::array();
  for (const auto& e : entries)
    a.push_back({{"criterion", e.criterion},
                 {"scenario", e.scenario},
                 {"law", e.report.law},
                 {"scope", e.report.scope},
                 {"version", e.report.version},
                 {"informational", e.report.informational},
                 {"verdict", e.report.pass ? "pass" : "fail"}});
  return a;
}

inline json criteria_json(const std::vector<suite::CriterionVerdict>& cv) {
  json a = json::array();
  for (const auto& v : cv) {
    if (!v.applicable) continue;
    a.push_back({{"criterion", v.id},
                 {"title", v.title},
                 {"gated_checks", v.gated},
                 {"failed_checks", v.failed},
                 {"missing_evidence", v.missing},
                 {"verdict", v.pass ? "pass" : "fail"}});
  }
  return a;
}

inline suite::Options options(const RunConfig& c) {
  suite::Options o;
  o.levels = c.levels;
  o.eps = c.eps;
  o.cap = c.cap;
  o.seed = c.seed;
  return o;
}

/// Reference state, optionally at --points per axis.
inline WaveField reference_state(const Scenario& sc, const RunConfig& c, bool renormalize = true) {
  const Grid g = c.points ? sc.grid(*c.points, c.cap) : sc.grid(c.cap);
  return sc.wavefield(g, renormalize);
}

inline std::vector<Scope> scopes(const SystemSpec& spec) { return suite::scopes(spec); }

inline VectorField as_physical(const ConfigVectorField& f, FieldKind kind) {
  VectorField v;
  v.mesh = f.grid.mesh;
  v.kind = kind;
  v.comp = f.comp;
  v.defined = f.defined;
  return v;
}

// ---------------------------------------------------------------- verbs

inline bool do_fields(const RunConfig& c, const Scenario& sc, Bundle& b, std::ostream& log) {
  auto psi = std::make_shared<WaveField>(reference_state(sc, c));
  json fj;
  fj["scenario"] = sc.name;
  fj["config_points"] = psi->grid.size();
  fj["norm"] = psi->norm2();
  json per = json::object();
  for (Scope s : scopes(sc.spec)) {
    const std::string sn = s.name(sc.spec);
    auto rho = std::make_shared<ScalarField>(mass_density(*psi, s));
    auto j = std::make_shared<VectorField>(mass_current(*psi, s));
    auto v = std::make_shared<VectorField>(mean_velocity(*rho, *j, c.eps));
    auto P = std::make_shared<ScalarField>(scalar_quantum_pressure(*psi, s));
    auto f = std::make_shared<VectorField>(force_density(*psi, sc.spec, s));
    per[sn] = {{"rho", io::field_summary(*rho)}, {"j", io::field_summary(*j)}, {"v", io::field_summary(*v)},
               {"P", io::field_summary(*P)}, {"f", io::field_summary(*f)}};
    b.add("rho_" + sn + ".csv", [rho](const fs::path& p) { io::write_scalar_csv(*rho, p); });
    b.add("j_" + sn + ".csv", [j](const fs::path& p) { io::write_vector_csv(*j, p); });
    b.add("v_" + sn + ".csv", [v](const fs::path& p) { io::write_vector_csv(*v, p); });
    b.add("P_" + sn + ".csv", [P](const fs::path& p) { io::write_scalar_csv(*P, p); });
    b.add("f_" + sn + ".csv", [f](const fs::path& p) { io::write_vector_csv(*f, p); });
  }
  if (sc.single_particle()) {
    const std::string sn = sc.spec.sorts[0].label;
    auto w = std::make_shared<VectorField>(as_physical(particle_velocity(*psi, {0, 0}, c.eps), FieldKind::velocity));
    auto d = std::make_shared<VectorField>(as_physical(osmotic_velocity(*psi, {0, 0}, c.eps), FieldKind::osmotic));
    per[sn]["w"] = io::field_summary(*w);
    per[sn]["d"] = io::field_summary(*d);
    per[sn]["momentum_expectation"] = momentum_expectation(*psi, {0, 0});
    b.add("w_" + sn + ".csv", [w](const fs::path& p) { io::write_vector_csv(*w, p); });
    b.add("d_" + sn + ".csv", [d](const fs::path& p) { io::write_vector_csv(*d, p); });
  }
  fj["fields"] = per;
  if (sc.name == "gaussian1d") {
    json t = json::array();
    for (const auto& e : gaussian_reference_values(sc.p("sigma"), sc.p("k0"), sc.spec.sorts[0].mass, sc.spec.hbar))
      t.push_back(io::to_json(e));
    fj["reference_values"] = t;
  }
  if (psi->grid.mesh.rank() <= 2)
    b.add("wavefield.csv", [psi](const fs::path& p) { io::write_wavefield_csv(*psi, p); });
  // one writer produces both wavefield.bin and wavefield.hdr
  b.add("wavefield.bin", [psi](const fs::path& p) { io::save_wavefield(*psi, fs::path(p).replace_extension()); });
  b.add_json("fields.json", fj);
  log << "fields of " << sc.name << " on " << psi->grid.size() << " configuration points\n";
  return true;
}

inline bool do_tensors(const RunConfig& c, const Scenario& sc, Bundle& b, std::ostream& log) {
  const WaveField psi = reference_state(sc, c);
  json tj;
  tj["scenario"] = sc.name;
  json list = json::array();
  for (Scope s : scopes(sc.spec))
    for (Family fam : {Family::momentum_flow, Family::pressure})
      for (Version v : {Version::K, Version::W}) {
        auto set = std::make_shared<TensorSet>(tensor_set(psi, s, fam, v));
        const std::string stem = to_string(fam) + "_" + to_string(v) + "_" + s.name(sc.spec);
        for (auto [part, t] : {std::pair{"full", &set->full}, std::pair{"cl", &set->classical},
                               std::pair{"qu", &set->quantum}}) {
          auto js = io::tensor_summary(*t);
          js["scope"] = s.name(sc.spec);
          list.push_back(js);
          const std::string name = stem + (std::string(part) == "full" ? "" : std::string("_") + part) + ".csv";
          b.add(name, [set, t](const fs::path& p) { io::write_tensor_csv(*t, p); });
        }
      }
  tj["tensors"] = list;
  const auto entries = suite::tensor_identities(sc, options(c), &psi);
  tj["identities"] = entries_json(entries);
  b.add_json("tensors.json", tj);
  b.summary["checks"] = checks_json(entries);
  for (const auto& e : entries) log << entry_line(e) << "\n";
  return suite::all_pass(entries);
}

inline bool do_check(const RunConfig& c, const Scenario& sc, Bundle& b, std::ostream& log) {
  const auto entries = suite::check_scenario(sc, options(c));
  for (const auto& e : entries) log << entry_line(e) << "\n";
  b.add_json("residuals.json", {{"scenario", sc.name}, {"reports", entries_json(entries)}});
  b.summary["checks"] = checks_json(entries);
  b.summary["criteria"] = criteria_json(suite::criterion_verdicts(entries));
  return suite::all_pass(entries);
}

inline bool do_cyl(const RunConfig& c, const Scenario& sc, Bundle& b, std::ostream& log) {
  const auto res = suite::cylindrical(sc, options(c));
  json cj;
  cj["scenario"] = sc.name;
  cj["symmetry"] = io::to_json(res.symmetry);
  log << "azimuthal check: " << res.symmetry.summary() << "\n";
  if (res.symmetry.pass) {
    auto parts = std::make_shared<CylPressureParts>(
        cyl_pressure_parts(reference_state(sc, c, false), 0, res.symmetry));
    b.add("cyl_parts.csv", [parts](const fs::path& p) { io::write_cyl_parts_csv(*parts, p); });
  }
  json lv = json::array();
  for (const auto& L : res.levels)
    lv.push_back({{"h", L.h}, {"scale", L.scale}, {"diff_K", L.diff_K}, {"diff_W", L.diff_W}, {"l2_K", L.l2_K},
                  {"l2_W", L.l2_W}, {"ephi_fast", L.ephi_fast}, {"ephi_cart", L.ephi_cart},
                  {"gauge_diff", L.gauge_diff}, {"reduced_diff", L.reduced_diff}, {"offdiag_K2", L.offdiag_K2},
                  {"symmetry_rel", L.symmetry_rel}});
  cj["levels"] = lv;
  cj["reports"] = entries_json(res.entries);
  for (const auto& e : res.entries) log << entry_line(e) << "\n";
  b.add_json("cyl.json", cj);
  b.summary["checks"] = checks_json(res.entries);
  return suite::all_pass(res.entries);
}

inline bool do_report(const RunConfig& c, Bundle& b, std::ostream& log) {
  std::vector<Scenario> list;
  if (c.has_scenario()) list.push_back(c.resolve());
  else list = bundled_scenarios();
  std::vector<suite::Entry> all;
  json per = json::object();
  for (const auto& sc : list) {
    auto o = options(c);
    o.levels = std::min(o.levels, sc.levels.size());
    const auto e = suite::check_scenario(sc, o);
    per[sc.name] = entries_json(e);
    all.insert(all.end(), e.begin(), e.end());
  }
  const auto cv = suite::criterion_verdicts(all);
  bool ok = suite::all_pass(all);
  for (const auto& v : cv) {
    if (!v.applicable) continue;
    ok = ok && v.pass;
    log << (v.pass ? "PASS" : "FAIL") << "  criterion " << v.id << ": " << v.title << " (" << v.gated
        << " checks, " << v.failed << " failed)";
    for (const auto& m : v.missing) log << " [no evidence from " << m << "]";
    log << "\n";
  }
  b.add_json("report.json", {{"criteria", criteria_json(cv)}, {"reports", per}});
  b.summary["criteria"] = criteria_json(cv);
  b.summary["checks"] = checks_json(all);
  return ok;
}

}  // namespace detail

/**
 * @brief Executes one configured verb. Returns the process exit code; human
 * progress goes to `log`, diagnostics to `err`.
 */
inline int run(const RunConfig& c, std::ostream& log, std::ostream& err) {
  namespace fs = std::filesystem;
  try {
    c.validate();
    if (c.verb == "list") {
      for (const auto& [name, desc] : list_scenarios(c.filter)) log << name << "  " << desc << "\n";
      return exit_code::pass;
    }
    detail::Bundle b;
    bool ok = true;
    std::string scen = c.has_scenario() ? c.resolve().name : "all";
    if (c.verb == "report") {
      ok = detail::do_report(c, b, log);
    } else {
      const Scenario sc = c.resolve();
      if (c.verb == "fields") ok = detail::do_fields(c, sc, b, log);
      else if (c.verb == "tensors") ok = detail::do_tensors(c, sc, b, log);
      else if (c.verb == "check") ok = detail::do_check(c, sc, b, log);
      else if (c.verb == "cyl") ok = detail::do_cyl(c, sc, b, log);
    }
    b.summary["tool"] = "mpqhd";
    b.summary["format"] = 1;
    b.summary["verb"] = c.verb;
    b.summary["scenario"] = scen;
    b.summary["options"] = {{"levels", c.levels},
                            {"eps", c.eps},
                            {"cap", c.cap},
                            {"seed", io::hex64(c.seed)},
                            {"points", c.points ? io::json(*c.points) : io::json(nullptr)}};
    std::vector<std::string> names;
    for (const auto& f : b.files) {
      names.push_back(f.first);
      if (f.first == "wavefield.bin") names.push_back("wavefield.hdr");
    }
    names.push_back("summary.json");
    std::sort(names.begin(), names.end());
    b.summary["artifacts"] = names;
    b.summary["verdict"] = ok ? "pass" : "fail";
    try {
      fs::create_directories(c.out);
      for (const auto& [name, write] : b.files) write(c.out / name);
      io::write_json(b.summary, c.out / "summary.json");
    } catch (const std::exception& e) {
      err << "error: " << e.what() << "\n";
      return exit_code::internal;
    }
    log << "verdict: " << (ok ? "pass" : "fail") << "  (" << (c.out / "summary.json").string() << ")\n";
    return ok ? exit_code::pass : exit_code::fail;
  } catch (const CapExceeded& e) {
    err << "error: " << e.what() << "\n";
    return exit_code::cap_exceeded;
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << "\n";
    return exit_code::invalid;
  } catch (const SpecMismatch& e) {
    err << "error: " << e.what() << "\n";
    return exit_code::invalid;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return exit_code::internal;
  }
}

}  // namespace mpqhd
