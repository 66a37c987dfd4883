#pragma once
// Persistence and export: wave-field binary + sidecar header, CSV dumps of
// fields/tensors/cylindrical elements, JSON summaries and residual reports.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>  // vendored nlohmann::json

#include "balance.hpp"
#include "cylindrical.hpp"
#include "scenarios.hpp"

namespace mpqhd::io {

using json = nlohmann::json;
namespace fs = std::filesystem;

/// Round-trip decimal with '.' regardless of the global locale.
inline std::string num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline std::string hex64(std::uint64_t v) {
  char buf[20];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

// ---------------------------------------------------------------- wave fields

/**
 * @brief Writes `<base>.bin` (interleaved re/im doubles, row-major, host byte
 * order) and `<base>.hdr` (text: axis bounds, counts, time tag, spec hash).
 */
inline void save_wavefield(const WaveField& psi, const fs::path& base) {
  fs::path bin = base, hdr = base;
  bin += ".bin";
  hdr += ".hdr";
  {
    std::ofstream h(hdr);
    if (!h) throw ConfigError("cannot write " + hdr.string());
    h << "format = mpqhd-wavefield-1\n";
    h << "spec_hash = " << hex64(psi.spec.hash()) << "\n";
    h << "spec = " << psi.spec.canonical() << "\n";
    h << "spatial_dim = " << psi.spec.spatial_dim << "\n";
    h << "time_tag = " << num(psi.time_tag) << "\n";
    h << "axes = " << psi.grid.mesh.rank() << "\n";
    for (std::size_t k = 0; k < psi.grid.mesh.rank(); ++k) {
      const auto& a = psi.grid.mesh.axes[k];
      h << "axis" << k << " = " << num(a.min) << " " << num(a.max) << " " << a.n << "\n";
    }
  }
  std::ofstream b(bin, std::ios::binary);
  if (!b) throw ConfigError("cannot write " + bin.string());
  std::vector<double> flat(2 * psi.values.size());
  for (std::size_t k = 0; k < psi.values.size(); ++k) {
    flat[2 * k] = psi.values[k].real();
    flat[2 * k + 1] = psi.values[k].imag();
  }
  b.write(reinterpret_cast<const char*>(flat.data()), static_cast<std::streamsize>(flat.size() * sizeof(double)));
}

namespace detail {

inline std::map<std::string, std::string> read_header(const fs::path& hdr) {
  std::ifstream in(hdr);
  if (!in) throw ConfigError("cannot read " + hdr.string());
  std::map<std::string, std::string> kv;
  std::string line;
  while (std::getline(in, line)) {
    const auto eq = line.find(" = ");
    if (eq == std::string::npos) continue;
    kv[line.substr(0, eq)] = line.substr(eq + 3);
  }
  return kv;
}

}  // namespace detail

/** @brief Loads a wave field saved by save_wavefield; the spec hash must match `spec`. */
inline WaveField load_wavefield(const fs::path& base, const SystemSpec& spec, std::size_t cap = default_point_cap) {
  fs::path bin = base, hdr = base;
  bin += ".bin";
  hdr += ".hdr";
  auto kv = detail::read_header(hdr);
  if (kv["format"] != "mpqhd-wavefield-1") throw ConfigError("unknown wave-field format in " + hdr.string());
  if (kv["spec_hash"] != hex64(spec.hash()))
    throw SpecMismatch("wave field " + base.string() + " was written for a different system");
  std::vector<Axis> axes;
  std::size_t rank = 0;
  try {
    rank = std::stoul(kv.at("axes"));
    for (std::size_t k = 0; k < rank; ++k) {
      std::istringstream is(kv.at("axis" + std::to_string(k)));
      is.imbue(std::locale::classic());
      Axis a;
      is >> a.min >> a.max >> a.n;
      if (!is) throw ConfigError("bad axis line");
      axes.push_back(a);
    }
  } catch (const std::out_of_range&) {
    throw ConfigError("incomplete wave-field header " + hdr.string());
  }
  Grid g = build_grid(spec, axes, cap);
  std::ifstream b(bin, std::ios::binary);
  if (!b) throw ConfigError("cannot read " + bin.string());
  std::vector<double> flat(2 * g.size());
  b.read(reinterpret_cast<char*>(flat.data()), static_cast<std::streamsize>(flat.size() * sizeof(double)));
  if (b.gcount() != static_cast<std::streamsize>(flat.size() * sizeof(double)) || b.peek() != EOF)
    throw SpecMismatch("wave-field payload size does not match its header");
  std::vector<cplx> v(g.size());
  for (std::size_t k = 0; k < v.size(); ++k) v[k] = cplx(flat[2 * k], flat[2 * k + 1]);
  return WaveField(std::move(g), spec, std::move(v), std::stod(kv["time_tag"]));
}

// ---------------------------------------------------------------- CSV

namespace detail {

inline std::ofstream open_csv(const fs::path& p) {
  std::ofstream out(p);
  if (!out) throw ConfigError("cannot write " + p.string());
  return out;
}

inline void coord_header(std::ostream& os, std::size_t d) {
  for (std::size_t a = 0; a < d; ++a) os << (a ? "," : "") << "q" << a + 1;
}

inline void coords(std::ostream& os, const Mesh& m, std::size_t lin) {
  const auto idx = m.unravel(lin);
  for (std::size_t a = 0; a < idx.size(); ++a) os << (a ? "," : "") << num(m.axes[a].x(idx[a]));
}

}  // namespace detail

/// Configuration-space CSV (at most two axes): q..., re, im, density.
inline void write_wavefield_csv(const WaveField& psi, const fs::path& p) {
  if (psi.grid.mesh.rank() > 2) throw ConfigError("wave-field CSV export supports at most two axes");
  auto out = detail::open_csv(p);
  detail::coord_header(out, psi.grid.mesh.rank());
  out << ",re,im,density\n";
  for (std::size_t k = 0; k < psi.values.size(); ++k) {
    detail::coords(out, psi.grid.mesh, k);
    out << "," << num(psi.values[k].real()) << "," << num(psi.values[k].imag()) << ","
        << num(std::norm(psi.values[k])) << "\n";
  }
}

inline void write_scalar_csv(const ScalarField& f, const fs::path& p) {
  auto out = detail::open_csv(p);
  detail::coord_header(out, f.mesh.rank());
  out << ",value,mask\n";
  for (std::size_t k = 0; k < f.values.size(); ++k) {
    detail::coords(out, f.mesh, k);
    out << "," << num(f.values[k]) << "," << (f.defined.empty() || f.defined[k] ? 1 : 0) << "\n";
  }
}

inline void write_vector_csv(const VectorField& f, const fs::path& p) {
  auto out = detail::open_csv(p);
  detail::coord_header(out, f.mesh.rank());
  for (std::size_t c = 0; c < f.comp.size(); ++c) out << ",v" << c + 1;
  out << ",mask\n";
  const std::size_t n = f.comp.empty() ? 0 : f.comp[0].size();
  for (std::size_t k = 0; k < n; ++k) {
    detail::coords(out, f.mesh, k);
    for (const auto& c : f.comp) out << "," << num(c[k]);
    out << "," << (f.defined.empty() || f.defined[k] ? 1 : 0) << "\n";
  }
}

/// One row per point: q..., then T_11, T_12, ... row-major.
inline void write_tensor_csv(const TensorField& t, const fs::path& p) {
  auto out = detail::open_csv(p);
  detail::coord_header(out, t.mesh.rank());
  for (std::size_t a = 0; a < t.dim; ++a)
    for (std::size_t b = 0; b < t.dim; ++b) out << ",T" << a + 1 << b + 1;
  out << "\n";
  for (std::size_t k = 0; k < t.points(); ++k) {
    detail::coords(out, t.mesh, k);
    for (const auto& c : t.comp) out << "," << num(c[k]);
    out << "\n";
  }
}

/// Cylindrical elements over (rho, z) for rho >= 0 (the x >= 0 half of the plane).
inline void write_cyl_parts_csv(const CylPressureParts& c, const fs::path& p) {
  auto out = detail::open_csv(p);
  out << "rho,z";
  for (const char* part : {"p1", "p2K"})
    for (int e = 0; e < 6; ++e) out << "," << part << "_" << CylPressureParts::elem_name(e);
  out << ",P,mask\n";
  const auto& X = c.plane.axes[0];
  const auto& Z = c.plane.axes[1];
  for (std::size_t i = 0; i < X.n; ++i) {
    if (X.x(i) < -1e-9 * X.h()) continue;
    for (std::size_t l = 0; l < Z.n; ++l) {
      const std::size_t k = i * Z.n + l;
      out << num(std::abs(X.x(i))) << "," << num(Z.x(l));
      for (const auto& e : c.part1) out << "," << num(e[k]);
      for (const auto& e : c.part2K) out << "," << num(e[k]);
      out << "," << num(c.P[k]) << "," << int(c.mask[k]) << "\n";
    }
  }
}

// ---------------------------------------------------------------- JSON

/// min / max / L2 / integral of a scalar over its defined points.
inline json field_summary(const ScalarField& f) {
  double mn = 1e300, mx = -1e300, s2 = 0.0;
  std::size_t n = 0;
  for (std::size_t k = 0; k < f.values.size(); ++k) {
    if (!f.defined.empty() && !f.defined[k]) continue;
    mn = std::min(mn, f.values[k]);
    mx = std::max(mx, f.values[k]);
    s2 += f.values[k] * f.values[k];
    ++n;
  }
  json j;
  j["kind"] = to_string(f.kind);
  j["points"] = n;
  j["min"] = n ? mn : 0.0;
  j["max"] = n ? mx : 0.0;
  j["L2"] = std::sqrt(s2 * f.mesh.cell_volume());
  j["integral"] = f.mesh.integrate(f.values);
  return j;
}

inline json field_summary(const VectorField& f) {
  json j;
  j["kind"] = to_string(f.kind);
  json comps = json::array();
  for (const auto& c : f.comp) {
    ScalarField s;
    s.mesh = f.mesh;
    s.kind = f.kind;
    s.values = c;
    s.defined = f.defined;
    auto cj = field_summary(s);
    cj.erase("kind");
    comps.push_back(cj);
  }
  j["components"] = comps;
  return j;
}

/// Per-entry max |.| and L2 norms.
inline json tensor_summary(const TensorField& t) {
  json j;
  j["family"] = to_string(t.family);
  j["version"] = to_string(t.version);
  j["part"] = to_string(t.part);
  j["asymmetry"] = asymmetry(t);
  json e = json::object();
  for (std::size_t a = 0; a < t.dim; ++a)
    for (std::size_t b = 0; b < t.dim; ++b) {
      double s2 = 0.0;
      for (double v : t.at(a, b)) s2 += v * v;
      e["T" + std::to_string(a + 1) + std::to_string(b + 1)] = {
          {"max_abs", max_abs(t.at(a, b))}, {"L2", std::sqrt(s2 * t.mesh.cell_volume())}};
    }
  j["entries"] = e;
  return j;
}

inline json to_json(const ResidualReport& r) {
  json j;
  j["law"] = r.law;
  j["scope"] = r.scope;
  if (!r.version.empty()) j["version"] = r.version;
  json lv = json::array();
  for (const auto& l : r.levels)
    lv.push_back({{"h", l.h}, {"L2", l.L2}, {"Linf", l.Linf}, {"scale", l.scale},
                  {"Linf_rel", l.scale > 0 ? l.Linf / l.scale : 0.0}});
  j["levels"] = lv;
  j["orders"] = r.orders;
  if (auto o = r.order()) j["order"] = *o;
  j["tolerances"] = r.tolerances;
  j["extra"] = r.extra;
  j["informational"] = r.informational;
  j["verdict"] = r.pass ? "pass" : "fail";
  return j;
}

inline json to_json(const SymmetryReport& s) {
  return {{"density_variation", s.density_variation}, {"density_scale", s.density_scale},
          {"current_variation", s.current_variation}, {"current_phi", s.current_phi},
          {"current_scale", s.current_scale}, {"tolerance", s.tolerance}, {"orbits", s.orbits},
          {"verdict", s.pass ? "pass" : "fail"}};
}

inline json to_json(const ExpectedValue& e) {
  return {{"quantity", e.quantity}, {"formula", e.formula}, {"value", e.value}, {"source", e.source}};
}

/// Pretty JSON with sorted keys; NaN/inf become null.
inline void write_json(const json& j, const fs::path& p) {
  std::ofstream out(p);
  if (!out) throw ConfigError("cannot write " + p.string());
  out << j.dump(2) << "\n";
}

}  // namespace mpqhd::io
