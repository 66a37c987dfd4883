#pragma once
// Physical-space field containers shared by the hydro, tensor and balance code.

#include <cstdint>
#include <string>
#include <vector>

#include "configspace.hpp"

namespace mpqhd {

/** @brief One sort or the whole ensemble. */
struct Scope {
  bool total = false;
  std::size_t sort = 0;

  static Scope of_sort(std::size_t A) { return Scope{false, A}; }
  static Scope all() { return Scope{true, 0}; }

  std::string name(const SystemSpec& spec) const { return total ? "total" : spec.sorts.at(sort).label; }
  bool operator==(const Scope& o) const { return total == o.total && (total || sort == o.sort); }
};

inline Scope parse_scope(const std::string& s, const SystemSpec& spec) {
  if (s == "total") return Scope::all();
  return Scope::of_sort(spec.sort_index(s));
}

enum class FieldKind { density, current, velocity, osmotic, quantum_pressure, force, residual, generic };

inline std::string to_string(FieldKind k) {
  switch (k) {
    case FieldKind::density: return "density";
    case FieldKind::current: return "current";
    case FieldKind::velocity: return "velocity";
    case FieldKind::osmotic: return "osmotic";
    case FieldKind::quantum_pressure: return "quantum_pressure";
    case FieldKind::force: return "force";
    case FieldKind::residual: return "residual";
    default: return "generic";
  }
}

using Mask = std::vector<std::uint8_t>;

struct ScalarField {
  Mesh mesh;
  Scope scope;
  FieldKind kind = FieldKind::generic;
  std::vector<double> values;
  Mask defined;  // empty => defined everywhere
};

struct VectorField {
  Mesh mesh;
  Scope scope;
  FieldKind kind = FieldKind::generic;
  std::vector<std::vector<double>> comp;  // comp[c][point]
  Mask defined;

  std::size_t dim() const { return comp.size(); }
};

enum class Version { K, W };
enum class Family { momentum_flow, pressure };
enum class Part { full, classical, quantum, part1, part2 };

inline std::string to_string(Version v) { return v == Version::K ? "K" : "W"; }
inline std::string to_string(Family f) { return f == Family::momentum_flow ? "Pi" : "p"; }
inline std::string to_string(Part p) {
  switch (p) {
    case Part::classical: return "cl";
    case Part::quantum: return "qu";
    case Part::part1: return "part1";
    case Part::part2: return "part2";
    default: return "full";
  }
}

/** @brief Dense d x d real tensor per physical point, entries row-major. */
struct TensorField {
  Mesh mesh;
  Scope scope;
  Version version = Version::K;
  Family family = Family::momentum_flow;
  Part part = Part::full;
  std::size_t dim = 0;
  std::vector<std::vector<double>> comp;  // comp[a*dim+b][point]

  std::vector<double>& at(std::size_t a, std::size_t b) { return comp[a * dim + b]; }
  const std::vector<double>& at(std::size_t a, std::size_t b) const { return comp[a * dim + b]; }
  std::size_t points() const { return comp.empty() ? 0 : comp[0].size(); }
};

/** @brief d-vector per configuration point tied to particle (A,i). */
struct ConfigVectorField {
  Grid grid;
  ParticleRef particle;
  std::vector<std::vector<double>> comp;
  Mask defined;
};

// ---------------------------------------------------------------- helpers

inline double max_abs(const std::vector<double>& v, const Mask* m = nullptr) {
  double r = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i)
    if (!m || m->empty() || (*m)[i]) r = std::max(r, std::abs(v[i]));
  return r;
}

inline double max_abs(const std::vector<std::vector<double>>& v, const Mask* m = nullptr) {
  double r = 0.0;
  for (const auto& c : v) r = std::max(r, max_abs(c, m));
  return r;
}

inline double max_abs_diff(const std::vector<std::vector<double>>& a,
                           const std::vector<std::vector<double>>& b, const Mask* m = nullptr) {
  double r = 0.0;
  for (std::size_t c = 0; c < a.size(); ++c)
    for (std::size_t i = 0; i < a[c].size(); ++i)
      if (!m || m->empty() || (*m)[i]) r = std::max(r, std::abs(a[c][i] - b[c][i]));
  return r;
}

inline TensorField zero_tensor(const Mesh& mesh, std::size_t d) {
  TensorField t;
  t.mesh = mesh;
  t.dim = d;
  t.comp.assign(d * d, std::vector<double>(mesh.size(), 0.0));
  return t;
}

/// Nodes at least `band` layers away from every face of the mesh.
inline Mask interior_mask(const Mesh& mesh, std::size_t band) {
  Mask m(mesh.size(), 1);
  detail::for_each_index(mesh, [&](std::size_t lin, const std::vector<std::size_t>& idx) {
    for (std::size_t k = 0; k < idx.size(); ++k)
      if (idx[k] < band || idx[k] + band >= mesh.axes[k].n) m[lin] = 0;
  });
  return m;
}

/// Removes every node within `r` steps (along any single axis) of an excluded node.
inline Mask erode(const Mask& in, const Mesh& mesh, std::size_t r) {
  Mask out = in;
  const auto sh = mesh.shape();
  for (std::size_t k = 0; k < sh.rank(); ++k) {
    const std::size_t st = sh.stride(k);
    Mask cur = out;
    detail::for_each_index(mesh, [&](std::size_t lin, const std::vector<std::size_t>& idx) {
      if (!cur[lin]) return;
      for (std::size_t s = 1; s <= r; ++s) {
        if (idx[k] < s || !cur[lin - s * st] || idx[k] + s >= sh.n[k] || !cur[lin + s * st]) {
          out[lin] = 0;
          return;
        }
      }
    });
  }
  return out;
}

inline Mask mask_and(const Mask& a, const Mask& b) {
  Mask m(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) m[i] = a[i] && b[i];
  return m;
}

/// Relative-threshold mask f > eps * max f.
inline Mask threshold_mask(const std::vector<double>& f, double eps) {
  double mx = 0.0;
  for (double v : f) mx = std::max(mx, v);
  Mask m(f.size());
  for (std::size_t i = 0; i < f.size(); ++i) m[i] = f[i] > eps * mx ? 1 : 0;
  return m;
}

}  // namespace mpqhd
