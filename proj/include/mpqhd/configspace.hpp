#pragma once
// System description, configuration-space grids, wave fields, the Hamiltonian
// and the marginalization primitive shared by every one-particle field.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <numeric>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "stencil.hpp"

namespace mpqhd {

using cplx = std::complex<double>;

// ---------------------------------------------------------------- errors

/** @brief Invalid user input (bad spec, bad grid, malformed config). */
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/** @brief Grid point count above the configured cap; names the override flag. */
struct CapExceeded : std::runtime_error {
  std::string flag;
  CapExceeded(const std::string& what, std::string flag_name)
      : std::runtime_error(what), flag(std::move(flag_name)) {}
};

/** @brief Field defined on a grid/spec that does not match the request. */
struct SpecMismatch : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/** @brief Antisymmetrization (or a zero factor) produced a vanishing state. */
struct ZeroNorm : std::runtime_error {
  using std::runtime_error::runtime_error;
};

inline constexpr std::size_t default_point_cap = std::size_t{1} << 24;
inline constexpr std::size_t min_axis_points = 8;
inline const char* const cap_override_flag = "--cap-override";

// ---------------------------------------------------------------- system spec

enum class Statistics { boson, fermion, distinguishable };

inline std::string to_string(Statistics s) {
  switch (s) {
    case Statistics::boson: return "boson";
    case Statistics::fermion: return "fermion";
    default: return "distinguishable";
  }
}

inline Statistics parse_statistics(const std::string& s) {
  if (s == "boson") return Statistics::boson;
  if (s == "fermion") return Statistics::fermion;
  if (s == "distinguishable") return Statistics::distinguishable;
  throw ConfigError("unknown statistics '" + s + "'");
}

struct SortSpec {
  std::string label;
  double mass = 1.0;
  double charge = 0.0;  // kept for completeness; no external fields
  int count = 1;
  Statistics statistics = Statistics::distinguishable;
};

enum class PotentialKind { none, soft_coulomb, gaussian_well, harmonic_coupling };

inline std::string to_string(PotentialKind k) {
  switch (k) {
    case PotentialKind::soft_coulomb: return "soft_coulomb";
    case PotentialKind::gaussian_well: return "gaussian_well";
    case PotentialKind::harmonic_coupling: return "harmonic_coupling";
    default: return "none";
  }
}

inline PotentialKind parse_potential_kind(const std::string& s) {
  if (s == "none") return PotentialKind::none;
  if (s == "soft_coulomb") return PotentialKind::soft_coulomb;
  if (s == "gaussian_well") return PotentialKind::gaussian_well;
  if (s == "harmonic_coupling") return PotentialKind::harmonic_coupling;
  throw ConfigError("unknown potential kind '" + s + "'");
}

/**
 * @brief Pair potential V^{AB}(r) = coeff[A][B] * base(r).
 *
 * soft_coulomb: base = a / sqrt(r^2 + b^2)   (a = strength, b = softening)
 * gaussian_well: base = -a exp(-r^2 / (2 b^2)) (a = depth, b = width)
 * harmonic_coupling: base = a r^2 / 2         (a = spring constant)
 */
struct PairPotentialSpec {
  PotentialKind kind = PotentialKind::none;
  double a = 0.0;
  double b = 1.0;
  std::vector<std::vector<double>> coeff;  // empty => all ones

  double c(std::size_t A, std::size_t B) const {
    if (coeff.empty()) return 1.0;
    return coeff.at(A).at(B);
  }

  double value(std::size_t A, std::size_t B, double r2) const {
    switch (kind) {
      case PotentialKind::soft_coulomb: return c(A, B) * a / std::sqrt(r2 + b * b);
      case PotentialKind::gaussian_well: return -c(A, B) * a * std::exp(-r2 / (2.0 * b * b));
      case PotentialKind::harmonic_coupling: return c(A, B) * 0.5 * a * r2;
      default: return 0.0;
    }
  }

  /// g(r^2) with grad_q V(|q - q'|) = g * (q - q').
  double gradient_factor(std::size_t A, std::size_t B, double r2) const {
    switch (kind) {
      case PotentialKind::soft_coulomb: {
        const double s = r2 + b * b;
        return -c(A, B) * a / (s * std::sqrt(s));
      }
      case PotentialKind::gaussian_well:
        return c(A, B) * a / (b * b) * std::exp(-r2 / (2.0 * b * b));
      case PotentialKind::harmonic_coupling: return c(A, B) * a;
      default: return 0.0;
    }
  }
};

struct SystemSpec {
  std::vector<SortSpec> sorts;
  int spatial_dim = 1;
  PairPotentialSpec potential;
  double hbar = 1.0;

  std::size_t total_particles() const {
    std::size_t n = 0;
    for (const auto& s : sorts) n += static_cast<std::size_t>(s.count);
    return n;
  }
  std::size_t config_dim() const { return total_particles() * static_cast<std::size_t>(spatial_dim); }

  std::size_t sort_index(const std::string& label) const {
    for (std::size_t k = 0; k < sorts.size(); ++k)
      if (sorts[k].label == label) return k;
    throw ConfigError("unknown sort '" + label + "'");
  }

  /// First particle slot of each sort (slots are ordered sort by sort).
  std::size_t slot_offset(std::size_t sort) const {
    std::size_t off = 0;
    for (std::size_t k = 0; k < sort; ++k) off += static_cast<std::size_t>(sorts[k].count);
    return off;
  }

  std::size_t sort_of_slot(std::size_t slot) const {
    for (std::size_t k = 0; k < sorts.size(); ++k) {
      if (slot < static_cast<std::size_t>(sorts[k].count)) return k;
      slot -= static_cast<std::size_t>(sorts[k].count);
    }
    throw std::out_of_range("particle slot out of range");
  }

  void validate() const {
    if (sorts.empty()) throw ConfigError("system needs at least one sort");
    if (spatial_dim < 1 || spatial_dim > 3) throw ConfigError("spatial_dim must be 1, 2 or 3");
    if (!(hbar > 0.0)) throw ConfigError("hbar must be positive");
    for (std::size_t k = 0; k < sorts.size(); ++k) {
      const auto& s = sorts[k];
      if (s.label.empty()) throw ConfigError("sort label must be non-empty");
      if (!(s.mass > 0.0)) throw ConfigError("sort '" + s.label + "': mass must be positive");
      if (s.count < 1) throw ConfigError("sort '" + s.label + "': count must be >= 1");
      for (std::size_t j = 0; j < k; ++j)
        if (sorts[j].label == s.label) throw ConfigError("duplicate sort label '" + s.label + "'");
    }
    if (config_dim() > 4) throw ConfigError("configuration dimension d*sum N(A) exceeds 4");
    const auto& c = potential.coeff;
    if (!c.empty()) {
      if (c.size() != sorts.size()) throw ConfigError("potential coefficient matrix has wrong size");
      for (std::size_t A = 0; A < c.size(); ++A) {
        if (c[A].size() != sorts.size()) throw ConfigError("potential coefficient matrix has wrong size");
        for (std::size_t B = 0; B < c.size(); ++B)
          if (c[A][B] != c[B][A]) throw ConfigError("potential coefficient matrix must be symmetric");
      }
    }
    if (potential.kind == PotentialKind::soft_coulomb && !(potential.b > 0.0))
      throw ConfigError("soft_coulomb needs a positive softening");
    if (potential.kind == PotentialKind::gaussian_well && !(potential.b > 0.0))
      throw ConfigError("gaussian_well needs a positive width");
  }

  std::string canonical() const {
    std::ostringstream os;
    os.precision(17);
    os << "d=" << spatial_dim << ";hbar=" << hbar << ";V=" << to_string(potential.kind) << ","
       << potential.a << "," << potential.b;
    for (const auto& row : potential.coeff)
      for (double v : row) os << "," << v;
    for (const auto& s : sorts)
      os << ";" << s.label << ":" << s.mass << ":" << s.charge << ":" << s.count << ":"
         << to_string(s.statistics);
    return os.str();
  }

  /// FNV-1a over the canonical text; ties persisted fields to their spec.
  std::uint64_t hash() const {
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char ch : canonical()) {
      h ^= ch;
      h *= 1099511628211ull;
    }
    return h;
  }
};

// ---------------------------------------------------------------- grids

struct Axis {
  double min = 0.0;
  double max = 0.0;
  std::size_t n = 0;

  double h() const { return (max - min) / static_cast<double>(n - 1); }
  double x(std::size_t i) const { return min + static_cast<double>(i) * h(); }
  /// Composite trapezoid weight of node i.
  double weight(std::size_t i) const { return (i == 0 || i + 1 == n) ? 0.5 * h() : h(); }
  bool operator==(const Axis& o) const { return min == o.min && max == o.max && n == o.n; }
};

/** @brief Tensor-product mesh; used both for configuration and physical space. */
struct Mesh {
  std::vector<Axis> axes;

  std::size_t rank() const { return axes.size(); }
  Shape shape() const {
    Shape s;
    for (const auto& a : axes) s.n.push_back(a.n);
    return s;
  }
  std::size_t size() const { return shape().size(); }
  double cell_volume() const {
    double v = 1.0;
    for (const auto& a : axes) v *= a.h();
    return v;
  }
  bool operator==(const Mesh& o) const { return axes == o.axes; }

  /// Multi-index of a linear index (row-major).
  std::vector<std::size_t> unravel(std::size_t lin) const {
    std::vector<std::size_t> idx(axes.size());
    for (std::size_t k = axes.size(); k-- > 0;) {
      idx[k] = lin % axes[k].n;
      lin /= axes[k].n;
    }
    return idx;
  }

  /// Trapezoid integral of a nodal field.
  double integrate(const std::vector<double>& f) const {
    const auto s = shape();
    std::vector<std::size_t> idx(axes.size(), 0);
    double acc = 0.0;
    for (std::size_t lin = 0; lin < f.size(); ++lin) {
      double w = 1.0;
      for (std::size_t k = 0; k < axes.size(); ++k) w *= axes[k].weight(idx[k]);
      acc += w * f[lin];
      for (std::size_t k = axes.size(); k-- > 0;) {
        if (++idx[k] < s.n[k]) break;
        idx[k] = 0;
      }
    }
    return acc;
  }
};

/** @brief Identifies particle (A, i); i is 0-based (particle 1 of a sort is index 0). */
struct ParticleRef {
  std::size_t sort = 0;
  std::size_t index = 0;
};

/**
 * @brief Configuration-space grid with the axis ownership map.
 *
 * Axis of component c of particle slot s is s*d + c. All particles share the
 * physical axes, so the physical grid is identical for every (A, i).
 */
struct Grid {
  Mesh mesh;
  int spatial_dim = 1;
  std::vector<std::size_t> slot_offset;  // per sort
  std::vector<std::size_t> sort_counts;

  std::size_t size() const { return mesh.size(); }
  Shape shape() const { return mesh.shape(); }

  std::size_t slot(ParticleRef p) const {
    if (p.sort >= slot_offset.size()) throw ConfigError("invalid sort index");
    if (p.index >= sort_counts[p.sort]) throw ConfigError("invalid particle index");
    return slot_offset[p.sort] + p.index;
  }

  std::size_t axis(ParticleRef p, std::size_t component) const {
    return slot(p) * static_cast<std::size_t>(spatial_dim) + component;
  }

  std::vector<std::size_t> particle_axes(ParticleRef p) const {
    std::vector<std::size_t> out;
    for (int c = 0; c < spatial_dim; ++c) out.push_back(axis(p, static_cast<std::size_t>(c)));
    return out;
  }

  /// The d-dimensional physical mesh (shared by all particles).
  Mesh physical() const {
    Mesh m;
    for (int c = 0; c < spatial_dim; ++c) m.axes.push_back(mesh.axes[static_cast<std::size_t>(c)]);
    return m;
  }

  bool operator==(const Grid& o) const {
    return mesh == o.mesh && spatial_dim == o.spatial_dim && slot_offset == o.slot_offset &&
           sort_counts == o.sort_counts;
  }
};

/**
 * @brief Builds a configuration grid.
 *
 * `axis_specs` holds one entry per configuration axis (d * sum N(A)), or just d
 * entries, which are then replicated for every particle.
 */
inline Grid build_grid(const SystemSpec& spec, std::vector<Axis> axis_specs,
                       std::size_t cap = default_point_cap) {
  spec.validate();
  const std::size_t d = static_cast<std::size_t>(spec.spatial_dim);
  const std::size_t K = spec.config_dim();
  if (axis_specs.size() == d && K != d) {
    std::vector<Axis> full;
    for (std::size_t s = 0; s < spec.total_particles(); ++s)
      full.insert(full.end(), axis_specs.begin(), axis_specs.end());
    axis_specs = std::move(full);
  }
  if (axis_specs.size() != K)
    throw ConfigError("grid needs " + std::to_string(K) + " axes, got " +
                      std::to_string(axis_specs.size()));
  long double total = 1.0L;
  for (std::size_t k = 0; k < K; ++k) {
    const auto& a = axis_specs[k];
    if (!(a.max > a.min) || !std::isfinite(a.min) || !std::isfinite(a.max))
      throw ConfigError("axis " + std::to_string(k) + " has non-positive extent");
    if (a.n < min_axis_points)
      throw ConfigError("axis " + std::to_string(k) + " needs at least " +
                        std::to_string(min_axis_points) + " points");
    total *= static_cast<long double>(a.n);
  }
  if (total > static_cast<long double>(cap))
    throw CapExceeded("grid has " + std::to_string(static_cast<double>(total)) +
                          " points, above the cap of " + std::to_string(cap) + "; rerun with " +
                          cap_override_flag,
                      cap_override_flag);
  for (std::size_t k = d; k < K; ++k)
    if (!(axis_specs[k] == axis_specs[k % d]))
      throw ConfigError("all particles must share the physical axes (axis " + std::to_string(k) +
                        " differs from axis " + std::to_string(k % d) + ")");
  Grid g;
  g.mesh.axes = std::move(axis_specs);
  g.spatial_dim = spec.spatial_dim;
  for (std::size_t A = 0; A < spec.sorts.size(); ++A) {
    g.slot_offset.push_back(spec.slot_offset(A));
    g.sort_counts.push_back(static_cast<std::size_t>(spec.sorts[A].count));
  }
  return g;
}

// ---------------------------------------------------------------- wave fields

/** @brief Complex wave function on a configuration grid. */
struct WaveField {
  Grid grid;
  SystemSpec spec;
  std::vector<cplx> values;
  double time_tag = 0.0;

  WaveField() = default;
  WaveField(Grid g, SystemSpec s, std::vector<cplx> v, double t = 0.0)
      : grid(std::move(g)), spec(std::move(s)), values(std::move(v)), time_tag(t) {
    if (values.size() != grid.size()) throw SpecMismatch("wave field size does not match grid");
    for (const auto& z : values)
      if (!std::isfinite(z.real()) || !std::isfinite(z.imag()))
        throw ConfigError("wave field contains non-finite values");
  }

  /// Trapezoid norm  sum |Psi|^2 dQ.
  double norm2() const {
    std::vector<double> D(values.size());
    for (std::size_t k = 0; k < values.size(); ++k) D[k] = std::norm(values[k]);
    return grid.mesh.integrate(D);
  }

  WaveField& normalize() {
    const double n = norm2();
    if (!(n > 0.0)) throw ZeroNorm("cannot normalize a zero wave field");
    const double s = 1.0 / std::sqrt(n);
    for (auto& z : values) z *= s;
    return *this;
  }

  /// max |Psi| on the outermost layer divided by the global max.
  double boundary_ratio() const {
    const auto sh = grid.shape();
    double gmax = 0.0, bmax = 0.0;
    std::vector<std::size_t> idx(sh.rank(), 0);
    for (std::size_t lin = 0; lin < values.size(); ++lin) {
      const double a = std::abs(values[lin]);
      gmax = std::max(gmax, a);
      bool edge = false;
      for (std::size_t k = 0; k < sh.rank(); ++k)
        if (idx[k] == 0 || idx[k] + 1 == sh.n[k]) edge = true;
      if (edge) bmax = std::max(bmax, a);
      for (std::size_t k = sh.rank(); k-- > 0;) {
        if (++idx[k] < sh.n[k]) break;
        idx[k] = 0;
      }
    }
    return gmax > 0.0 ? bmax / gmax : 0.0;
  }
};

inline constexpr double boundary_tolerance = 1e-8;

inline void require_boundary_negligible(const WaveField& psi) {
  const double r = psi.boundary_ratio();
  if (r > boundary_tolerance)
    throw ConfigError("wave field is not negligible on the boundary (ratio " + std::to_string(r) +
                      "); enlarge the box");
}

/** @brief Density, amplitude and (when known in closed form) phase. */
struct MadelungView {
  std::vector<double> density;
  std::vector<double> amplitude;
  std::optional<std::vector<double>> phase;
};

inline MadelungView madelung(const WaveField& psi,
                             std::optional<std::vector<double>> phase = std::nullopt) {
  MadelungView m;
  m.density.resize(psi.values.size());
  m.amplitude.resize(psi.values.size());
  for (std::size_t k = 0; k < psi.values.size(); ++k) {
    m.amplitude[k] = std::abs(psi.values[k]);
    m.density[k] = m.amplitude[k] * m.amplitude[k];
  }
  m.phase = std::move(phase);
  return m;
}

// ---------------------------------------------------------------- sweeps

/**
 * @brief Visits every configuration point as f(lin, phys, weight).
 *
 * phys is the linear index of the particle's coordinates on the physical mesh,
 * weight the trapezoid weight of all other axes.
 */
template <class F>
void sweep(const Grid& g, ParticleRef p, F&& f) {
  const auto& ax = g.mesh.axes;
  const std::size_t K = ax.size();
  const auto own = g.particle_axes(p);
  std::vector<std::size_t> phys_stride(K, 0);
  std::vector<char> is_own(K, 0);
  {
    std::size_t s = 1;
    for (std::size_t c = own.size(); c-- > 0;) {
      phys_stride[own[c]] = s;
      is_own[own[c]] = 1;
      s *= ax[own[c]].n;
    }
  }
  std::vector<std::vector<double>> w(K);
  for (std::size_t k = 0; k < K; ++k) {
    w[k].resize(ax[k].n, 1.0);
    if (!is_own[k])
      for (std::size_t i = 0; i < ax[k].n; ++i) w[k][i] = ax[k].weight(i);
  }
  std::vector<std::size_t> idx(K, 0);
  const std::size_t total = g.size();
  const std::size_t last = K - 1;
  const std::size_t nl = ax[last].n;
  const double* wl = w[last].data();
  const std::size_t sl = phys_stride[last];
  for (std::size_t lin = 0; lin < total; lin += nl) {
    std::size_t phys0 = 0;
    double w0 = 1.0;
    for (std::size_t k = 0; k < last; ++k) {
      phys0 += idx[k] * phys_stride[k];
      w0 *= w[k][idx[k]];
    }
    for (std::size_t i = 0; i < nl; ++i) f(lin + i, phys0 + i * sl, w0 * wl[i]);
    for (std::size_t k = last; k-- > 0;) {
      if (++idx[k] < ax[k].n) break;
      idx[k] = 0;
    }
  }
}

/// Sum over points of integrand(lin) placed at the particle's physical node.
template <class F>
std::vector<double> marginalize_with(const Grid& g, ParticleRef p, F&& integrand) {
  std::vector<double> out(g.physical().size(), 0.0);
  sweep(g, p, [&](std::size_t lin, std::size_t phys, double w) { out[phys] += w * integrand(lin); });
  return out;
}

/**
 * @brief Fixes particle (A,i) at each physical node and integrates all other
 * axes with the composite trapezoid rule.
 */
inline std::vector<double> marginalize(const Grid& g, const std::vector<double>& field, ParticleRef p) {
  if (field.size() != g.size()) throw SpecMismatch("marginalize: field size does not match grid");
  return marginalize_with(g, p, [&](std::size_t k) { return field[k]; });
}

// ---------------------------------------------------------------- Hamiltonian

namespace detail {

inline void check_compatible(const WaveField& psi, const SystemSpec& spec) {
  if (psi.spec.canonical() != spec.canonical()) throw SpecMismatch("wave field belongs to another system");
  if (psi.grid.spatial_dim != spec.spatial_dim || psi.grid.mesh.rank() != spec.config_dim())
    throw SpecMismatch("grid does not match the system");
}

/// Coordinates of every axis, per axis.
inline std::vector<std::vector<double>> axis_coords(const Mesh& m) {
  std::vector<std::vector<double>> x(m.rank());
  for (std::size_t k = 0; k < m.rank(); ++k) {
    x[k].resize(m.axes[k].n);
    for (std::size_t i = 0; i < m.axes[k].n; ++i) x[k][i] = m.axes[k].x(i);
  }
  return x;
}

/// Calls f(lin, idx) for every point with its multi-index.
template <class F>
void for_each_index(const Mesh& m, F&& f) {
  const auto sh = m.shape();
  std::vector<std::size_t> idx(sh.rank(), 0);
  const std::size_t total = sh.size();
  for (std::size_t lin = 0; lin < total; ++lin) {
    f(lin, idx);
    for (std::size_t k = sh.rank(); k-- > 0;) {
      if (++idx[k] < sh.n[k]) break;
      idx[k] = 0;
    }
  }
}

}  // namespace detail

/// Sum of pair potentials over unordered particle pairs, per configuration point.
inline std::vector<double> potential_energy(const Grid& g, const SystemSpec& spec) {
  std::vector<double> V(g.size(), 0.0);
  if (spec.potential.kind == PotentialKind::none) return V;
  const std::size_t d = static_cast<std::size_t>(spec.spatial_dim);
  const std::size_t P = spec.total_particles();
  const auto x = detail::axis_coords(g.mesh);
  std::vector<std::size_t> sort_of(P);
  for (std::size_t s = 0; s < P; ++s) sort_of[s] = spec.sort_of_slot(s);
  detail::for_each_index(g.mesh, [&](std::size_t lin, const std::vector<std::size_t>& idx) {
    double acc = 0.0;
    for (std::size_t a = 0; a < P; ++a)
      for (std::size_t b = a + 1; b < P; ++b) {
        double r2 = 0.0;
        for (std::size_t c = 0; c < d; ++c) {
          const double dx = x[a * d + c][idx[a * d + c]] - x[b * d + c][idx[b * d + c]];
          r2 += dx * dx;
        }
        acc += spec.potential.value(sort_of[a], sort_of[b], r2);
      }
    V[lin] = acc;
  });
  return V;
}

/**
 * @brief H Psi with the grid Laplacian per particle coordinate (zero extension
 * outside the box) and each unordered pair counted once.
 */
inline WaveField apply_hamiltonian(const WaveField& psi, const SystemSpec& spec) {
  detail::check_compatible(psi, spec);
  const auto sh = psi.grid.shape();
  std::vector<cplx> out(psi.values.size(), cplx{});
  const std::size_t d = static_cast<std::size_t>(spec.spatial_dim);
  for (std::size_t slot = 0; slot < spec.total_particles(); ++slot) {
    const double m = spec.sorts[spec.sort_of_slot(slot)].mass;
    const double pref = -spec.hbar * spec.hbar / (2.0 * m);
    for (std::size_t c = 0; c < d; ++c) {
      const std::size_t k = slot * d + c;
      const auto lap = stencil::d2_zero_extended(psi.values, sh, k, psi.grid.mesh.axes[k].h());
      for (std::size_t i = 0; i < out.size(); ++i) out[i] += pref * lap[i];
    }
  }
  if (spec.potential.kind != PotentialKind::none) {
    const auto V = potential_energy(psi.grid, spec);
    for (std::size_t i = 0; i < out.size(); ++i) out[i] += V[i] * psi.values[i];
  }
  WaveField r;
  r.grid = psi.grid;
  r.spec = psi.spec;
  r.values = std::move(out);
  r.time_tag = psi.time_tag;
  return r;
}

/// dPsi/dt = H Psi / (i hbar), evaluated at fixed time.
inline WaveField time_derivative(const WaveField& psi, const SystemSpec& spec) {
  WaveField r = apply_hamiltonian(psi, spec);
  const cplx f = 1.0 / (cplx(0.0, 1.0) * spec.hbar);
  for (auto& z : r.values) z *= f;
  return r;
}

/// Grid inner product <a, b> with trapezoid weights.
inline cplx inner_product(const WaveField& a, const WaveField& b) {
  if (!(a.grid == b.grid)) throw SpecMismatch("inner product of fields on different grids");
  cplx acc{};
  detail::for_each_index(a.grid.mesh, [&](std::size_t lin, const std::vector<std::size_t>& idx) {
    double w = 1.0;
    for (std::size_t k = 0; k < idx.size(); ++k) w *= a.grid.mesh.axes[k].weight(idx[k]);
    acc += w * std::conj(a.values[lin]) * b.values[lin];
  });
  return acc;
}

// ---------------------------------------------------------------- symmetrization

namespace detail {

inline int permutation_sign(const std::vector<std::size_t>& p) {
  int sign = 1;
  std::vector<char> seen(p.size(), 0);
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (seen[i]) continue;
    std::size_t len = 0;
    for (std::size_t j = i; !seen[j]; j = p[j]) {
      seen[j] = 1;
      ++len;
    }
    if (len % 2 == 0) sign = -sign;
  }
  return sign;
}

}  // namespace detail

/**
 * @brief Builds the normalized (anti)symmetrized product state.
 *
 * factors[A][k] is the k-th single-particle function of sort A sampled on the
 * physical mesh. Distinguishable sorts use the plain product.
 */
inline WaveField symmetrize(const std::vector<std::vector<std::vector<cplx>>>& factors,
                            const SystemSpec& spec, const Grid& grid) {
  spec.validate();
  if (factors.size() != spec.sorts.size()) throw ConfigError("symmetrize: one factor list per sort");
  const std::size_t nphys = grid.physical().size();
  for (std::size_t A = 0; A < factors.size(); ++A) {
    if (factors[A].size() != static_cast<std::size_t>(spec.sorts[A].count))
      throw ConfigError("symmetrize: sort '" + spec.sorts[A].label + "' needs " +
                        std::to_string(spec.sorts[A].count) + " factors");
    for (const auto& f : factors[A])
      if (f.size() != nphys) throw SpecMismatch("symmetrize: factor not on the physical mesh");
  }
  const std::size_t d = static_cast<std::size_t>(spec.spatial_dim);
  const auto phys = grid.physical();
  const auto psh = phys.shape();
  // per sort: list of (permutation, sign)
  std::vector<std::vector<std::pair<std::vector<std::size_t>, double>>> perms(spec.sorts.size());
  for (std::size_t A = 0; A < spec.sorts.size(); ++A) {
    std::vector<std::size_t> p(static_cast<std::size_t>(spec.sorts[A].count));
    std::iota(p.begin(), p.end(), 0);
    const auto st = spec.sorts[A].statistics;
    if (st == Statistics::distinguishable) {
      perms[A].push_back({p, 1.0});
      continue;
    }
    do {
      const double s = st == Statistics::fermion ? detail::permutation_sign(p) : 1.0;
      perms[A].push_back({p, s});
    } while (std::next_permutation(p.begin(), p.end()));
  }
  std::vector<cplx> values(grid.size());
  std::vector<std::size_t> pidx(spec.total_particles());
  detail::for_each_index(grid.mesh, [&](std::size_t lin, const std::vector<std::size_t>& idx) {
    for (std::size_t s = 0; s < pidx.size(); ++s) {
      std::size_t q = 0;
      for (std::size_t c = 0; c < d; ++c) q = q * psh.n[c] + idx[s * d + c];
      pidx[s] = q;
    }
    cplx total = 1.0;
    for (std::size_t A = 0; A < spec.sorts.size(); ++A) {
      const std::size_t off = spec.slot_offset(A);
      cplx acc{};
      for (const auto& [p, sign] : perms[A]) {
        cplx prod = sign;
        for (std::size_t k = 0; k < p.size(); ++k) prod *= factors[A][p[k]][pidx[off + k]];
        acc += prod;
      }
      total *= acc;
    }
    values[lin] = total;
  });
  WaveField psi(grid, spec, std::move(values));
  double peak = 0.0;
  for (const auto& z : psi.values) peak = std::max(peak, std::abs(z));
  double fscale = 1.0;
  for (const auto& fa : factors)
    for (const auto& f : fa) {
      double m = 0.0;
      for (const auto& z : f) m = std::max(m, std::abs(z));
      fscale *= m;
    }
  if (!(peak > 1e-12 * fscale) || !(psi.norm2() > 0.0))
    throw ZeroNorm("symmetrized state vanishes (identical fermion factors?)");
  psi.normalize();
  return psi;
}

}  // namespace mpqhd
