#pragma once
// Cylindrical coordinates: rotation matrix, transform laws, differential operators
// on (rho, phi, z) product grids, and the azimuthal-symmetry fast path for the
// pressure-tensor elements and their divergences.

#include <array>
#include <cmath>
#include <cstdio>
#include <map>
#include <numbers>
#include <string>
#include <tuple>
#include <vector>

#include "balance.hpp"
#include "tensors.hpp"

namespace mpqhd {

using Vec3 = std::array<double, 3>;
using Mat3 = std::array<std::array<double, 3>, 3>;

/** @brief Rows are e_rho, e_phi, e_z in the Cartesian basis. */
inline Mat3 rotation_matrix(double phi) {
  const double c = std::cos(phi), s = std::sin(phi);
  return Mat3{{{c, s, 0.0}, {-s, c, 0.0}, {0.0, 0.0, 1.0}}};
}

inline Mat3 transpose(const Mat3& m) {
  Mat3 t{};
  for (int a = 0; a < 3; ++a)
    for (int b = 0; b < 3; ++b) t[a][b] = m[b][a];
  return t;
}

inline Mat3 matmul(const Mat3& x, const Mat3& y) {
  Mat3 r{};
  for (int a = 0; a < 3; ++a)
    for (int b = 0; b < 3; ++b)
      for (int k = 0; k < 3; ++k) r[a][b] += x[a][k] * y[k][b];
  return r;
}

inline Vec3 mat_vec(const Mat3& m, const Vec3& v) {
  Vec3 r{};
  for (int a = 0; a < 3; ++a)
    for (int k = 0; k < 3; ++k) r[a] += m[a][k] * v[k];
  return r;
}

/// b' = Lambda b
inline Vec3 to_cylindrical(const Vec3& b, double phi) { return mat_vec(rotation_matrix(phi), b); }
/// b = Lambda^T b'
inline Vec3 to_cartesian(const Vec3& b, double phi) { return mat_vec(transpose(rotation_matrix(phi)), b); }
/// T' = Lambda T Lambda^T
inline Mat3 to_cylindrical(const Mat3& T, double phi) {
  const auto L = rotation_matrix(phi);
  return matmul(matmul(L, T), transpose(L));
}

/** @brief Components in (rho, phi, z) order at every point; `on_axis` marks rho = 0. */
struct CylVectorField {
  Mesh mesh;
  std::vector<std::vector<double>> comp;
  Mask on_axis;
};

/** @brief (rho, phi, z) x (rho, phi, z) elements per point, stored with each point's own phi. */
struct CylTensorField {
  Mesh mesh;
  std::size_t dim = 3;
  std::vector<std::vector<double>> comp;  // comp[a*dim+b]
  Mask on_axis;
  bool symmetric = false;

  const std::vector<double>& at(std::size_t a, std::size_t b) const { return comp[a * dim + b]; }
};

namespace detail {

inline void point_xy(const Mesh& m, std::size_t lin, double& x, double& y) {
  const auto idx = m.unravel(lin);
  x = m.axes[0].x(idx[0]);
  y = m.axes[1].x(idx[1]);
}

inline double axis_tolerance(const Mesh& m) { return 1e-9 * std::min(m.axes[0].h(), m.axes[1].h()); }

}  // namespace detail

/**
 * @brief Cartesian vector field to cylindrical components (d = 2: z absent).
 * Points on the z-axis get phi = 0 and are flagged.
 */
inline CylVectorField to_cylindrical(const VectorField& v) {
  const std::size_t d = v.comp.size();
  if (d != 2 && d != 3) throw ConfigError("to_cylindrical needs d = 2 or 3");
  CylVectorField out;
  out.mesh = v.mesh;
  out.comp = v.comp;
  out.on_axis.assign(v.mesh.size(), 0);
  const double tol = detail::axis_tolerance(v.mesh);
  for (std::size_t i = 0; i < v.mesh.size(); ++i) {
    double x, y;
    detail::point_xy(v.mesh, i, x, y);
    if (std::hypot(x, y) < tol) out.on_axis[i] = 1;
    const double phi = out.on_axis[i] ? 0.0 : std::atan2(y, x);
    const double c = std::cos(phi), s = std::sin(phi);
    out.comp[0][i] = c * v.comp[0][i] + s * v.comp[1][i];
    out.comp[1][i] = -s * v.comp[0][i] + c * v.comp[1][i];
  }
  return out;
}

inline CylTensorField to_cylindrical(const TensorField& T) {
  const std::size_t d = T.dim;
  if (d != 2 && d != 3) throw ConfigError("to_cylindrical needs d = 2 or 3");
  CylTensorField out;
  out.mesh = T.mesh;
  out.dim = d;
  out.comp = T.comp;
  out.on_axis.assign(T.mesh.size(), 0);
  double asym = 0.0, mx = 0.0;
  const double tol = detail::axis_tolerance(T.mesh);
  for (std::size_t i = 0; i < T.points(); ++i) {
    double x, y;
    detail::point_xy(T.mesh, i, x, y);
    if (std::hypot(x, y) < tol) out.on_axis[i] = 1;
    const double phi = out.on_axis[i] ? 0.0 : std::atan2(y, x);
    Mat3 M{};
    for (std::size_t a = 0; a < d; ++a)
      for (std::size_t b = 0; b < d; ++b) {
        M[a][b] = T.at(a, b)[i];
        mx = std::max(mx, std::abs(M[a][b]));
        asym = std::max(asym, std::abs(T.at(a, b)[i] - T.at(b, a)[i]));
      }
    const auto R = to_cylindrical(M, phi);
    for (std::size_t a = 0; a < d; ++a)
      for (std::size_t b = 0; b < d; ++b) out.comp[a * d + b][i] = R[a][b];
  }
  out.symmetric = asym <= 1e-12 * mx;
  return out;
}

// ---------------------------------------------------------------- (rho, phi, z) product grids

/**
 * @brief Product grid in (rho, phi, z), row-major in that order.
 *
 * A periodic phi axis has n points phi_j = 2 pi j / n (the Axis bounds are
 * ignored); a non-periodic one is an ordinary sector [min, max].
 */
struct CylGrid {
  Axis rho;
  Axis phi;
  Axis z;
  bool periodic_phi = true;

  Mesh mesh() const { return Mesh{{rho, phi, z}}; }
  std::size_t size() const { return rho.n * phi.n * z.n; }
  double dphi() const { return periodic_phi ? 2.0 * std::numbers::pi / static_cast<double>(phi.n) : phi.h(); }
  double phi_at(std::size_t j) const {
    return periodic_phi ? static_cast<double>(j) * dphi() : phi.x(j);
  }
  std::size_t index(std::size_t i, std::size_t j, std::size_t l) const { return (i * phi.n + j) * z.n + l; }

  /// Samples f(rho, phi, z).
  template <class F>
  std::vector<double> sample(F&& f) const {
    std::vector<double> out(size());
    for (std::size_t i = 0; i < rho.n; ++i)
      for (std::size_t j = 0; j < phi.n; ++j)
        for (std::size_t l = 0; l < z.n; ++l) out[index(i, j, l)] = f(rho.x(i), phi_at(j), z.x(l));
    return out;
  }

  /// rho >= 2 h_rho (keeps the 1/rho terms away from the axis).
  Mask rho_mask() const {
    Mask m(size(), 0);
    const double lim = 2.0 * rho.h() * (1.0 - 1e-12);
    for (std::size_t i = 0; i < rho.n; ++i)
      for (std::size_t j = 0; j < phi.n; ++j)
        for (std::size_t l = 0; l < z.n; ++l) m[index(i, j, l)] = rho.x(i) >= lim ? 1 : 0;
    return m;
  }
};

namespace detail {

inline std::vector<double> cyl_d_rho(const CylGrid& g, const std::vector<double>& f, int order = 1) {
  const Shape sh{{g.rho.n, g.phi.n, g.z.n}};
  return order == 1 ? stencil::d1(f, sh, 0, g.rho.h()) : stencil::d2(f, sh, 0, g.rho.h());
}

inline std::vector<double> cyl_d_z(const CylGrid& g, const std::vector<double>& f, int order = 1) {
  const Shape sh{{g.rho.n, g.phi.n, g.z.n}};
  return order == 1 ? stencil::d1(f, sh, 2, g.z.h()) : stencil::d2(f, sh, 2, g.z.h());
}

// Periodic phi uses wrapped central stencils.
inline std::vector<double> cyl_d_phi(const CylGrid& g, const std::vector<double>& f, int order = 1) {
  if (!g.periodic_phi) {
    const Shape sh{{g.rho.n, g.phi.n, g.z.n}};
    return order == 1 ? stencil::d1(f, sh, 1, g.phi.h()) : stencil::d2(f, sh, 1, g.phi.h());
  }
  const std::size_t n = g.phi.n;
  if (n < 5) throw ConfigError("periodic phi axis needs at least 5 points");
  const double h = g.dphi();
  const auto& w = order == 1 ? stencil::d1_central : stencil::d2_central;
  const double den = order == 1 ? 12.0 * h : 12.0 * h * h;
  std::vector<double> out(f.size());
  for (std::size_t i = 0; i < g.rho.n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      for (std::size_t l = 0; l < g.z.n; ++l) {
        double acc = 0.0;
        for (int k = -2; k <= 2; ++k) {
          const std::size_t jj = (j + n + static_cast<std::size_t>(k + 2) - 2) % n;
          acc += w[static_cast<std::size_t>(k + 2)] * f[g.index(i, jj, l)];
        }
        out[g.index(i, j, l)] = acc / den;
      }
  return out;
}

inline std::vector<double> rho_values(const CylGrid& g) {
  return g.sample([](double r, double, double) { return r; });
}

}  // namespace detail

/** @brief (dF/drho, (1/rho) dF/dphi, dF/dz); values with rho < 2h are zeroed. */
inline CylVectorField cyl_gradient(const CylGrid& g, const std::vector<double>& F) {
  CylVectorField out;
  out.mesh = g.mesh();
  const auto r = detail::rho_values(g);
  const Mask m = g.rho_mask();
  out.comp = {detail::cyl_d_rho(g, F), detail::cyl_d_phi(g, F), detail::cyl_d_z(g, F)};
  out.on_axis.assign(g.size(), 0);
  for (std::size_t i = 0; i < g.size(); ++i) {
    out.on_axis[i] = m[i] ? 0 : 1;
    if (!m[i]) {
      for (auto& c : out.comp) c[i] = 0.0;
      continue;
    }
    out.comp[1][i] /= r[i];
  }
  return out;
}

/** @brief d2F/drho2 + (1/rho) dF/drho + (1/rho^2) d2F/dphi2 + d2F/dz2 on the rho-mask. */
inline std::vector<double> cyl_laplacian(const CylGrid& g, const std::vector<double>& F) {
  const auto r = detail::rho_values(g);
  const Mask m = g.rho_mask();
  const auto frr = detail::cyl_d_rho(g, F, 2), fr = detail::cyl_d_rho(g, F);
  const auto fpp = detail::cyl_d_phi(g, F, 2), fzz = detail::cyl_d_z(g, F, 2);
  std::vector<double> out(g.size(), 0.0);
  for (std::size_t i = 0; i < g.size(); ++i)
    if (m[i]) out[i] = frr[i] + fr[i] / r[i] + fpp[i] / (r[i] * r[i]) + fzz[i];
  return out;
}

/**
 * @brief Divergence of a cylindrical tensor field, full three-line formula
 * (including the (T_rr - T_pp)/rho and (T_rp + T_pr)/rho terms).
 * T holds 9 element fields indexed a*3+b with a, b in (rho, phi, z).
 */
inline CylVectorField cyl_tensor_divergence(const CylGrid& g, const std::array<std::vector<double>, 9>& T) {
  const auto r = detail::rho_values(g);
  const Mask m = g.rho_mask();
  auto e = [&](int a, int b) -> const std::vector<double>& { return T[static_cast<std::size_t>(a * 3 + b)]; };
  enum { R = 0, P = 1, Z = 2 };
  const auto drr = detail::cyl_d_rho(g, e(R, R)), dpr = detail::cyl_d_phi(g, e(P, R)),
             dzr = detail::cyl_d_z(g, e(Z, R));
  const auto drp = detail::cyl_d_rho(g, e(R, P)), dpp = detail::cyl_d_phi(g, e(P, P)),
             dzp = detail::cyl_d_z(g, e(Z, P));
  const auto drz = detail::cyl_d_rho(g, e(R, Z)), dpz = detail::cyl_d_phi(g, e(P, Z)),
             dzz = detail::cyl_d_z(g, e(Z, Z));
  CylVectorField out;
  out.mesh = g.mesh();
  out.comp.assign(3, std::vector<double>(g.size(), 0.0));
  out.on_axis.assign(g.size(), 0);
  for (std::size_t i = 0; i < g.size(); ++i) {
    if (!m[i]) {
      out.on_axis[i] = 1;
      continue;
    }
    const double ir = 1.0 / r[i];
    out.comp[0][i] = drr[i] + ir * (dpr[i] + e(R, R)[i] - e(P, P)[i]) + dzr[i];
    out.comp[1][i] = drp[i] + ir * (dpp[i] + e(R, P)[i] + e(P, R)[i]) + dzp[i];
    out.comp[2][i] = drz[i] + ir * (dpz[i] + e(R, Z)[i]) + dzz[i];
  }
  return out;
}

// ---------------------------------------------------------------- azimuthal symmetry

/** @brief Rotation variation of D and of the current about the z-axis. */
struct SymmetryReport {
  double density_variation = 0.0;
  double density_scale = 0.0;
  double current_variation = 0.0;  // spread of (J_rho, J_z) over lattice-equivalent nodes
  double current_phi = 0.0;        // max |J_phi|
  double current_scale = 0.0;
  double tolerance = 1e-8;
  std::size_t orbits = 0;
  bool pass = false;

  std::string summary() const {
    char buf[160];
    std::snprintf(buf, sizeof buf, "D variation %.3e, J variation %.3e, J_phi %.3e (relative)",
                  density_variation / std::max(density_scale, 1e-300), current_variation / std::max(current_scale, 1e-300),
                  current_phi / std::max(current_scale, 1e-300));
    return buf;
  }
};

struct SymmetryError : std::runtime_error {
  SymmetryReport report;
  explicit SymmetryError(const SymmetryReport& r)
      : std::runtime_error("azimuthal symmetry check failed: " + r.summary()), report(r) {}
};

namespace detail {

// Node offset from the axis; the x and y axes must be symmetric about 0 with 0 on a node.
inline long centered_index(const Axis& a, std::size_t i) {
  const double c = -a.min / a.h();
  const long ci = std::lround(c);
  if (std::abs(c - static_cast<double>(ci)) > 1e-9 || std::abs(a.max + a.min) > 1e-9 * a.h() * a.n)
    throw ConfigError("azimuthal check needs x/y axes symmetric about 0 with a node at 0");
  return static_cast<long>(i) - ci;
}

}  // namespace detail

/**
 * @brief Compares D over all nodes with equal rho on the lattice (same z), and
 * the cylindrical current components over nodes related by the eight lattice
 * symmetries of the square; J_phi must vanish. Only single-particle 3D fields.
 */
inline SymmetryReport azimuthal_symmetry_check(const WaveField& psi, double tolerance = 1e-8) {
  if (psi.spec.spatial_dim != 3 || psi.spec.total_particles() != 1)
    throw ConfigError("azimuthal check needs one particle in d = 3");
  const auto& mesh = psi.grid.mesh;
  const auto sh = mesh.shape();
  const auto D = total_density(psi);
  const auto grad = particle_gradient(psi, ParticleRef{0, 0});
  const Mask inner = interior_mask(mesh, static_cast<std::size_t>(stencil::radius));

  struct Range {
    double lo = 1e300, hi = -1e300;
    void add(double v) {
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
    double spread() const { return hi - lo; }
  };
  std::map<std::pair<long, std::size_t>, Range> dens;
  std::map<std::tuple<long, long, std::size_t>, std::array<Range, 2>> cur;

  SymmetryReport rep;
  rep.tolerance = tolerance;
  for (std::size_t i = 0; i < sh.n[0]; ++i) {
    const long a = detail::centered_index(mesh.axes[0], i);
    for (std::size_t j = 0; j < sh.n[1]; ++j) {
      const long b = detail::centered_index(mesh.axes[1], j);
      for (std::size_t l = 0; l < sh.n[2]; ++l) {
        const std::size_t k = (i * sh.n[1] + j) * sh.n[2] + l;
        dens[{a * a + b * b, l}].add(D[k]);
        rep.density_scale = std::max(rep.density_scale, D[k]);
        if (!inner[k] || (a == 0 && b == 0)) continue;
        const double hb = psi.spec.hbar;
        const double jx = hb * (std::conj(psi.values[k]) * grad[0][k]).imag();
        const double jy = hb * (std::conj(psi.values[k]) * grad[1][k]).imag();
        const double jz = hb * (std::conj(psi.values[k]) * grad[2][k]).imag();
        const double phi = std::atan2(static_cast<double>(b), static_cast<double>(a));
        const Vec3 c = to_cylindrical(Vec3{jx, jy, jz}, phi);
        rep.current_scale = std::max({rep.current_scale, std::abs(jx), std::abs(jy), std::abs(jz)});
        rep.current_phi = std::max(rep.current_phi, std::abs(c[1]));
        auto& rg = cur[{std::max(std::abs(a), std::abs(b)), std::min(std::abs(a), std::abs(b)), l}];
        rg[0].add(c[0]);
        rg[1].add(c[2]);
      }
    }
  }
  for (const auto& [key, r] : dens) rep.density_variation = std::max(rep.density_variation, r.spread());
  for (const auto& [key, r] : cur)
    rep.current_variation = std::max({rep.current_variation, r[0].spread(), r[1].spread()});
  rep.orbits = dens.size();
  rep.pass = rep.density_variation <= tolerance * rep.density_scale &&
             rep.current_variation <= tolerance * rep.current_scale &&
             rep.current_phi <= tolerance * rep.current_scale;
  return rep;
}

// ---------------------------------------------------------------- symmetric fast path

/**
 * @brief Cylindrical pressure elements of an azimuthally symmetric state on the
 * (x, z) plane at y = 0, with x read as a signed rho.
 *
 * phi-derivatives vanish identically and are not differenced. At x > 0 the
 * elements are those at (rho = x, z); the x < 0 half holds the mirrored
 * extension (rho z elements change sign) so stencils run across the axis.
 * Element order in the arrays: rr, rp, rz, pp, pz, zz.
 */
struct CylPressureParts {
  Mesh plane;      // axes (x, z)
  std::size_t sort = 0;
  std::array<std::vector<double>, 6> part1;
  std::array<std::vector<double>, 6> part2K;
  std::vector<double> P;  // part2^W = P delta
  Mask mask;              // rho >= 2h and away from the plane edges
  SymmetryReport symmetry;

  enum Elem { rr = 0, rp = 1, rz = 2, pp = 3, pz = 4, zz = 5 };
  static const char* elem_name(int e) {
    static const char* n[] = {"rho_rho", "rho_phi", "rho_z", "phi_phi", "phi_z", "z_z"};
    return n[e];
  }
};

namespace detail {

inline std::size_t zero_node(const Axis& a) {
  const long ci = std::lround(-a.min / a.h());
  if (ci < 0 || static_cast<std::size_t>(ci) >= a.n || std::abs(a.x(static_cast<std::size_t>(ci))) > 1e-9 * a.h())
    throw ConfigError("axis has no node at 0");
  return static_cast<std::size_t>(ci);
}

inline Mask plane_rho_mask(const Mesh& plane, std::size_t band) {
  Mask m = interior_mask(plane, band);
  const double lim = 2.0 * plane.axes[0].h() * (1.0 - 1e-12);
  for (std::size_t i = 0; i < plane.axes[0].n; ++i)
    if (plane.axes[0].x(i) < lim)
      for (std::size_t l = 0; l < plane.axes[1].n; ++l) m[i * plane.axes[1].n + l] = 0;
  return m;
}

}  // namespace detail

/**
 * @brief part1, part2^K and part2^W elements over (rho, z) for one sort.
 * The symmetry report must come from azimuthal_symmetry_check on the same
 * state (possibly on a coarser full grid); a failed report is refused.
 */
inline CylPressureParts cyl_pressure_parts(const WaveField& psi, std::size_t sort, const SymmetryReport& sym) {
  if (!sym.pass) throw SymmetryError(sym);
  if (psi.spec.spatial_dim != 3 || psi.spec.total_particles() != 1)
    throw ConfigError("cylindrical fast path needs one particle in d = 3");
  if (sort >= psi.spec.sorts.size()) throw ConfigError("unknown sort");
  const auto& X = psi.grid.mesh.axes[0];
  const auto& Y = psi.grid.mesh.axes[1];
  const auto& Z = psi.grid.mesh.axes[2];
  const std::size_t j0 = detail::zero_node(Y);
  detail::zero_node(X);

  CylPressureParts out;
  out.sort = sort;
  out.symmetry = sym;
  out.plane = Mesh{{X, Z}};
  const std::size_t np = X.n * Z.n;
  std::vector<cplx> f(np);
  for (std::size_t i = 0; i < X.n; ++i)
    for (std::size_t l = 0; l < Z.n; ++l) f[i * Z.n + l] = psi.values[(i * Y.n + j0) * Z.n + l];

  const auto& s = psi.spec.sorts[sort];
  const double m = s.mass, hb = psi.spec.hbar, N = s.count;
  const double c = -N * hb * hb / (4.0 * m);
  const Shape sh{{X.n, Z.n}};
  const auto gx = stencil::d1(f, sh, 0, X.h());
  const auto gz = stencil::d1(f, sh, 1, Z.h());
  std::vector<double> D(np);
  for (std::size_t k = 0; k < np; ++k) D[k] = std::norm(f[k]);
  const auto Dx = stencil::d1(D, sh, 0, X.h());
  const auto Dxx = stencil::d2(D, sh, 0, X.h());
  const auto Dzz = stencil::d2(D, sh, 1, Z.h());
  const auto Dxz = stencil::d1(stencil::d1(D, sh, 1, Z.h()), sh, 0, X.h());
  double dmax = 0.0;
  for (double v : D) dmax = std::max(dmax, v);
  const double floor = detail::division_floor * dmax;

  for (auto& e : out.part1) e.assign(np, 0.0);
  for (auto& e : out.part2K) e.assign(np, 0.0);
  out.P.assign(np, 0.0);
  const double axis_tol = 1e-9 * X.h();
  for (std::size_t i = 0; i < X.n; ++i) {
    const double x = X.x(i);
    const bool axis = std::abs(x) < axis_tol;
    for (std::size_t l = 0; l < Z.n; ++l) {
      const std::size_t k = i * Z.n + l;
      // Dx/x -> Dxx on the axis
      const double dr_over_r = axis ? Dxx[k] : Dx[k] / x;
      out.part2K[CylPressureParts::rr][k] = c * Dxx[k];
      out.part2K[CylPressureParts::rz][k] = c * Dxz[k];
      out.part2K[CylPressureParts::zz][k] = c * Dzz[k];
      out.part2K[CylPressureParts::pp][k] = c * dr_over_r;
      out.P[k] = c * (Dxx[k] + dr_over_r + Dzz[k]);
      if (D[k] <= floor) continue;
      // u = w - v with v = j/rho of this sort; g = grad D
      const cplx zx = std::conj(f[k]) * gx[k], zz = std::conj(f[k]) * gz[k];
      const double jx = hb * zx.imag(), jz = hb * zz.imag();
      const double vx = jx / (m * D[k]), vz = jz / (m * D[k]);
      const double cx = jx - m * D[k] * vx, cz = jz - m * D[k] * vz;
      const double g[2] = {2.0 * zx.real(), 2.0 * zz.real()};
      const double q = hb * hb / (4.0 * m);
      out.part1[CylPressureParts::rr][k] = N * (cx * cx / (m * D[k]) + q * g[0] * g[0] / D[k]);
      out.part1[CylPressureParts::rz][k] = N * (cx * cz / (m * D[k]) + q * g[0] * g[1] / D[k]);
      out.part1[CylPressureParts::zz][k] = N * (cz * cz / (m * D[k]) + q * g[1] * g[1] / D[k]);
    }
  }
  out.mask = detail::plane_rho_mask(out.plane, boundary_band);
  return out;
}

inline CylPressureParts cyl_pressure_parts(const WaveField& psi, std::size_t sort) {
  return cyl_pressure_parts(psi, sort, azimuthal_symmetry_check(psi));
}

/** @brief Six elements of part1 + part2 for version K or W. */
inline std::array<std::vector<double>, 6> cyl_pressure_elements(const CylPressureParts& p, Version v) {
  std::array<std::vector<double>, 6> T;
  for (int e = 0; e < 6; ++e) {
    T[e] = p.part1[e];
    for (std::size_t k = 0; k < T[e].size(); ++k) {
      if (v == Version::K) {
        T[e][k] += p.part2K[e][k];
      } else if (e == CylPressureParts::rr || e == CylPressureParts::pp || e == CylPressureParts::zz) {
        T[e][k] += p.P[k];
      }
    }
  }
  return T;
}

/**
 * @brief Full cylindrical divergence formula for an azimuthally symmetric
 * symmetric tensor on the signed-x plane (phi-derivatives are exactly zero).
 * Output components (rho, phi, z); meaningful on `mask` (x >= 2h).
 */
inline CylVectorField axisym_tensor_divergence(const Mesh& plane, const std::array<std::vector<double>, 6>& T,
                                               const Mask& mask) {
  using E = CylPressureParts;
  const Shape sh{{plane.axes[0].n, plane.axes[1].n}};
  const double hx = plane.axes[0].h(), hz = plane.axes[1].h();
  auto dr = [&](int e) { return stencil::d1(T[e], sh, 0, hx); };
  auto dz = [&](int e) { return stencil::d1(T[e], sh, 1, hz); };
  const auto drr = dr(E::rr), drp = dr(E::rp), drz = dr(E::rz);
  const auto dzr = dz(E::rz), dzp = dz(E::pz), dzz = dz(E::zz);
  CylVectorField out;
  out.mesh = plane;
  out.comp.assign(3, std::vector<double>(plane.size(), 0.0));
  out.on_axis.assign(plane.size(), 0);
  for (std::size_t i = 0; i < plane.axes[0].n; ++i)
    for (std::size_t l = 0; l < plane.axes[1].n; ++l) {
      const std::size_t k = i * plane.axes[1].n + l;
      if (!mask[k]) continue;
      const double ir = 1.0 / plane.axes[0].x(i);
      // T is symmetric: T_pr = T_rp, T_zr = T_rz, T_zp = T_pz
      out.comp[0][k] = drr[k] + ir * (T[E::rr][k] - T[E::pp][k]) + dzr[k];
      out.comp[1][k] = drp[k] + ir * (2.0 * T[E::rp][k]) + dzp[k];
      out.comp[2][k] = drz[k] + ir * T[E::rz][k] + dzz[k];
    }
  return out;
}

/** @brief Divergence of p^K or p^W from the fast-path parts. */
inline CylVectorField cyl_pressure_divergence(const CylPressureParts& p, Version v) {
  return axisym_tensor_divergence(p.plane, cyl_pressure_elements(p, v), p.mask);
}

/**
 * @brief The reduced forms: div p^{X,1} (both versions), div p^{K,2}, and
 * div p^{W,2} = (dP/drho, 0, dP/dz), summed for version v.
 */
inline CylVectorField cyl_pressure_divergence_reduced(const CylPressureParts& p, Version v) {
  using E = CylPressureParts;
  const auto& pl = p.plane;
  const Shape sh{{pl.axes[0].n, pl.axes[1].n}};
  const double hx = pl.axes[0].h(), hz = pl.axes[1].h();
  CylVectorField out;
  out.mesh = pl;
  out.comp.assign(3, std::vector<double>(pl.size(), 0.0));
  out.on_axis.assign(pl.size(), 0);
  const auto a_rr = stencil::d1(p.part1[E::rr], sh, 0, hx), a_rz_z = stencil::d1(p.part1[E::rz], sh, 1, hz);
  const auto a_rz_r = stencil::d1(p.part1[E::rz], sh, 0, hx), a_zz = stencil::d1(p.part1[E::zz], sh, 1, hz);
  std::vector<double> b_rr, b_rz_z, b_rz_r, b_zz, Pr, Pz;
  if (v == Version::K) {
    b_rr = stencil::d1(p.part2K[E::rr], sh, 0, hx);
    b_rz_z = stencil::d1(p.part2K[E::rz], sh, 1, hz);
    b_rz_r = stencil::d1(p.part2K[E::rz], sh, 0, hx);
    b_zz = stencil::d1(p.part2K[E::zz], sh, 1, hz);
  } else {
    Pr = stencil::d1(p.P, sh, 0, hx);
    Pz = stencil::d1(p.P, sh, 1, hz);
  }
  for (std::size_t i = 0; i < pl.axes[0].n; ++i)
    for (std::size_t l = 0; l < pl.axes[1].n; ++l) {
      const std::size_t k = i * pl.axes[1].n + l;
      if (!p.mask[k]) continue;
      const double ir = 1.0 / pl.axes[0].x(i);
      double br = a_rr[k] + ir * p.part1[E::rr][k] + a_rz_z[k];
      double bz = a_rz_r[k] + ir * p.part1[E::rz][k] + a_zz[k];
      if (v == Version::K) {
        br += b_rr[k] + ir * (p.part2K[E::rr][k] - p.part2K[E::pp][k]) + b_rz_z[k];
        bz += b_rz_r[k] + ir * p.part2K[E::rz][k] + b_zz[k];
      } else {
        br += Pr[k];
        bz += Pz[k];
      }
      out.comp[0][k] = br;
      out.comp[2][k] = bz;
    }
  return out;
}

// ---------------------------------------------------------------- Cartesian comparison

/**
 * @brief Axes with axis `slab` (0 = x, 1 = y) cut to the 9 nodes |q| <= 4h around 0;
 * enough for fourth-order Cartesian tensor divergences on the centre plane.
 */
inline std::vector<Axis> slab_axes(std::vector<Axis> axes, std::size_t slab) {
  const Axis a = axes.at(slab);
  detail::zero_node(a);
  const double h = a.h();
  axes[slab] = Axis{-4.0 * h, 4.0 * h, 9};
  return axes;
}

/** @brief One level of the cylindrical vs Cartesian comparison. */
struct CylLevel {
  double h = 0.0;
  double scale = 0.0;            // max |div p| (fast path, mask)
  double diff_K = 0.0;           // max |Lambda^T b_cyl - b_cart| over the four rays, version K
  double diff_W = 0.0;
  double l2_K = 0.0, l2_W = 0.0; // RMS of the same differences
  double ephi_fast = 0.0;        // max |e_phi| of div p^K, div p^W from the fast path
  double ephi_cart = 0.0;        // max |e_phi| of the Cartesian divergences rotated onto the rays
  double gauge_diff = 0.0;       // max |div p^K - div p^W| (fast path)
  double reduced_diff = 0.0;     // full vs reduced divergence formula
  double offdiag_K2 = 0.0;       // max |p^{K,2}_{rho phi}|, |p^{K,2}_{phi z}|
  double symmetry_rel = 0.0;     // max relative asymmetry of the Cartesian tensors in cylindrical form
};

namespace detail {

struct RayAccum {
  double mx = 0.0, sum2 = 0.0;
  std::size_t n = 0;
  void add(double v) {
    mx = std::max(mx, std::abs(v));
    sum2 += v * v;
    ++n;
  }
  double rms() const { return n ? std::sqrt(sum2 / static_cast<double>(n)) : 0.0; }
};

}  // namespace detail

/**
 * @brief Fast path vs Cartesian route at one resolution.
 *
 * `make_slab(slab)` must return the state on slab_axes(., slab). The y-slab
 * covers the rays phi = 0 and pi, the x-slab phi = pi/2 and 3 pi/2.
 */
template <class MakeSlab>
CylLevel cyl_compare_level(MakeSlab&& make_slab, std::size_t sort, const SymmetryReport& sym) {
  CylLevel L;
  const WaveField ys = make_slab(std::size_t{1});
  const auto parts = cyl_pressure_parts(ys, sort, sym);
  const auto& pl = parts.plane;
  const std::size_t nz = pl.axes[1].n;
  L.h = pl.axes[0].h();
  const CylVectorField bK = cyl_pressure_divergence(parts, Version::K);
  const CylVectorField bW = cyl_pressure_divergence(parts, Version::W);
  const CylVectorField rK = cyl_pressure_divergence_reduced(parts, Version::K);
  const CylVectorField rW = cyl_pressure_divergence_reduced(parts, Version::W);
  for (std::size_t k = 0; k < pl.size(); ++k) {
    if (!parts.mask[k]) continue;
    for (int c = 0; c < 3; ++c) {
      L.scale = std::max({L.scale, std::abs(bK.comp[c][k]), std::abs(bW.comp[c][k])});
      L.gauge_diff = std::max(L.gauge_diff, std::abs(bK.comp[c][k] - bW.comp[c][k]));
      L.reduced_diff = std::max({L.reduced_diff, std::abs(bK.comp[c][k] - rK.comp[c][k]),
                                 std::abs(bW.comp[c][k] - rW.comp[c][k])});
    }
    L.ephi_fast = std::max({L.ephi_fast, std::abs(bK.comp[1][k]), std::abs(bW.comp[1][k])});
  }
  L.offdiag_K2 = std::max(max_abs(parts.part2K[CylPressureParts::rp]), max_abs(parts.part2K[CylPressureParts::pz]));

  detail::RayAccum aK, aW;
  const Scope scope = Scope::of_sort(sort);
  for (std::size_t slab : {std::size_t{1}, std::size_t{0}}) {
    const WaveField w = slab == 1 ? ys : make_slab(slab);
    const auto& ax = w.grid.mesh.axes;
    const std::size_t c0 = 4;  // centre node of the 9-point slab
    for (Version v : {Version::K, Version::W}) {
      const TensorField T = pressure(w, scope, v);
      const VectorField b = tensor_divergence_cartesian(T);
      const auto& fast = v == Version::K ? bK : bW;
      auto& acc = v == Version::K ? aK : aW;
      // ray points: rho = |x_i| on the plane mask, both signs along the in-plane axis
      const std::size_t inplane = slab == 1 ? 0 : 1;
      for (std::size_t i = 0; i < ax[inplane].n; ++i) {
        const double s = ax[inplane].x(i);
        const std::size_t im = pl.axes[0].n - 1 - i;  // mirror node on the fast-path plane
        const std::size_t ip = s > 0 ? i : im;
        if (std::abs(pl.axes[0].x(ip) - std::abs(s)) > 1e-9 * L.h) throw ConfigError("slab and plane nodes differ");
        for (std::size_t l = 0; l < nz; ++l) {
          const std::size_t kp = ip * nz + l;
          if (!parts.mask[kp]) continue;
          const double phi = slab == 1 ? (s > 0 ? 0.0 : std::numbers::pi)
                                       : (s > 0 ? 0.5 * std::numbers::pi : 1.5 * std::numbers::pi);
          const std::size_t kc = slab == 1 ? (i * ax[1].n + c0) * ax[2].n + l : (c0 * ax[1].n + i) * ax[2].n + l;
          const Vec3 cart{b.comp[0][kc], b.comp[1][kc], b.comp[2][kc]};
          const Vec3 fromcyl = to_cartesian(Vec3{fast.comp[0][kp], fast.comp[1][kp], fast.comp[2][kp]}, phi);
          for (int c = 0; c < 3; ++c) acc.add(fromcyl[c] - cart[c]);
          L.ephi_cart = std::max(L.ephi_cart, std::abs(to_cylindrical(cart, phi)[1]));
          // elementwise symmetry of the transformed Cartesian tensor
          Mat3 M{};
          double mx = 0.0;
          for (int a = 0; a < 3; ++a)
            for (int bb = 0; bb < 3; ++bb) {
              M[a][bb] = T.at(a, bb)[kc];
              mx = std::max(mx, std::abs(M[a][bb]));
            }
          const Mat3 R = to_cylindrical(M, phi);
          if (mx > 0)
            for (int a = 0; a < 3; ++a)
              for (int bb = a + 1; bb < 3; ++bb)
                L.symmetry_rel = std::max(L.symmetry_rel, std::abs(R[a][bb] - R[bb][a]) / mx);
        }
      }
    }
  }
  L.diff_K = aK.mx;
  L.diff_W = aW.mx;
  L.l2_K = aK.rms();
  L.l2_W = aW.rms();
  return L;
}

}  // namespace mpqhd
