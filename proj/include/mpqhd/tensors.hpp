#pragma once
// Kuzmenkov and Wyatt momentum-flow and pressure tensors with their
// classical/quantum and first/second-order splits.

#include <cmath>
#include <limits>
#include <utility>
#include <vector>

#include "hydrofields.hpp"

namespace mpqhd {

namespace detail {

// Divisions by D below this fraction of max D are dropped; every integrand that
// divides by D is bounded by |grad Psi|^2 there, so the loss is far below roundoff.
inline constexpr double division_floor = 1e-280;

}  // namespace detail

/// Default velocity threshold inside tensors: v = j/rho wherever rho is above the
/// division floor, so the u-dyad of a single particle vanishes in the tails too.
inline constexpr double tensor_eps = detail::division_floor;

namespace detail {

/// Hessian of D along the axes of particle p, packed as (0,0),(0,1),..,(1,1),..
/// Diagonal entries use the compact second-derivative stencil.
inline std::vector<std::vector<double>> density_hessian(const WaveField& psi, const std::vector<double>& D,
                                                        ParticleRef p) {
  const auto sh = psi.grid.shape();
  const auto ax = psi.grid.particle_axes(p);
  const std::size_t d = ax.size();
  std::vector<std::vector<double>> first(d);
  std::vector<std::vector<double>> H;
  for (std::size_t a = 0; a < d; ++a) {
    const double ha = psi.grid.mesh.axes[ax[a]].h();
    for (std::size_t b = a; b < d; ++b) {
      if (a == b) {
        H.push_back(stencil::d2(D, sh, ax[a], ha));
      } else {
        if (first[b].empty()) first[b] = stencil::d1(D, sh, ax[b], psi.grid.mesh.axes[ax[b]].h());
        H.push_back(stencil::d1(first[b], sh, ax[a], ha));
      }
    }
  }
  return H;
}

inline std::size_t packed(std::size_t a, std::size_t b, std::size_t d) {
  if (a > b) std::swap(a, b);
  return a * d - a * (a - 1) / 2 + (b - a);
}

/** @brief N(A)-scaled marginals from which every tensor of one sort is assembled. */
struct Moments {
  std::size_t d = 0;
  std::vector<std::vector<double>> cl;      // (J - mDv)(x)(J - mDv)/(mD); v = 0 gives m D w(x)w
  std::vector<std::vector<double>> dd;      // m D d(x)d
  std::vector<std::vector<double>> hess;    // -(hbar^2/4m) d2 D
  std::vector<double> P;                    // -(hbar^2/4m) Lap D
  std::vector<std::vector<double>> fusedK;  // whole K integrand in one pass
  std::vector<std::vector<double>> fusedW;  // whole W integrand in one pass

  void add(const Moments& o) {
    auto acc = [](std::vector<std::vector<double>>& a, const std::vector<std::vector<double>>& b) {
      for (std::size_t c = 0; c < a.size(); ++c)
        for (std::size_t i = 0; i < a[c].size(); ++i) a[c][i] += b[c][i];
    };
    acc(cl, o.cl);
    acc(dd, o.dd);
    acc(hess, o.hess);
    acc(fusedK, o.fusedK);
    acc(fusedW, o.fusedW);
    for (std::size_t i = 0; i < P.size(); ++i) P[i] += o.P[i];
  }
};

/// vref == nullptr gives the velocity dyad w(x)w; otherwise u = w - vref(q_1).
inline Moments sort_moments(const WaveField& psi, std::size_t A, const VectorField* vref) {
  const ParticleRef p{A, 0};
  const auto& s = psi.spec.sorts.at(A);
  const double m = s.mass, hb = psi.spec.hbar, N = s.count;
  const std::size_t d = static_cast<std::size_t>(psi.spec.spatial_dim);
  const auto grad = particle_gradient(psi, p);
  const auto D = total_density(psi);
  const auto H = density_hessian(psi, D, p);
  double dmax = 0.0;
  for (double v : D) dmax = std::max(dmax, v);
  const double floor = division_floor * dmax;
  const double q = hb * hb / (4.0 * m);
  const std::size_t np = psi.grid.physical().size();

  Moments M;
  M.d = d;
  auto zeros = [&] { return std::vector<std::vector<double>>(d * d, std::vector<double>(np, 0.0)); };
  M.cl = zeros();
  M.dd = zeros();
  M.hess = zeros();
  M.fusedK = zeros();
  M.fusedW = zeros();
  M.P.assign(np, 0.0);

  double c[3], g[3], h[3][3];
  sweep(psi.grid, p, [&](std::size_t k, std::size_t phys, double wt) {
    const double Dk = D[k];
    const bool ok = Dk > floor;
    const double inv = ok ? 1.0 / Dk : 0.0;
    double lap = 0.0;
    for (std::size_t a = 0; a < d; ++a) {
      const cplx z = std::conj(psi.values[k]) * grad[a][k];
      c[a] = hb * z.imag();
      if (vref) c[a] -= m * Dk * vref->comp[a][phys];
      g[a] = 2.0 * z.real();
      for (std::size_t b = a; b < d; ++b) h[a][b] = h[b][a] = H[packed(a, b, d)][k];
      lap += h[a][a];
    }
    M.P[phys] += wt * (-q * lap);
    for (std::size_t a = 0; a < d; ++a)
      for (std::size_t b = 0; b < d; ++b) {
        const std::size_t e = a * d + b;
        const double cl = c[a] * c[b] * inv / m;
        const double dd = q * g[a] * g[b] * inv;
        const double hs = -q * h[a][b];
        M.cl[e][phys] += wt * cl;
        M.dd[e][phys] += wt * dd;
        M.hess[e][phys] += wt * hs;
        M.fusedK[e][phys] += wt * (cl + dd - q * h[a][b]);
        M.fusedW[e][phys] += wt * (cl + dd - (a == b ? q * lap : 0.0));
      }
  });
  auto scale = [&](std::vector<std::vector<double>>& t) {
    for (auto& comp : t)
      for (auto& v : comp) v *= N;
  };
  scale(M.cl);
  scale(M.dd);
  scale(M.hess);
  scale(M.fusedK);
  scale(M.fusedW);
  for (auto& v : M.P) v *= N;
  return M;
}

inline Moments scope_moments(const WaveField& psi, Scope scope, Family family, double eps) {
  if (!scope.total) {
    if (family == Family::momentum_flow) return sort_moments(psi, scope.sort, nullptr);
    const auto v = mean_velocity(psi, scope, eps);
    return sort_moments(psi, scope.sort, &v);
  }
  VectorField v;
  if (family == Family::pressure) v = mean_velocity(psi, Scope::all(), eps);
  const VectorField* vp = family == Family::pressure ? &v : nullptr;
  Moments M = sort_moments(psi, 0, vp);
  for (std::size_t A = 1; A < psi.spec.sorts.size(); ++A) M.add(sort_moments(psi, A, vp));
  return M;
}

}  // namespace detail

/** @brief All parts of one tensor (family, version, scope). */
struct TensorSet {
  TensorField full, classical, quantum, part1, part2;
};

/**
 * @brief Builds full, classical, quantum, part1 and part2 tensors.
 *
 * The full tensor comes from a single fused integrand; the parts are assembled
 * from separately accumulated marginals, so cl + qu = full is a real check.
 */
inline TensorSet tensor_set(const WaveField& psi, Scope scope, Family family, Version version,
                            double eps = tensor_eps) {
  const auto M = detail::scope_moments(psi, scope, family, eps);
  const std::size_t d = M.d;
  const Mesh mesh = psi.grid.physical();
  auto make = [&](Part part) {
    TensorField t = zero_tensor(mesh, d);
    t.scope = scope;
    t.family = family;
    t.version = version;
    t.part = part;
    return t;
  };
  TensorSet s{make(Part::full), make(Part::classical), make(Part::quantum), make(Part::part1),
              make(Part::part2)};
  const std::size_t np = mesh.size();
  for (std::size_t a = 0; a < d; ++a)
    for (std::size_t b = 0; b < d; ++b) {
      const std::size_t e = a * d + b;
      const auto& fused = version == Version::K ? M.fusedK[e] : M.fusedW[e];
      for (std::size_t i = 0; i < np; ++i) {
        const double second = version == Version::K ? M.hess[e][i] : (a == b ? M.P[i] : 0.0);
        s.full.comp[e][i] = fused[i];
        s.classical.comp[e][i] = M.cl[e][i];
        s.quantum.comp[e][i] = M.dd[e][i] + second;
        s.part1.comp[e][i] = M.cl[e][i] + M.dd[e][i];
        s.part2.comp[e][i] = second;
      }
    }
  return s;
}

/** @brief P_A = -N(A) (hbar^2/4m_A) marg(Lap D); total = sum over sorts. */
inline ScalarField scalar_quantum_pressure(const WaveField& psi, Scope scope) {
  ScalarField P;
  P.mesh = psi.grid.physical();
  P.scope = scope;
  P.kind = FieldKind::quantum_pressure;
  const auto D = total_density(psi);
  P.values.assign(P.mesh.size(), 0.0);
  const std::size_t first = scope.total ? 0 : scope.sort;
  const std::size_t last = scope.total ? psi.spec.sorts.size() : scope.sort + 1;
  if (first >= psi.spec.sorts.size()) throw ConfigError("unknown sort");
  const auto sh = psi.grid.shape();
  for (std::size_t A = first; A < last; ++A) {
    const auto& s = psi.spec.sorts[A];
    const ParticleRef p{A, 0};
    std::vector<double> lap(D.size(), 0.0);
    for (std::size_t k : psi.grid.particle_axes(p)) {
      const auto l = stencil::d2(D, sh, k, psi.grid.mesh.axes[k].h());
      for (std::size_t i = 0; i < lap.size(); ++i) lap[i] += l[i];
    }
    const auto m = marginalize(psi.grid, lap, p);
    const double pref = -s.count * psi.spec.hbar * psi.spec.hbar / (4.0 * s.mass);
    for (std::size_t i = 0; i < m.size(); ++i) P.values[i] += pref * m[i];
  }
  return P;
}

inline ScalarField scalar_quantum_pressure(const WaveField& psi, std::size_t sort) {
  return scalar_quantum_pressure(psi, Scope::of_sort(sort));
}

/** @brief Pi^K or Pi^W for a sort or the total ensemble. */
inline TensorField momentum_flow(const WaveField& psi, Scope scope, Version version, double eps = tensor_eps) {
  return tensor_set(psi, scope, Family::momentum_flow, version, eps).full;
}

/** @brief p^K or p^W; the total scope uses velocities relative to v^tot. */
inline TensorField pressure(const WaveField& psi, Scope scope, Version version, double eps = tensor_eps) {
  return tensor_set(psi, scope, Family::pressure, version, eps).full;
}

inline std::pair<TensorField, TensorField> split_cl_qu(const WaveField& psi, Scope scope, Family family,
                                                       Version version, double eps = tensor_eps) {
  auto s = tensor_set(psi, scope, family, version, eps);
  return {std::move(s.classical), std::move(s.quantum)};
}

inline std::pair<TensorField, TensorField> split_parts_1_2(const WaveField& psi, Scope scope, Family family,
                                                           Version version, double eps = tensor_eps) {
  auto s = tensor_set(psi, scope, family, version, eps);
  return {std::move(s.part1), std::move(s.part2)};
}

/// Largest |T_ab - T_ba| over all points.
inline double asymmetry(const TensorField& t) {
  double r = 0.0;
  for (std::size_t a = 0; a < t.dim; ++a)
    for (std::size_t b = a + 1; b < t.dim; ++b)
      for (std::size_t i = 0; i < t.points(); ++i) r = std::max(r, std::abs(t.at(a, b)[i] - t.at(b, a)[i]));
  return r;
}

}  // namespace mpqhd
