#pragma once
// Densities, mass currents and the mean / per-particle / relative / osmotic velocities.

#include <cmath>
#include <vector>

#include "fields.hpp"

namespace mpqhd {

inline constexpr double default_eps = 1e-10;

/// G_alpha Psi along each axis of particle p.
inline std::vector<std::vector<cplx>> particle_gradient(const WaveField& psi, ParticleRef p) {
  const auto sh = psi.grid.shape();
  std::vector<std::vector<cplx>> g;
  for (std::size_t k : psi.grid.particle_axes(p))
    g.push_back(stencil::d1(psi.values, sh, k, psi.grid.mesh.axes[k].h()));
  return g;
}

/// D = |Psi|^2 on the configuration grid.
inline std::vector<double> total_density(const WaveField& psi) {
  std::vector<double> D(psi.values.size());
  for (std::size_t k = 0; k < D.size(); ++k) D[k] = std::norm(psi.values[k]);
  return D;
}

namespace detail {

inline ScalarField sort_density(const WaveField& psi, std::size_t A) {
  const auto& s = psi.spec.sorts.at(A);
  const double pref = s.count * s.mass;
  ScalarField f;
  f.mesh = psi.grid.physical();
  f.scope = Scope::of_sort(A);
  f.kind = FieldKind::density;
  f.values = marginalize_with(psi.grid, ParticleRef{A, 0},
                              [&](std::size_t k) { return std::norm(psi.values[k]); });
  for (auto& v : f.values) v *= pref;
  return f;
}

inline VectorField sort_current(const WaveField& psi, std::size_t A,
                                const std::vector<std::vector<cplx>>* grad = nullptr) {
  const auto& s = psi.spec.sorts.at(A);
  const ParticleRef p{A, 0};
  std::vector<std::vector<cplx>> local;
  if (!grad) {
    local = particle_gradient(psi, p);
    grad = &local;
  }
  VectorField j;
  j.mesh = psi.grid.physical();
  j.scope = Scope::of_sort(A);
  j.kind = FieldKind::current;
  const double pref = psi.spec.hbar * s.count;
  for (const auto& g : *grad) {
    auto c = marginalize_with(psi.grid, p, [&](std::size_t k) {
      return (std::conj(psi.values[k]) * g[k]).imag();
    });
    for (auto& v : c) v *= pref;
    j.comp.push_back(std::move(c));
  }
  return j;
}

}  // namespace detail

/** @brief rho_m = N(A) m_A marg(D) for a sort, or the sum over sorts. */
inline ScalarField mass_density(const WaveField& psi, Scope scope) {
  if (!scope.total) return detail::sort_density(psi, scope.sort);
  ScalarField tot = detail::sort_density(psi, 0);
  for (std::size_t A = 1; A < psi.spec.sorts.size(); ++A) {
    const auto f = detail::sort_density(psi, A);
    for (std::size_t i = 0; i < tot.values.size(); ++i) tot.values[i] += f.values[i];
  }
  tot.scope = Scope::all();
  return tot;
}

/** @brief j_m = hbar N(A) marg(Im[Psi* grad_1 Psi]) for a sort, or the sum over sorts. */
inline VectorField mass_current(const WaveField& psi, Scope scope) {
  if (!scope.total) return detail::sort_current(psi, scope.sort);
  VectorField tot = detail::sort_current(psi, 0);
  for (std::size_t A = 1; A < psi.spec.sorts.size(); ++A) {
    const auto f = detail::sort_current(psi, A);
    for (std::size_t c = 0; c < tot.comp.size(); ++c)
      for (std::size_t i = 0; i < tot.comp[c].size(); ++i) tot.comp[c][i] += f.comp[c][i];
  }
  tot.scope = Scope::all();
  return tot;
}

/** @brief v = j / rho where rho > eps max rho; zero and undefined elsewhere. */
inline VectorField mean_velocity(const ScalarField& rho, const VectorField& j, double eps = default_eps) {
  if (!(rho.scope == j.scope)) throw SpecMismatch("mean_velocity: density and current scopes differ");
  if (!(rho.mesh == j.mesh)) throw SpecMismatch("mean_velocity: density and current meshes differ");
  VectorField v;
  v.mesh = rho.mesh;
  v.scope = rho.scope;
  v.kind = FieldKind::velocity;
  v.defined = threshold_mask(rho.values, eps);
  for (const auto& jc : j.comp) {
    std::vector<double> c(jc.size(), 0.0);
    for (std::size_t i = 0; i < c.size(); ++i)
      if (v.defined[i]) c[i] = jc[i] / rho.values[i];
    v.comp.push_back(std::move(c));
  }
  return v;
}

inline VectorField mean_velocity(const WaveField& psi, Scope scope, double eps = default_eps) {
  return mean_velocity(mass_density(psi, scope), mass_current(psi, scope), eps);
}

namespace detail {

// mode 0: w = hbar Im[Psi* G Psi]/(m D); mode 1: d = -(hbar/m) Re[Psi* G Psi]/D
inline ConfigVectorField config_velocity(const WaveField& psi, ParticleRef p, double eps, int mode) {
  const double m = psi.spec.sorts.at(p.sort).mass;
  psi.grid.slot(p);  // validates (A,i)
  const auto grad = particle_gradient(psi, p);
  const auto D = total_density(psi);
  ConfigVectorField w;
  w.grid = psi.grid;
  w.particle = p;
  w.defined = threshold_mask(D, eps);
  const double pref = psi.spec.hbar / m;
  for (const auto& g : grad) {
    std::vector<double> c(D.size(), 0.0);
    for (std::size_t k = 0; k < D.size(); ++k) {
      if (!w.defined[k]) continue;
      const cplx z = std::conj(psi.values[k]) * g[k];
      c[k] = mode == 0 ? pref * z.imag() / D[k] : -pref * z.real() / D[k];
    }
    w.comp.push_back(std::move(c));
  }
  return w;
}

}  // namespace detail

/** @brief w_i^A = hbar Im[Psi* grad_i Psi] / (m_A D), undefined where D <= eps max D. */
inline ConfigVectorField particle_velocity(const WaveField& psi, ParticleRef p, double eps = default_eps) {
  return detail::config_velocity(psi, p, eps, 0);
}

/** @brief d_i^A = -(hbar/2m_A) grad_i D / D, with grad D = 2 Re[Psi* grad Psi]. */
inline ConfigVectorField osmotic_velocity(const WaveField& psi, ParticleRef p, double eps = default_eps) {
  return detail::config_velocity(psi, p, eps, 1);
}

/**
 * @brief u = w - v(q_i) with v of the particle's own sort (reference = sort) or
 * of the whole ensemble (reference = total); v is read at the exact grid node.
 */
inline ConfigVectorField relative_velocity(const WaveField& psi, ParticleRef p, Scope reference,
                                           double eps = default_eps) {
  if (!reference.total && reference.sort != p.sort)
    throw ConfigError("relative_velocity: reference must be the particle's sort or total");
  auto w = particle_velocity(psi, p, eps);
  const auto v = mean_velocity(psi, reference, eps);
  sweep(psi.grid, p, [&](std::size_t k, std::size_t phys, double) {
    if (!v.defined[phys]) w.defined[k] = 0;
    if (!w.defined[k]) {
      for (auto& c : w.comp) c[k] = 0.0;
      return;
    }
    for (std::size_t c = 0; c < w.comp.size(); ++c) w.comp[c][k] -= v.comp[c][phys];
  });
  return w;
}

/**
 * @brief <p_alpha> of particle p, hbar * integral Im[Psi* d_alpha Psi] dQ, with the
 * sixth-order zero-extended stencil.
 */
inline std::vector<double> momentum_expectation(const WaveField& psi, ParticleRef p) {
  const auto sh = psi.grid.shape();
  std::vector<double> out;
  for (std::size_t k : psi.grid.particle_axes(p)) {
    const auto g = stencil::d1_zero_extended6(psi.values, sh, k, psi.grid.mesh.axes[k].h());
    std::vector<double> f(g.size());
    for (std::size_t i = 0; i < f.size(); ++i) f[i] = (std::conj(psi.values[i]) * g[i]).imag();
    out.push_back(psi.spec.hbar * psi.grid.mesh.integrate(f));
  }
  return out;
}

/**
 * @brief Curl of a configuration vector field w.r.t. its particle's coordinates.
 *
 * d = 2 gives one component, d = 3 gives three. Values are kept only where the
 * field is defined on the whole stencil footprint.
 */
inline std::vector<std::vector<double>> config_curl(const ConfigVectorField& f, Mask* valid = nullptr) {
  const std::size_t d = f.comp.size();
  if (d < 2) throw ConfigError("curl needs spatial dimension >= 2");
  const auto sh = f.grid.shape();
  const auto ax = f.grid.particle_axes(f.particle);
  auto D = [&](std::size_t comp, std::size_t dir) {
    return stencil::d1(f.comp[comp], sh, ax[dir], f.grid.mesh.axes[ax[dir]].h());
  };
  std::vector<std::vector<double>> out;
  auto push = [&](std::size_t a, std::size_t b) {  // d_a f_b - d_b f_a
    auto x = D(b, a);
    const auto y = D(a, b);
    for (std::size_t k = 0; k < x.size(); ++k) x[k] -= y[k];
    out.push_back(std::move(x));
  };
  if (d == 2) {
    push(0, 1);
  } else {
    push(1, 2);
    push(2, 0);
    push(0, 1);
  }
  Mask m = erode(f.defined, f.grid.mesh, stencil::radius);
  for (auto& c : out)
    for (std::size_t k = 0; k < c.size(); ++k)
      if (!m[k]) c[k] = 0.0;
  if (valid) *valid = std::move(m);
  return out;
}

}  // namespace mpqhd
