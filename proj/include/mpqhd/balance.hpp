#pragma once
// Force densities, Cartesian tensor divergence and the residuals of the
// continuity (MPCE), Ehrenfest (MPEEM) and quantum Cauchy (MPQCE) balances.

#include <cmath>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "tensors.hpp"

namespace mpqhd {

inline constexpr std::size_t boundary_band = 4;

/**
 * @brief f^A = -N(A) sum_B (N(B) - delta_AB) marg(D grad V^{AB}(|q_1^A - q_{N(B)}^B|)).
 *
 * The partner is the last particle of sort B, which is never particle 1 of A.
 */
inline VectorField force_density(const WaveField& psi, const SystemSpec& spec, Scope scope) {
  detail::check_compatible(psi, spec);
  const std::size_t d = static_cast<std::size_t>(spec.spatial_dim);
  const Mesh phys = psi.grid.physical();
  VectorField f;
  f.mesh = phys;
  f.scope = scope;
  f.kind = FieldKind::force;
  f.comp.assign(d, std::vector<double>(phys.size(), 0.0));
  if (spec.potential.kind == PotentialKind::none) return f;
  const std::size_t first = scope.total ? 0 : scope.sort;
  const std::size_t last = scope.total ? spec.sorts.size() : scope.sort + 1;
  if (first >= spec.sorts.size()) throw ConfigError("unknown sort");
  const auto x = detail::axis_coords(psi.grid.mesh);
  const auto& ax = psi.grid.mesh.axes;
  const auto psh = phys.shape();
  for (std::size_t A = first; A < last; ++A) {
    const std::size_t sa = spec.slot_offset(A);
    for (std::size_t B = 0; B < spec.sorts.size(); ++B) {
      const double mult = spec.sorts[B].count - (A == B ? 1.0 : 0.0);
      if (mult == 0.0) continue;
      const std::size_t sb = spec.slot_offset(B) + static_cast<std::size_t>(spec.sorts[B].count) - 1;
      const double pref = -spec.sorts[A].count * mult;
      detail::for_each_index(psi.grid.mesh, [&](std::size_t lin, const std::vector<std::size_t>& idx) {
        double w = 1.0;
        std::size_t q = 0;
        for (std::size_t k = 0; k < idx.size(); ++k) {
          if (k / d == sa) continue;
          w *= ax[k].weight(idx[k]);
        }
        for (std::size_t c = 0; c < d; ++c) q = q * psh.n[c] + idx[sa * d + c];
        double r2 = 0.0, dx[3];
        for (std::size_t c = 0; c < d; ++c) {
          dx[c] = x[sa * d + c][idx[sa * d + c]] - x[sb * d + c][idx[sb * d + c]];
          r2 += dx[c] * dx[c];
        }
        const double gfac = spec.potential.gradient_factor(A, B, r2) * std::norm(psi.values[lin]) * w * pref;
        for (std::size_t c = 0; c < d; ++c) f.comp[c][q] += gfac * dx[c];
      });
    }
  }
  return f;
}

/** @brief (div T)_b = sum_a dT_ab/dq_a with fourth-order stencils. */
inline VectorField tensor_divergence_cartesian(const TensorField& T) {
  VectorField out;
  out.mesh = T.mesh;
  out.scope = T.scope;
  const auto sh = T.mesh.shape();
  out.comp.assign(T.dim, std::vector<double>(T.points(), 0.0));
  for (std::size_t a = 0; a < T.dim; ++a) {
    const double h = T.mesh.axes[a].h();
    for (std::size_t b = 0; b < T.dim; ++b) {
      const auto g = stencil::d1(T.at(a, b), sh, a, h);
      for (std::size_t i = 0; i < g.size(); ++i) out.comp[b][i] += g[i];
    }
  }
  return out;
}

/// Gradient of a physical scalar.
inline std::vector<std::vector<double>> physical_gradient(const Mesh& mesh, const std::vector<double>& f) {
  std::vector<std::vector<double>> g;
  const auto sh = mesh.shape();
  for (std::size_t a = 0; a < mesh.rank(); ++a) g.push_back(stencil::d1(f, sh, a, mesh.axes[a].h()));
  return g;
}

// ---------------------------------------------------------------- balance terms

/** @brief Every term entering the three balance laws for one scope and version. */
struct BalanceTerms {
  Mesh mesh;
  Scope scope;
  Version version = Version::K;
  std::vector<double> rho, drho_dt, div_j, drho_bound;
  std::vector<std::vector<double>> j, v, dj_dt, f, div_Pi, div_p;
  Mask mask;    // eps-mask of rho minus the boundary band
  Mask mask_q;  // mask eroded by the stencil radius (velocity derivatives)
};

namespace detail {

struct SortRates {
  std::vector<double> drho, bound;
  std::vector<std::vector<double>> dj;
};

inline SortRates sort_rates(const WaveField& psi, const WaveField& psit, std::size_t A) {
  const ParticleRef p{A, 0};
  const auto& s = psi.spec.sorts[A];
  const auto g = particle_gradient(psi, p);
  const auto gt = particle_gradient(psit, p);
  SortRates r;
  const double Nm = s.count * s.mass;
  r.drho = marginalize_with(psi.grid, p, [&](std::size_t k) {
    return 2.0 * (std::conj(psi.values[k]) * psit.values[k]).real();
  });
  r.bound = marginalize_with(psi.grid, p, [&](std::size_t k) {
    return 2.0 * std::abs(psi.values[k]) * std::abs(psit.values[k]);
  });
  for (auto& v : r.drho) v *= Nm;
  for (auto& v : r.bound) v *= Nm;
  const double pref = psi.spec.hbar * s.count;
  for (std::size_t c = 0; c < g.size(); ++c) {
    auto m = marginalize_with(psi.grid, p, [&](std::size_t k) {
      return (std::conj(psit.values[k]) * g[c][k] + std::conj(psi.values[k]) * gt[c][k]).imag();
    });
    for (auto& v : m) v *= pref;
    r.dj.push_back(std::move(m));
  }
  return r;
}

}  // namespace detail

inline BalanceTerms balance_terms(const WaveField& psi, const SystemSpec& spec, Scope scope, Version version,
                                  double eps = default_eps) {
  detail::check_compatible(psi, spec);
  BalanceTerms t;
  t.mesh = psi.grid.physical();
  t.scope = scope;
  t.version = version;
  const std::size_t d = static_cast<std::size_t>(spec.spatial_dim);
  const auto rho = mass_density(psi, scope);
  const auto j = mass_current(psi, scope);
  const auto v = mean_velocity(rho, j, eps);
  t.rho = rho.values;
  t.j = j.comp;
  t.v = v.comp;

  const WaveField psit = time_derivative(psi, spec);
  const std::size_t first = scope.total ? 0 : scope.sort;
  const std::size_t last = scope.total ? spec.sorts.size() : scope.sort + 1;
  const std::size_t np = t.mesh.size();
  t.drho_dt.assign(np, 0.0);
  t.drho_bound.assign(np, 0.0);
  t.dj_dt.assign(d, std::vector<double>(np, 0.0));
  for (std::size_t A = first; A < last; ++A) {
    const auto r = detail::sort_rates(psi, psit, A);
    for (std::size_t i = 0; i < np; ++i) {
      t.drho_dt[i] += r.drho[i];
      t.drho_bound[i] += r.bound[i];
      for (std::size_t c = 0; c < d; ++c) t.dj_dt[c][i] += r.dj[c][i];
    }
  }
  t.f = force_density(psi, spec, scope).comp;
  t.div_j.assign(np, 0.0);
  {
    const auto sh = t.mesh.shape();
    for (std::size_t c = 0; c < d; ++c) {
      const auto g = stencil::d1(t.j[c], sh, c, t.mesh.axes[c].h());
      for (std::size_t i = 0; i < np; ++i) t.div_j[i] += g[i];
    }
  }
  t.div_Pi = tensor_divergence_cartesian(momentum_flow(psi, scope, version)).comp;
  t.div_p = tensor_divergence_cartesian(pressure(psi, scope, version)).comp;
  t.mask = mask_and(v.defined, interior_mask(t.mesh, boundary_band));
  t.mask_q = mask_and(erode(v.defined, t.mesh, stencil::radius), interior_mask(t.mesh, boundary_band));
  return t;
}

/** @brief A residual (or other diagnostic) field with its mask and scale. */
struct ResidualField {
  std::string law;
  std::string scope;
  Mesh mesh;
  std::vector<std::vector<double>> comp;
  Mask mask;
  double scale = 0.0;

  double h() const { return mesh.axes.empty() ? 0.0 : mesh.axes[0].h(); }

  double linf() const { return max_abs(comp, &mask); }
  double l2() const {
    double acc = 0.0;
    for (const auto& c : comp)
      for (std::size_t i = 0; i < c.size(); ++i)
        if (mask[i]) acc += c[i] * c[i];
    return std::sqrt(acc * mesh.cell_volume());
  }
};

namespace detail {

inline double masked_max(std::initializer_list<const std::vector<std::vector<double>>*> fields, const Mask& m) {
  double s = 0.0;
  for (const auto* f : fields) s = std::max(s, max_abs(*f, &m));
  return s;
}

/// (v . grad) v on the physical mesh.
inline std::vector<std::vector<double>> advective(const Mesh& mesh, const std::vector<std::vector<double>>& v) {
  const std::size_t d = v.size();
  const auto sh = mesh.shape();
  std::vector<std::vector<double>> out(d, std::vector<double>(mesh.size(), 0.0));
  for (std::size_t a = 0; a < d; ++a)
    for (std::size_t b = 0; b < d; ++b) {
      const auto g = stencil::d1(v[b], sh, a, mesh.axes[a].h());
      for (std::size_t i = 0; i < g.size(); ++i) out[b][i] += v[a][i] * g[i];
    }
  return out;
}

}  // namespace detail

/** @brief r = d rho/dt + div j. */
inline ResidualField mpce_field(const BalanceTerms& t, const SystemSpec& spec) {
  ResidualField r;
  r.law = "MPCE";
  r.scope = t.scope.name(spec);
  r.mesh = t.mesh;
  r.mask = t.mask;
  std::vector<double> c(t.rho.size(), 0.0);
  for (std::size_t i = 0; i < c.size(); ++i) c[i] = t.drho_dt[i] + t.div_j[i];
  r.scale = std::max({max_abs(t.drho_dt, &t.mask), max_abs(t.div_j, &t.mask), max_abs(t.drho_bound, &t.mask)});
  r.comp.push_back(std::move(c));
  return r;
}

/** @brief r = dj/dt - f + div Pi. */
inline ResidualField mpeem_field(const BalanceTerms& t, const SystemSpec& spec) {
  ResidualField r;
  r.law = "MPEEM";
  r.scope = t.scope.name(spec);
  r.mesh = t.mesh;
  r.mask = t.mask;
  for (std::size_t c = 0; c < t.j.size(); ++c) {
    std::vector<double> x(t.rho.size());
    for (std::size_t i = 0; i < x.size(); ++i) x[i] = t.dj_dt[c][i] - t.f[c][i] + t.div_Pi[c][i];
    r.comp.push_back(std::move(x));
  }
  r.scale = detail::masked_max({&t.dj_dt, &t.f, &t.div_Pi}, t.mask);
  return r;
}

/**
 * @brief r = rho (dv/dt + (v.grad)v) - f + div p, with
 * rho dv/dt = dj/dt - v d rho/dt on the eroded mask.
 */
inline ResidualField mpqce_field(const BalanceTerms& t, const SystemSpec& spec) {
  ResidualField r;
  r.law = "MPQCE";
  r.scope = t.scope.name(spec);
  r.mesh = t.mesh;
  r.mask = t.mask_q;
  const auto adv = detail::advective(t.mesh, t.v);
  const std::size_t d = t.j.size();
  std::vector<std::vector<double>> local(d), convective(d);
  for (std::size_t c = 0; c < d; ++c) {
    std::vector<double> x(t.rho.size(), 0.0);
    local[c].assign(t.rho.size(), 0.0);
    convective[c].assign(t.rho.size(), 0.0);
    for (std::size_t i = 0; i < x.size(); ++i) {
      if (!r.mask[i]) continue;
      local[c][i] = t.dj_dt[c][i] - t.v[c][i] * t.drho_dt[i];
      convective[c][i] = t.rho[i] * adv[c][i];
      x[i] = local[c][i] + convective[c][i] - t.f[c][i] + t.div_p[c][i];
    }
    r.comp.push_back(std::move(x));
  }
  r.scale = detail::masked_max({&local, &convective, &t.f, &t.div_p}, r.mask);
  return r;
}

/**
 * @brief Discrete product-rule defect G.(rho v v) - v G.(rho v) - rho (v.G) v,
 * so that r_MPQCE = r_MPEEM - v r_MPCE - defect exactly on the eroded mask.
 */
inline std::vector<std::vector<double>> product_rule_defect(const BalanceTerms& t) {
  const std::size_t d = t.v.size();
  const auto sh = t.mesh.shape();
  const std::size_t np = t.rho.size();
  std::vector<std::vector<double>> out(d, std::vector<double>(np, 0.0));
  std::vector<double> div_rv(np, 0.0);
  for (std::size_t a = 0; a < d; ++a) {
    std::vector<double> rv(np);
    for (std::size_t i = 0; i < np; ++i) rv[i] = t.rho[i] * t.v[a][i];
    const auto g = stencil::d1(rv, sh, a, t.mesh.axes[a].h());
    for (std::size_t i = 0; i < np; ++i) div_rv[i] += g[i];
  }
  const auto adv = detail::advective(t.mesh, t.v);
  for (std::size_t b = 0; b < d; ++b) {
    for (std::size_t a = 0; a < d; ++a) {
      std::vector<double> rvv(np);
      for (std::size_t i = 0; i < np; ++i) rvv[i] = t.rho[i] * t.v[a][i] * t.v[b][i];
      const auto g = stencil::d1(rvv, sh, a, t.mesh.axes[a].h());
      for (std::size_t i = 0; i < np; ++i) out[b][i] += g[i];
    }
    for (std::size_t i = 0; i < np; ++i) out[b][i] -= t.v[b][i] * div_rv[i] + t.rho[i] * adv[b][i];
  }
  return out;
}

// ---------------------------------------------------------------- reports

/** @brief Norms of one diagnostic on one or more grids plus its verdict. */
struct ResidualReport {
  struct Level {
    double h = 0.0, L2 = 0.0, Linf = 0.0, scale = 0.0;
  };
  std::string law;
  std::string scope;
  std::string version;  // "K", "W" or empty
  std::vector<Level> levels;
  std::vector<double> orders;  // one per successive refinement (from L2)
  std::map<std::string, double> tolerances;
  std::map<std::string, double> extra;
  bool informational = false;  // reported, but not part of any verdict
  bool pass = false;

  const Level& finest() const { return levels.back(); }
  std::optional<double> order() const {
    if (orders.empty()) return std::nullopt;
    double m = orders[0];
    for (double o : orders) m = std::min(m, o);
    return m;
  }
};

inline std::vector<double> measured_orders(const std::vector<ResidualReport::Level>& lv, bool use_linf = false) {
  std::vector<double> o;
  for (std::size_t k = 1; k < lv.size(); ++k) {
    const double a = use_linf ? lv[k - 1].Linf : lv[k - 1].L2;
    const double b = use_linf ? lv[k].Linf : lv[k].L2;
    o.push_back(std::log(a / b) / std::log(lv[k - 1].h / lv[k].h));
  }
  return o;
}

/**
 * @brief Builds a report from the same diagnostic on successively refined grids.
 *
 * Passes when Linf/scale on the finest grid is within `rel_tol` and, with two
 * or more grids, every measured order reaches `min_order`.
 */
inline ResidualReport make_report(const std::vector<ResidualField>& fields, double rel_tol,
                                  std::optional<double> min_order, const std::string& version = "") {
  ResidualReport rep;
  rep.law = fields.front().law;
  rep.scope = fields.front().scope;
  rep.version = version;
  for (const auto& f : fields) rep.levels.push_back({f.h(), f.l2(), f.linf(), f.scale});
  rep.orders = measured_orders(rep.levels);
  rep.tolerances["Linf_rel"] = rel_tol;
  bool ok = rep.finest().Linf <= rel_tol * rep.finest().scale;
  if (min_order && rep.levels.size() > 1) {
    rep.tolerances["min_order"] = *min_order;
    ok = ok && *rep.order() >= *min_order;
  }
  rep.pass = ok;
  return rep;
}

inline ResidualReport mpce_residual(const WaveField& psi, const SystemSpec& spec, Scope scope,
                                    double rel_tol = 1e-6, double eps = default_eps) {
  return make_report({mpce_field(balance_terms(psi, spec, scope, Version::K, eps), spec)}, rel_tol, std::nullopt);
}

inline ResidualReport mpeem_residual(const WaveField& psi, const SystemSpec& spec, Scope scope, Version version,
                                     double rel_tol = 1e-6, double eps = default_eps) {
  return make_report({mpeem_field(balance_terms(psi, spec, scope, version, eps), spec)}, rel_tol, std::nullopt,
                     to_string(version));
}

inline ResidualReport mpqce_residual(const WaveField& psi, const SystemSpec& spec, Scope scope, Version version,
                                     double rel_tol = 1e-6, double eps = default_eps) {
  return make_report({mpqce_field(balance_terms(psi, spec, scope, version, eps), spec)}, rel_tol, std::nullopt,
                     to_string(version));
}

// ---------------------------------------------------------------- gauge check

/** @brief p^W vs p^K: element difference (expected > 0) and divergence difference (expected -> 0). */
struct GaugeLevel {
  double h = 0.0;
  double elem_diff = 0.0, elem_scale = 0.0;
  ResidualField div_diff;
};

inline GaugeLevel gauge_level(const WaveField& psi, const SystemSpec& spec, Scope scope, double eps = default_eps) {
  detail::check_compatible(psi, spec);
  const auto pK = pressure(psi, scope, Version::K);
  const auto pW = pressure(psi, scope, Version::W);
  const auto rho = mass_density(psi, scope);
  const Mask mask = mask_and(threshold_mask(rho.values, eps), interior_mask(pK.mesh, boundary_band));
  GaugeLevel g;
  g.h = pK.mesh.axes[0].h();
  g.elem_diff = max_abs_diff(pW.comp, pK.comp, &mask);
  g.elem_scale = std::max(max_abs(pK.comp, &mask), max_abs(pW.comp, &mask));
  const auto dK = tensor_divergence_cartesian(pK);
  const auto dW = tensor_divergence_cartesian(pW);
  g.div_diff.law = "gauge_divergence";
  g.div_diff.scope = scope.name(spec);
  g.div_diff.mesh = pK.mesh;
  g.div_diff.mask = mask;
  for (std::size_t c = 0; c < dK.comp.size(); ++c) {
    std::vector<double> x(dK.comp[c].size());
    for (std::size_t i = 0; i < x.size(); ++i) x[i] = dW.comp[c][i] - dK.comp[c][i];
    g.div_diff.comp.push_back(std::move(x));
  }
  g.div_diff.scale = std::max(max_abs(dK.comp, &mask), max_abs(dW.comp, &mask));
  return g;
}

/**
 * @brief Gauge report over refinement levels: elementwise difference must be at
 * least `min_elem_rel` of the tensor scale, the divergence difference must
 * shrink by `min_factor` per halving.
 */
inline ResidualReport gauge_divergence_check(const std::vector<GaugeLevel>& levels, double min_elem_rel = 1e-4,
                                             double min_factor = 8.0) {
  ResidualReport rep;
  rep.law = "gauge_divergence";
  rep.scope = levels.front().div_diff.scope;
  for (const auto& g : levels)
    rep.levels.push_back({g.h, g.div_diff.l2(), g.div_diff.linf(), g.div_diff.scale});
  rep.orders = measured_orders(rep.levels);
  rep.tolerances["min_elem_rel"] = min_elem_rel;
  rep.tolerances["min_shrink_factor"] = min_factor;
  double elem_rel = 1e300;
  for (const auto& g : levels) elem_rel = std::min(elem_rel, g.elem_diff / g.elem_scale);
  rep.extra["elem_diff_rel_min"] = elem_rel;
  bool ok = elem_rel >= min_elem_rel;
  double worst = 1e300;
  for (std::size_t k = 1; k < rep.levels.size(); ++k)
    worst = std::min(worst, rep.levels[k - 1].L2 / rep.levels[k].L2);
  if (rep.levels.size() > 1) {
    rep.extra["div_shrink_factor_min"] = worst;
    ok = ok && worst >= min_factor;
  }
  rep.pass = ok;
  return rep;
}

inline ResidualReport gauge_divergence_check(const WaveField& psi, const SystemSpec& spec, Scope scope,
                                             double eps = default_eps) {
  return gauge_divergence_check({gauge_level(psi, spec, scope, eps)});
}

}  // namespace mpqhd
