#pragma once
// Bundled analytic scenarios: system, grid recipe, wave-function constructor,
// expected values and calibrated tolerances.

#include <cmath>
#include <functional>
#include <map>
#include <numbers>
#include <string>
#include <vector>

#include "configspace.hpp"

namespace mpqhd {

struct ExpectedValue {
  std::string quantity;
  std::string formula;
  double value = 0.0;
  std::string source;  // "closed_form" (textbook packet result) or "derived"
};

/** @brief Calibrated verdict thresholds of one scenario. */
struct Tolerances {
  double residual_rel = 1e-6;     // Linf / scale on the finest grid
  double min_order = 3.0;         // balance residual convergence
  double stationary_rel = 1e-8;   // stationary states, base grid
  double identity_rel = 1e-10;    // bridge identity, K/W residual agreement
  double quantum_rel = 1e-12;     // p^qu vs Pi^qu
  double classical_rel = 1e-10;   // single-particle p^cl
};

struct Scenario {
  using Params = std::map<std::string, double>;

  std::string name;
  std::string description;
  SystemSpec spec;
  std::vector<Axis> axes;             // physical axes at the reference resolution
  std::vector<std::size_t> levels;    // points per axis for refinement studies
  Params params;
  Tolerances tol;
  bool stationary = false;
  bool azimuthal = false;
  std::vector<std::string> stationary_scopes;  // scopes gated by the stationary bound
  std::function<WaveField(const Scenario&, const Grid&, bool)> make;

  bool single_particle() const { return spec.total_particles() == 1; }

  /// Physical axes with n points each (same bounds).
  std::vector<Axis> axes_with(std::size_t n) const {
    auto a = axes;
    for (auto& x : a) x.n = n;
    return a;
  }

  Grid grid(std::size_t cap = default_point_cap) const { return build_grid(spec, axes, cap); }
  Grid grid(std::size_t n, std::size_t cap) const { return build_grid(spec, axes_with(n), cap); }

  /// Wave field on `g`; renormalize = false keeps the analytic normalization (sub-boxes).
  WaveField wavefield(const Grid& g, bool renormalize = true) const { return make(*this, g, renormalize); }
  WaveField wavefield() const { return wavefield(grid()); }

  double p(const std::string& key) const { return params.at(key); }
};

namespace detail {

inline std::vector<cplx> gaussian_1d(const Axis& ax, double x0, double sigma, double k) {
  std::vector<cplx> f(ax.n);
  const double c = std::pow(2.0 * std::numbers::pi * sigma * sigma, -0.25);
  for (std::size_t i = 0; i < ax.n; ++i) {
    const double x = ax.x(i) - x0;
    f[i] = c * std::exp(cplx(-x * x / (4.0 * sigma * sigma), k * ax.x(i)));
  }
  return f;
}

inline WaveField finish(const Grid& g, const SystemSpec& spec, std::vector<cplx> v, bool renormalize) {
  WaveField psi(g, spec, std::move(v));
  if (renormalize) psi.normalize();
  return psi;
}

inline SortSpec sort(std::string label, double mass, int count, Statistics st, double charge = 0.0) {
  SortSpec s;
  s.label = std::move(label);
  s.mass = mass;
  s.charge = charge;
  s.count = count;
  s.statistics = st;
  return s;
}

}  // namespace detail

/** @brief Free 1D Gaussian packet, sigma = 1, k0 = 2, m = 1, hbar = 1. */
inline Scenario scenario_gaussian1d() {
  Scenario s;
  s.name = "gaussian1d";
  s.description = "free 1D Gaussian packet (sigma=1, k0=2, m=1), 2048 points on [-12,12]";
  s.spec.spatial_dim = 1;
  s.spec.sorts = {detail::sort("e", 1.0, 1, Statistics::distinguishable)};
  s.axes = {Axis{-12.0, 12.0, 2048}};
  s.levels = {257, 513, 1025};
  s.tol.residual_rel = 1e-5;
  s.params = {{"sigma", 1.0}, {"k0", 2.0}, {"x0", 0.0}};
  s.make = [](const Scenario& sc, const Grid& g, bool rn) {
    return detail::finish(g, sc.spec, detail::gaussian_1d(g.mesh.axes[0], sc.p("x0"), sc.p("sigma"), sc.p("k0")),
                          rn);
  };
  return s;
}

/** @brief Two distinguishable sorts, counter-propagating packets, soft-Coulomb attraction. */
inline Scenario scenario_twosort_counter() {
  Scenario s;
  s.name = "twosort_counter";
  s.description = "two sorts x 1 particle in 1D, packets with k0 = +2 and -2, soft-Coulomb attraction";
  s.spec.spatial_dim = 1;
  s.spec.sorts = {detail::sort("a", 1.0, 1, Statistics::distinguishable, 1.0),
                  detail::sort("b", 2.0, 1, Statistics::distinguishable, -1.0)};
  s.spec.potential.kind = PotentialKind::soft_coulomb;
  s.spec.potential.a = 1.0;
  s.spec.potential.b = 1.0;
  s.spec.potential.coeff = {{1.0, -1.0}, {-1.0, 1.0}};
  s.axes = {Axis{-12.0, 12.0, 513}};
  s.levels = {129, 257, 513};
  s.tol.residual_rel = 1e-4;
  s.params = {{"xa", -1.0}, {"sa", 1.0}, {"ka", 2.0}, {"xb", 1.0}, {"sb", 1.2}, {"kb", -2.0}};
  s.make = [](const Scenario& sc, const Grid& g, bool rn) {
    const auto& ax = g.mesh.axes[0];
    const auto fa = detail::gaussian_1d(ax, sc.p("xa"), sc.p("sa"), sc.p("ka"));
    const auto fb = detail::gaussian_1d(ax, sc.p("xb"), sc.p("sb"), sc.p("kb"));
    std::vector<cplx> v(g.size());
    for (std::size_t i = 0; i < ax.n; ++i)
      for (std::size_t j = 0; j < ax.n; ++j) v[i * ax.n + j] = fa[i] * fb[j];
    return detail::finish(g, sc.spec, std::move(v), rn);
  };
  return s;
}

/** @brief Single particle in 2D: Gaussian with xy correlation 0.5 and a chirped phase. */
inline Scenario scenario_corr2d() {
  Scenario s;
  s.name = "corr2d";
  s.description = "single 2D particle, correlated Gaussian (rho_xy = 0.5) with chirped phase";
  s.spec.spatial_dim = 2;
  s.spec.sorts = {detail::sort("e", 1.0, 1, Statistics::distinguishable)};
  s.axes = {Axis{-9.0, 9.0, 257}, Axis{-9.0, 9.0, 257}};
  s.levels = {129, 257, 513};
  s.tol.residual_rel = 1e-5;
  s.params = {{"corr", 0.5}, {"kx", 1.0}, {"ky", -0.5}, {"beta", 0.3}, {"gamma", 0.2}};
  s.make = [](const Scenario& sc, const Grid& g, bool rn) {
    const double r = sc.p("corr");
    const double det = 1.0 - r * r;  // unit variances
    const double norm = 1.0 / std::sqrt(2.0 * std::numbers::pi * std::sqrt(det));
    const auto& X = g.mesh.axes[0];
    const auto& Y = g.mesh.axes[1];
    std::vector<cplx> v(g.size());
    for (std::size_t i = 0; i < X.n; ++i)
      for (std::size_t j = 0; j < Y.n; ++j) {
        const double x = X.x(i), y = Y.x(j);
        const double quad = (x * x - 2.0 * r * x * y + y * y) / det;
        const double S = sc.p("kx") * x + sc.p("ky") * y + sc.p("beta") * x * y +
                         0.5 * sc.p("gamma") * (x * x - y * y);
        v[i * Y.n + j] = norm * std::exp(cplx(-0.25 * quad, S));
      }
    return detail::finish(g, sc.spec, std::move(v), rn);
  };
  return s;
}

/** @brief Azimuthally symmetric 3D ring (c + rho^2) exp(-(rho^2+z^2)/4s^2) e^{ikz}. */
inline Scenario scenario_ring3d() {
  Scenario s;
  s.name = "ring3d";
  s.description = "single 3D particle, smooth ring (c + rho^2) exp(-(rho^2+z^2)/4) e^{ikz}";
  s.spec.spatial_dim = 3;
  s.spec.sorts = {detail::sort("e", 1.0, 1, Statistics::distinguishable)};
  s.axes = {Axis{-10.0, 10.0, 81}, Axis{-10.0, 10.0, 81}, Axis{-10.0, 10.0, 81}};
  s.levels = {81, 161, 321};
  s.azimuthal = true;
  s.params = {{"c", 0.1}, {"s", 1.0}, {"k", 1.0}, {"x_offset", 0.0}};
  s.make = [](const Scenario& sc, const Grid& g, bool rn) {
    const double c = sc.p("c"), sg = sc.p("s"), k = sc.p("k"), x0 = sc.p("x_offset");
    const double a = 2.0 * sg * sg;
    const double I = std::numbers::pi * (c * c * a + 2.0 * c * a * a + 2.0 * a * a * a) *
                     std::sqrt(2.0 * std::numbers::pi) * sg;
    const double C = 1.0 / std::sqrt(I);
    const auto& X = g.mesh.axes[0];
    const auto& Y = g.mesh.axes[1];
    const auto& Z = g.mesh.axes[2];
    std::vector<cplx> v(g.size());
    std::size_t lin = 0;
    for (std::size_t i = 0; i < X.n; ++i)
      for (std::size_t j = 0; j < Y.n; ++j)
        for (std::size_t l = 0; l < Z.n; ++l, ++lin) {
          const double x = X.x(i) - x0, y = Y.x(j), z = Z.x(l);
          const double r2 = x * x + y * y;
          v[lin] = C * (c + r2) * std::exp(cplx(-(r2 + z * z) / (4.0 * sg * sg), k * z));
        }
    return detail::finish(g, sc.spec, std::move(v), rn);
  };
  return s;
}

/** @brief Two harmonically coupled bosons in 1D, symmetrized moving packets. */
inline Scenario scenario_twoboson_harmonic() {
  Scenario s;
  s.name = "twoboson_harmonic";
  s.description = "two bosons in 1D with harmonic coupling, symmetrized moving packets";
  s.spec.spatial_dim = 1;
  s.spec.sorts = {detail::sort("b", 1.0, 2, Statistics::boson)};
  s.spec.potential.kind = PotentialKind::harmonic_coupling;
  s.spec.potential.a = 1.0;
  s.axes = {Axis{-11.0, 11.0, 257}};
  s.levels = {129, 257, 513};
  s.tol.residual_rel = 1e-5;
  s.params = {{"x1", -1.5}, {"s1", 1.0}, {"k1", 1.0}, {"x2", 1.5}, {"s2", 0.8}, {"k2", -0.5}};
  s.make = [](const Scenario& sc, const Grid& g, bool) {
    const auto& ax = g.mesh.axes[0];
    std::vector<std::vector<std::vector<cplx>>> f{{detail::gaussian_1d(ax, sc.p("x1"), sc.p("s1"), sc.p("k1")),
                                                   detail::gaussian_1d(ax, sc.p("x2"), sc.p("s2"), sc.p("k2"))}};
    return symmetrize(f, sc.spec, g);
  };
  return s;
}

/**
 * @brief Light particle bound harmonically to a very heavy second sort; the
 * relative ground state times a static anchor packet is stationary up to
 * O(m_e / m_anchor).
 */
inline Scenario scenario_anchored_harmonic() {
  Scenario s;
  s.name = "anchored_harmonic";
  s.description = "light particle bound to a heavy anchor (mass 1e8) by a spring: real stationary state";
  s.spec.spatial_dim = 1;
  s.spec.sorts = {detail::sort("e", 1.0, 1, Statistics::distinguishable),
                  detail::sort("n", 1e8, 1, Statistics::distinguishable)};
  s.spec.potential.kind = PotentialKind::harmonic_coupling;
  s.spec.potential.a = 1.0;
  s.axes = {Axis{-8.0, 8.0, 2049}};
  s.levels = {513, 1025, 2049};
  s.stationary = true;
  s.stationary_scopes = {"e", "total"};
  s.params = {{"anchor_sigma", 0.5}};
  s.make = [](const Scenario& sc, const Grid& g, bool rn) {
    const double me = sc.spec.sorts[0].mass, mn = sc.spec.sorts[1].mass;
    const double mu = me * mn / (me + mn);
    const double k = sc.spec.potential.a;
    const double alpha = mu * std::sqrt(k / mu) / sc.spec.hbar;  // mu omega / hbar
    const double c0 = std::pow(alpha / std::numbers::pi, 0.25);
    const double sg = sc.p("anchor_sigma");
    const double cg = std::pow(2.0 * std::numbers::pi * sg * sg, -0.25);
    const auto& ax = g.mesh.axes[0];
    std::vector<cplx> v(g.size());
    for (std::size_t i = 0; i < ax.n; ++i)
      for (std::size_t j = 0; j < ax.n; ++j) {
        const double x = ax.x(i), y = ax.x(j), r = x - y;
        v[i * ax.n + j] = c0 * std::exp(-0.5 * alpha * r * r) * cg * std::exp(-y * y / (4.0 * sg * sg));
      }
    return detail::finish(g, sc.spec, std::move(v), rn);
  };
  return s;
}

/** @brief All bundled scenarios in a fixed order. */
inline std::vector<Scenario> bundled_scenarios() {
  return {scenario_gaussian1d(), scenario_twosort_counter(), scenario_corr2d(), scenario_ring3d(),
          scenario_twoboson_harmonic(), scenario_anchored_harmonic()};
}

inline Scenario find_scenario(const std::string& name) {
  for (auto& s : bundled_scenarios())
    if (s.name == name) return s;
  throw ConfigError("unknown scenario '" + name + "'");
}

/// (name, description) pairs whose name contains `filter`; empty filter lists everything.
inline std::vector<std::pair<std::string, std::string>> list_scenarios(const std::string& filter = "") {
  std::vector<std::pair<std::string, std::string>> out;
  for (const auto& s : bundled_scenarios())
    if (filter.empty() || s.name.find(filter) != std::string::npos) out.emplace_back(s.name, s.description);
  return out;
}

/** @brief Closed-form values of the free Gaussian packet at sigma = 1, k0 = 2, m = hbar = 1. */
inline std::vector<ExpectedValue> gaussian_reference_values(double sigma = 1.0, double k0 = 2.0, double m = 1.0,
                                                            double hbar = 1.0) {
  const double D0 = 1.0 / std::sqrt(2.0 * std::numbers::pi * sigma * sigma);
  const double P0 = hbar * hbar / (4.0 * m * sigma * sigma) * D0;
  return {
      {"w", "hbar k0 / m", hbar * k0 / m, "closed_form"},
      {"d(1.0)", "hbar x / (2 m sigma^2) at x = 1", hbar / (2.0 * m * sigma * sigma), "closed_form"},
      {"<p>", "hbar k0", hbar * k0, "closed_form"},
      {"v", "hbar k0 / m", hbar * k0 / m, "closed_form"},
      {"D(0)", "(2 pi sigma^2)^(-1/2)", D0, "closed_form"},
      {"P(0)", "hbar^2 D(0) / (4 m sigma^2)", P0, "derived"},
      {"Pi^W(0)", "P(0) + m D(0) (w^2 + d(0)^2)", P0 + m * D0 * (hbar * k0 / m) * (hbar * k0 / m), "derived"},
  };
}

}  // namespace mpqhd
