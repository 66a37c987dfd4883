#include <gtest/gtest.h>

#include "helpers.hpp"

using namespace mpqhd;

namespace {

/// sigma = 1, k0 = 2 packet on [-12, 12] with a node at x = 0 and x = 1.
WaveField gaussian(std::size_t n = 2401, double k0 = 2.0) {
  const auto spec = th::system({th::sort("e")});
  const auto g = build_grid(spec, {Axis{-12, 12, n}});
  return th::sample(g, spec, [&](const auto& q) { return th::packet(q[0], 0.0, 1.0, k0); });
}

std::size_t node(const Axis& a, double x) { return static_cast<std::size_t>(std::lround((x - a.min) / a.h())); }

}  // namespace

TEST(Hydro, GaussianDensityAtOrigin) {
  const auto psi = gaussian();
  const auto rho = mass_density(psi, Scope::of_sort(0));
  const auto& ax = rho.mesh.axes[0];
  EXPECT_NEAR(rho.values[node(ax, 0.0)], 1.0 / std::sqrt(2.0 * std::numbers::pi), 1e-14);
}

TEST(Hydro, TotalsAreSumsOfSorts) {
  const auto sc = scenario_twosort_counter();
  const auto psi = sc.wavefield(sc.grid(129, default_point_cap));
  const auto rt = mass_density(psi, Scope::all());
  const auto ra = mass_density(psi, Scope::of_sort(0));
  const auto rb = mass_density(psi, Scope::of_sort(1));
  const auto jt = mass_current(psi, Scope::all());
  const auto ja = mass_current(psi, Scope::of_sort(0));
  const auto jb = mass_current(psi, Scope::of_sort(1));
  for (std::size_t i = 0; i < rt.values.size(); ++i) {
    EXPECT_EQ(rt.values[i], ra.values[i] + rb.values[i]);
    EXPECT_EQ(jt.comp[0][i], ja.comp[0][i] + jb.comp[0][i]);
  }
}

// Symmetrized bosons with orthonormal phi, chi: rho = |phi|^2 + |chi|^2, integral 2.
TEST(Hydro, TwoBosonDensityExpansion) {
  const auto spec = th::system({th::sort("b", 1.0, 2, Statistics::boson)});
  const auto g = build_grid(spec, {Axis{-9, 9, 181}, Axis{-9, 9, 181}});
  const auto& ax = g.mesh.axes[0];
  const double c = std::pow(std::numbers::pi, -0.25);
  std::vector<cplx> phi(ax.n), chi(ax.n);
  for (std::size_t i = 0; i < ax.n; ++i) {
    const double x = ax.x(i);
    phi[i] = c * std::exp(-x * x / 2.0);
    chi[i] = c * std::sqrt(2.0) * x * std::exp(-x * x / 2.0);
  }
  const auto psi = symmetrize({{phi, chi}}, spec, g);
  const auto rho = mass_density(psi, Scope::of_sort(0));
  EXPECT_NEAR(rho.mesh.integrate(rho.values), 2.0, 1e-10);
  for (std::size_t i = 0; i < ax.n; ++i)
    ASSERT_NEAR(rho.values[i], std::norm(phi[i]) + std::norm(chi[i]), 1e-10);
}

TEST(Hydro, GaussianCurrentVelocityAndW) {
  const auto psi = gaussian();
  const auto s = Scope::of_sort(0);
  const auto rho = mass_density(psi, s);
  const auto j = mass_current(psi, s);
  const auto v = mean_velocity(rho, j);
  const auto w = particle_velocity(psi, {0, 0});
  std::size_t defined = 0;
  for (std::size_t i = 0; i < rho.values.size(); ++i) {
    ASSERT_NEAR(j.comp[0][i], 2.0 * rho.values[i], 1e-7);
    // truncation error grows like x^5 relative to the Gaussian; check the bulk
    if (!v.defined[i] || std::abs(rho.mesh.axes[0].x(i)) > 4.0) continue;
    ++defined;
    ASSERT_NEAR(v.comp[0][i], 2.0, 1e-6);
    ASSERT_NEAR(w.comp[0][i], 2.0, 1e-6);
  }
  EXPECT_GT(defined, 500u);
}

TEST(Hydro, MeanVelocityMask) {
  const auto psi = gaussian(401);
  const auto rho = mass_density(psi, Scope::of_sort(0));
  const auto j = mass_current(psi, Scope::of_sort(0));
  const auto v = mean_velocity(rho, j, 1e-10);
  double mx = 0.0;
  for (double r : rho.values) mx = std::max(mx, r);
  for (std::size_t i = 0; i < rho.values.size(); ++i) {
    EXPECT_EQ(bool(v.defined[i]), rho.values[i] > 1e-10 * mx);
    if (!v.defined[i]) { EXPECT_EQ(v.comp[0][i], 0.0); }
  }
}

// Psi = a(Q) exp(i k x_a): w of the phased coordinate is hbar k / m_A, the other one 0.
TEST(Hydro, PlanePhaseInOneCoordinate) {
  auto spec = th::system({th::sort("a", 2.0), th::sort("b", 0.5)});
  const double k = 1.5;
  double err[2];
  for (int r = 0; r < 2; ++r) {
    const auto g = build_grid(spec, {Axis{-8, 8, r ? 321u : 161u}, Axis{-8, 8, r ? 321u : 161u}});
    const auto psi = th::sample(g, spec, [&](const auto& q) {
      return std::exp(cplx(-0.5 * q[0] * q[0] - 0.4 * q[1] * q[1] + 0.2 * q[0] * q[1], k * q[0]));
    });
    const auto wa = particle_velocity(psi, {0, 0});
    const auto wb = particle_velocity(psi, {1, 0});
    err[r] = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i) {
      if (!wa.defined[i]) continue;
      ASSERT_NEAR(wb.comp[0][i], 0.0, 1e-12);
      const auto idx = g.mesh.unravel(i);
      if (std::hypot(g.mesh.axes[0].x(idx[0]), g.mesh.axes[1].x(idx[1])) > 3.0) continue;
      err[r] = std::max(err[r], std::abs(wa.comp[0][i] - k / 2.0));
    }
  }
  EXPECT_LT(err[1], 2e-5);
  EXPECT_GT(std::log2(err[0] / err[1]), 3.7);
}

TEST(Hydro, SingleParticleRelativeVelocityVanishes) {
  const auto psi = gaussian(801);
  const auto u = relative_velocity(psi, {0, 0}, Scope::of_sort(0));
  for (std::size_t i = 0; i < u.comp[0].size(); ++i)
    if (u.defined[i]) { ASSERT_LT(std::abs(u.comp[0][i]), 1e-10); }
}

// marg(D u_A) = rho v - rho v = 0 for the per-sort reference.
TEST(Hydro, WeightedRelativeVelocityAverageVanishes) {
  const auto sc = scenario_twosort_counter();
  const auto psi = sc.wavefield(sc.grid(257, default_point_cap));
  const auto D = total_density(psi);
  for (std::size_t A = 0; A < 2; ++A) {
    const auto u = relative_velocity(psi, {A, 0}, Scope::of_sort(A));
    std::vector<double> Du(D.size());
    for (std::size_t k = 0; k < D.size(); ++k) Du[k] = D[k] * u.comp[0][k];
    const auto m = marginalize(psi.grid, Du, {A, 0});
    EXPECT_LT(th::max_abs(m), 1e-8);
  }
}

TEST(Hydro, GaussianOsmoticVelocity) {
  const auto psi = gaussian();
  const auto d = osmotic_velocity(psi, {0, 0});
  const auto& ax = psi.grid.mesh.axes[0];
  EXPECT_NEAR(d.comp[0][node(ax, 1.0)], 0.5, 1e-7);
  for (std::size_t i = 0; i < ax.n; ++i)
    if (d.defined[i] && std::abs(ax.x(i)) < 4.0) { ASSERT_NEAR(d.comp[0][i], ax.x(i) / 2.0, 1e-6 * (1.0 + std::abs(ax.x(i)))); }
}

// D ~ exp(-x^4): d = (hbar/2m) 4 x^3, converging at fourth order.
TEST(Hydro, QuarticOsmoticVelocity) {
  const auto spec = th::system({th::sort("e")});
  double err[2];
  for (int r = 0; r < 2; ++r) {
    const auto g = build_grid(spec, {Axis{-3, 3, r == 0 ? 241u : 481u}});
    const auto psi = th::sample(g, spec, [](const auto& q) { return cplx(std::exp(-0.5 * std::pow(q[0], 4)), 0); });
    const auto d = osmotic_velocity(psi, {0, 0});
    err[r] = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i) {
      const double x = g.mesh.axes[0].x(i);
      if (std::abs(x) > 1.5) continue;
      err[r] = std::max(err[r], std::abs(d.comp[0][i] - 2.0 * x * x * x));
    }
  }
  EXPECT_LT(err[1], 1e-5);
  EXPECT_GT(std::log2(err[0] / err[1]), 3.7);
}

TEST(Hydro, MomentumExpectation) {
  const auto psi = gaussian(2048);
  EXPECT_NEAR(momentum_expectation(psi, {0, 0})[0], 2.0, 1e-8);
}

// S = x y: w = (y, x) is curl free.
TEST(Hydro, CurlOfGradientPhaseVanishes) {
  const auto spec = th::system({th::sort("e")}, 2);
  const auto g = build_grid(spec, {Axis{-7, 7, 141}, Axis{-7, 7, 141}});
  const auto psi = th::sample(g, spec, [](const auto& q) {
    return std::exp(cplx(-0.25 * (q[0] * q[0] + q[1] * q[1]), 0.3 * q[0] * q[1]));
  });
  Mask m;
  const auto c = config_curl(particle_velocity(psi, {0, 0}), &m);
  double bulk = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i) {
    const auto idx = g.mesh.unravel(i);
    if (m[i] && std::hypot(g.mesh.axes[0].x(idx[0]), g.mesh.axes[1].x(idx[1])) < 3.0)
      bulk = std::max(bulk, std::abs(c[0][i]));
  }
  EXPECT_LT(bulk, 1e-4);
  EXPECT_LT(max_abs(c, &m), 1e-2);
}
