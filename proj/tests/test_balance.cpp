#include <gtest/gtest.h>

#include "helpers.hpp"

using namespace mpqhd;

namespace {

WaveField level(const Scenario& sc, std::size_t n) { return sc.wavefield(sc.grid(n, default_point_cap)); }

}  // namespace

TEST(Balance, NoForceWithoutPotentialOrPartner) {
  const auto sc = scenario_gaussian1d();
  const auto psi = level(sc, 257);
  EXPECT_EQ(max_abs(force_density(psi, sc.spec, Scope::all()).comp), 0.0);

  // a potential with a single particle has no partner to act
  auto sc2 = sc;
  sc2.spec.potential.kind = PotentialKind::soft_coulomb;
  sc2.spec.potential.a = 1.0;
  EXPECT_EQ(max_abs(force_density(level(sc2, 257), sc2.spec, Scope::all()).comp), 0.0);
}

TEST(Balance, InternalForcesCancel) {
  for (const auto& sc : {scenario_twosort_counter(), scenario_twoboson_harmonic()}) {
    const auto psi = level(sc, 257);
    const auto f = force_density(psi, sc.spec, Scope::all());
    const auto mesh = psi.grid.physical();
    double scale = 0.0;
    for (double v : f.comp[0]) scale += std::abs(v) * mesh.cell_volume();
    ASSERT_GT(scale, 1e-3) << sc.name;
    EXPECT_LT(std::abs(mesh.integrate(f.comp[0])), 1e-12 * scale) << sc.name;
  }
}

TEST(Balance, SoftCoulombForceOnOneSort) {
  // f^a = -marg(D dV/dx_a); check at a node against direct quadrature
  const auto sc = scenario_twosort_counter();
  const auto psi = level(sc, 129);
  const auto f = force_density(psi, sc.spec, Scope::of_sort(0));
  const auto& ax = psi.grid.mesh.axes[0];
  const std::size_t i = 50;
  double ref = 0.0;
  for (std::size_t j = 0; j < ax.n; ++j) {
    const double dx = ax.x(i) - ax.x(j);
    const double dV = -sc.spec.potential.c(0, 1) * dx / std::pow(dx * dx + 1.0, 1.5);
    ref -= std::norm(psi.values[i * ax.n + j]) * dV * ax.weight(j);
  }
  EXPECT_NEAR(f.comp[0][i], ref, 1e-14);
}

TEST(Balance, TensorDivergence) {
  const Mesh m{{Axis{-2, 2, 41}, Axis{-1, 3, 33}}};
  auto T = zero_tensor(m, 2);
  auto P = m.size();
  std::vector<double> p(P);
  for (std::size_t i = 0; i < 41; ++i)
    for (std::size_t j = 0; j < 33; ++j) {
      const double x = m.axes[0].x(i), y = m.axes[1].x(j);
      p[i * 33 + j] = x * x * y + y * y * y;
      T.at(0, 0)[i * 33 + j] = T.at(1, 1)[i * 33 + j] = p[i * 33 + j];
    }
  const auto div = tensor_divergence_cartesian(T);
  for (std::size_t i = 0; i < 41; ++i)
    for (std::size_t j = 0; j < 33; ++j) {
      const double x = m.axes[0].x(i), y = m.axes[1].x(j);
      ASSERT_NEAR(div.comp[0][i * 33 + j], 2 * x * y, 1e-11);
      ASSERT_NEAR(div.comp[1][i * 33 + j], x * x + 3 * y * y, 1e-11);
    }
  auto C = zero_tensor(m, 2);
  for (auto& c : C.comp) std::fill(c.begin(), c.end(), 1.7);
  EXPECT_LT(max_abs(tensor_divergence_cartesian(C).comp), 1e-12);
}

TEST(Balance, ContinuityRateMatchesHamiltonian) {
  const auto sc = scenario_twosort_counter();
  const auto psi = level(sc, 129);
  const auto t = balance_terms(psi, sc.spec, Scope::of_sort(1), Version::K);
  const auto H = apply_hamiltonian(psi, sc.spec);
  std::vector<double> im(psi.values.size());
  for (std::size_t k = 0; k < im.size(); ++k) im[k] = (std::conj(psi.values[k]) * H.values[k]).imag();
  auto ref = marginalize(psi.grid, im, ParticleRef{1, 0});
  const double Nm = 2.0 * sc.spec.sorts[1].mass / sc.spec.hbar;
  for (auto& v : ref) v *= Nm;
  EXPECT_LT(th::max_abs_diff(t.drho_dt, ref), 1e-12 * th::max_abs(ref));
}

TEST(Balance, ContinuityConvergesAtFourthOrder) {
  const auto sc = scenario_gaussian1d();
  std::vector<ResidualField> f;
  for (std::size_t n : {257, 513, 1025}) f.push_back(mpce_field(balance_terms(level(sc, n), sc.spec, Scope::all(), Version::K), sc.spec));
  const auto rep = make_report(f, 1e-5, 3.5);
  EXPECT_TRUE(rep.pass) << rep.finest().Linf / rep.finest().scale;
  for (double o : rep.orders) EXPECT_GT(o, 3.5);
}

TEST(Balance, BalanceLawsHoldForBothVersions) {
  for (const auto& sc : {scenario_twosort_counter(), scenario_corr2d()}) {
    const auto psi = level(sc, sc.levels.back());
    for (Version v : {Version::K, Version::W}) {
      const auto t = balance_terms(psi, sc.spec, Scope::of_sort(0), v);
      for (const auto& r : {mpce_field(t, sc.spec), mpeem_field(t, sc.spec), mpqce_field(t, sc.spec)})
        EXPECT_LT(r.linf(), sc.tol.residual_rel * r.scale) << sc.name << " " << r.law << " " << to_string(v);
    }
  }
}

// r_MPQCE = r_MPEEM - v r_MPCE - (product-rule defect), up to roundoff
TEST(Balance, ConvectiveFormIdentity) {
  const auto sc = scenario_twosort_counter();
  const auto psi = level(sc, 257);
  for (Scope s : {Scope::of_sort(0), Scope::all()}) {
    const auto t = balance_terms(psi, sc.spec, s, Version::W);
    const auto q = mpqce_field(t, sc.spec), e = mpeem_field(t, sc.spec), c = mpce_field(t, sc.spec);
    const auto defect = product_rule_defect(t);
    double err = 0.0;
    for (std::size_t i = 0; i < t.rho.size(); ++i)
      if (t.mask_q[i]) err = std::max(err, std::abs(q.comp[0][i] - (e.comp[0][i] - t.v[0][i] * c.comp[0][i] - defect[0][i])));
    EXPECT_LT(err, 1e-9 * q.scale);
  }
}

TEST(Balance, StationaryStateHasNoRates) {
  const auto sc = scenario_anchored_harmonic();
  const auto psi = level(sc, 513);
  const auto t = balance_terms(psi, sc.spec, Scope::of_sort(0), Version::K);
  const auto r = mpqce_field(t, sc.spec);
  EXPECT_LT(r.linf(), 1e-4 * r.scale);
  EXPECT_LT(max_abs(t.j), 1e-30);
}

TEST(Balance, GaugeDifferenceIsDivergenceFree) {
  const auto sc = scenario_corr2d();
  std::vector<GaugeLevel> lv;
  for (std::size_t n : {129, 257}) lv.push_back(gauge_level(level(sc, n), sc.spec, Scope::of_sort(0)));
  const auto rep = gauge_divergence_check(lv);
  EXPECT_TRUE(rep.pass) << rep.extra.at("elem_diff_rel_min") << " " << rep.extra.at("div_shrink_factor_min");
  EXPECT_GT(rep.extra.at("elem_diff_rel_min"), 1e-4);
}

TEST(Balance, ReportOrders) {
  std::vector<ResidualReport::Level> lv{{0.1, 1e-4, 2e-4, 1}, {0.05, 6.25e-6, 1.25e-5, 1}};
  EXPECT_NEAR(measured_orders(lv)[0], 4.0, 1e-12);
  EXPECT_NEAR(measured_orders(lv, true)[0], 4.0, 1e-12);
}
