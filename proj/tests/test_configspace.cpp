#include <gtest/gtest.h>

#include "helpers.hpp"

using namespace mpqhd;

TEST(BuildGrid, SpacingAndOwnership) {
  const auto g1 = build_grid(th::system({th::sort("e")}), {Axis{-10.0, 10.0, 256}});
  ASSERT_EQ(g1.mesh.rank(), 1u);
  EXPECT_NEAR(g1.mesh.axes[0].h(), 20.0 / 255.0, 1e-15);
  EXPECT_NEAR(g1.mesh.axes[0].h(), 0.0784, 1e-4);

  const auto g2 = build_grid(th::system({th::sort("a"), th::sort("b")}), {Axis{-5, 5, 128}, Axis{-5, 5, 128}});
  EXPECT_EQ(g2.mesh.rank(), 2u);
  EXPECT_EQ(g2.particle_axes({0, 0}), std::vector<std::size_t>{0});
  EXPECT_EQ(g2.particle_axes({1, 0}), std::vector<std::size_t>{1});
  EXPECT_THROW(g2.particle_axes({2, 0}), ConfigError);
}

TEST(BuildGrid, CapRefusalNamesTheOverrideFlag) {
  const auto spec = th::system({th::sort("e", 1.0, 2, Statistics::boson)}, 2);
  try {
    build_grid(spec, {Axis{-1, 1, 512}, Axis{-1, 1, 512}});
    FAIL() << "expected CapExceeded";
  } catch (const CapExceeded& e) {
    EXPECT_EQ(e.flag, "--cap-override");
    EXPECT_NE(std::string(e.what()).find("--cap-override"), std::string::npos);
  }
  EXPECT_NO_THROW(build_grid(spec, {Axis{-1, 1, 16}, Axis{-1, 1, 16}}));
}

TEST(BuildGrid, RejectsBadAxes) {
  const auto spec = th::system({th::sort("e")});
  EXPECT_THROW(build_grid(spec, {Axis{1.0, 1.0, 16}}), ConfigError);
  EXPECT_THROW(build_grid(spec, {Axis{2.0, 1.0, 16}}), ConfigError);
  EXPECT_THROW(build_grid(spec, {Axis{-1.0, 1.0, 7}}), ConfigError);
  EXPECT_THROW(build_grid(spec, {Axis{-1, 1, 16}, Axis{-1, 1, 16}}), ConfigError);
}

TEST(SystemSpec, Validation) {
  auto s = th::system({th::sort("a"), th::sort("b")});
  EXPECT_NO_THROW(s.validate());
  s.potential.coeff = {{1.0, 2.0}, {3.0, 1.0}};
  EXPECT_THROW(s.validate(), ConfigError);
  auto m = th::system({th::sort("a", -1.0)});
  EXPECT_THROW(m.validate(), ConfigError);
  auto big = th::system({th::sort("a", 1.0, 2)}, 3);
  EXPECT_THROW(big.validate(), ConfigError);
  auto dup = th::system({th::sort("a"), th::sort("a")});
  EXPECT_THROW(dup.validate(), ConfigError);
}

// H of the oscillator ground state with the kinetic term only: -psi''/2 = (1 - x^2) psi / 2.
TEST(Hamiltonian, KineticTermFourthOrder) {
  const auto spec = th::system({th::sort("e")});
  double err[2];
  for (int r = 0; r < 2; ++r) {
    const auto g = build_grid(spec, {Axis{-10, 10, r == 0 ? 201u : 401u}});
    const auto psi = th::sample(g, spec, [](const auto& q) {
      return cplx(std::pow(std::numbers::pi, -0.25) * std::exp(-q[0] * q[0] / 2.0), 0.0);
    });
    const auto H = apply_hamiltonian(psi, spec);
    err[r] = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i) {
      const double x = g.mesh.axes[0].x(i);
      err[r] = std::max(err[r], std::abs(H.values[i] - 0.5 * (1.0 - x * x) * psi.values[i]));
    }
  }
  EXPECT_LT(err[1], 1e-6);
  EXPECT_GT(std::log2(err[0] / err[1]), 3.8);
}

TEST(Hamiltonian, RealOperatorOnRealFunction) {
  auto spec = th::system({th::sort("a"), th::sort("b", 2.0)});
  spec.potential.kind = PotentialKind::soft_coulomb;
  spec.potential.a = 1.0;
  const auto g = build_grid(spec, {Axis{-6, 6, 40}, Axis{-6, 6, 40}});
  const auto psi = th::sample(g, spec, [](const auto& q) {
    return cplx(std::exp(-q[0] * q[0] - 0.5 * q[1] * q[1] + 0.3 * q[0] * q[1]), 0.0);
  });
  const auto H = apply_hamiltonian(psi, spec);
  for (const auto& z : H.values) ASSERT_EQ(z.imag(), 0.0);
}

TEST(Hamiltonian, PairPotentialCountedOncePerPair) {
  auto spec = th::system({th::sort("a"), th::sort("b")});
  const auto g = build_grid(spec, {Axis{-6, 6, 48}, Axis{-6, 6, 48}});
  auto f = [](const std::vector<double>& q) { return th::packet(q[0], -1.0, 1.0, 0.5) * th::packet(q[1], 1.0, 0.8, -1.0); };
  const auto psi = th::sample(g, spec, f);
  const auto H0 = apply_hamiltonian(psi, spec);
  spec.potential.kind = PotentialKind::harmonic_coupling;
  spec.potential.a = 1.7;
  const auto psi_v = th::sample(g, spec, f);
  const auto H1 = apply_hamiltonian(psi_v, spec);
  for (std::size_t lin = 0; lin < g.size(); ++lin) {
    const auto idx = g.mesh.unravel(lin);
    const double r = g.mesh.axes[0].x(idx[0]) - g.mesh.axes[1].x(idx[1]);
    // 1/2 sum over ordered pairs (A,B) and (B,A) of V = once a r^2 / 2
    const cplx expect = 0.5 * 2.0 * (0.5 * 1.7 * r * r) * psi.values[lin];
    ASSERT_LT(std::abs((H1.values[lin] - H0.values[lin]) - expect), 1e-13 * (1.0 + std::abs(expect)));
  }
}

TEST(Hamiltonian, HermitianOnBoundaryNegligibleFields) {
  auto spec = th::system({th::sort("a"), th::sort("b", 3.0)});
  spec.potential.kind = PotentialKind::soft_coulomb;
  spec.potential.a = -1.0;
  const auto g = build_grid(spec, {Axis{-10, 10, 64}, Axis{-10, 10, 64}});
  const auto phi = th::sample(g, spec, [](const auto& q) { return th::packet(q[0], 1, 1, 1) * th::packet(q[1], 0, 1.2, -2); });
  const auto psi = th::sample(g, spec, [](const auto& q) { return th::packet(q[0], -1, 0.9, 0) * th::packet(q[1], 1, 1, 0.5); });
  const cplx a = inner_product(phi, apply_hamiltonian(psi, spec));
  const cplx b = inner_product(apply_hamiltonian(phi, spec), psi);
  EXPECT_LT(std::abs(a - b), 1e-10);
}

TEST(TimeDerivative, ZeroFieldAndEigenstate) {
  const auto spec = th::system({th::sort("e")});
  const auto g = build_grid(spec, {Axis{-10, 10, 64}});
  const auto zero = th::sample(g, spec, [](const auto&) { return cplx{}; });
  for (const auto& z : time_derivative(zero, spec).values) EXPECT_EQ(z, cplx{});

  // relative ground state of the anchored oscillator: E from the Rayleigh quotient
  auto sc = scenario_anchored_harmonic();
  const auto psi = sc.wavefield(sc.grid(257, default_point_cap));
  const auto H = apply_hamiltonian(psi, sc.spec);
  const double E = (inner_product(psi, H) / inner_product(psi, psi)).real();
  const double omega = std::sqrt(sc.spec.potential.a / (1.0 / (1.0 + 1e-8)));
  EXPECT_NEAR(E, 0.5 * omega, 1e-4);
  const auto dt = time_derivative(psi, sc.spec);
  double err = 0.0, peak = 0.0;
  for (std::size_t i = 0; i < psi.values.size(); ++i) {
    err = std::max(err, std::abs(dt.values[i] + cplx(0, E) * psi.values[i]));
    peak = std::max(peak, std::abs(psi.values[i]));
  }
  EXPECT_LT(err, 1e-4 * peak);
}

// Free packet at t = 0: dD/dt = -d/dx (D hbar k0 / m) = (k0 x / sigma^2) D for m = hbar = 1.
TEST(TimeDerivative, FreePacketDensityRate) {
  const auto spec = th::system({th::sort("e")});
  const auto g = build_grid(spec, {Axis{-12, 12, 1201}});
  const double k0 = 2.0, sigma = 1.0;
  const auto psi = th::sample(g, spec, [&](const auto& q) { return th::packet(q[0], 0.0, sigma, k0); });
  const auto dt = time_derivative(psi, spec);
  double err = 0.0, scale = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i) {
    const double x = g.mesh.axes[0].x(i);
    const double D = std::norm(psi.values[i]);
    const double rate = 2.0 * (std::conj(psi.values[i]) * dt.values[i]).real();
    const double expect = k0 * x / (sigma * sigma) * D;
    err = std::max(err, std::abs(rate - expect));
    scale = std::max(scale, std::abs(expect));
  }
  EXPECT_LT(err, 1e-6 * scale);
}

TEST(Marginalize, ProductStateFactorizes) {
  const auto spec = th::system({th::sort("a"), th::sort("b")});
  const auto g = build_grid(spec, {Axis{-8, 8, 97}, Axis{-8, 8, 97}});
  auto fa = [](double x) { return th::packet(x, 0.5, 0.9, 1.0); };
  auto fb = [](double y) { return th::packet(y, -1.0, 1.3, -0.5); };
  const auto psi = th::sample(g, spec, [&](const auto& q) { return fa(q[0]) * fb(q[1]); });
  const auto D = total_density(psi);
  const auto m = marginalize(g, D, {0, 0});
  const auto& ax = g.mesh.axes[1];
  double nb = 0.0;  // independent trapezoid sum of |psi_B|^2
  for (std::size_t j = 0; j < ax.n; ++j) nb += ax.weight(j) * std::norm(fb(ax.x(j)));
  for (std::size_t i = 0; i < m.size(); ++i)
    ASSERT_NEAR(m[i], std::norm(fa(g.mesh.axes[0].x(i))) * nb, 1e-14);
  EXPECT_NEAR(nb, 1.0, 1e-7);  // tail beyond the box is ~4e-8
}

TEST(Marginalize, IdentityConstantAndPositivity) {
  const auto spec1 = th::system({th::sort("e")});
  const auto g1 = build_grid(spec1, {Axis{-5, 5, 33}});
  std::vector<double> f(g1.size());
  for (std::size_t i = 0; i < f.size(); ++i) f[i] = std::sin(0.3 * i);
  EXPECT_EQ(marginalize(g1, f, {0, 0}), f);

  const auto spec = th::system({th::sort("a"), th::sort("b")});
  const auto g = build_grid(spec, {Axis{-3, 3, 25}, Axis{-3, 3, 25}});
  const std::vector<double> one(g.size(), 1.0);
  for (double v : marginalize(g, one, {1, 0})) ASSERT_NEAR(v, 6.0, 1e-13);

  std::vector<double> pos(g.size());
  for (std::size_t i = 0; i < pos.size(); ++i) pos[i] = std::abs(std::cos(0.7 * i));
  for (double v : marginalize(g, pos, {0, 0})) ASSERT_GE(v, 0.0);
}

TEST(Marginalize, NormalizedDensityIntegratesToOne) {
  for (const auto& sc : {scenario_twosort_counter(), scenario_twoboson_harmonic()}) {
    const auto psi = sc.wavefield(sc.grid(129, default_point_cap));
    const auto D = total_density(psi);
    for (std::size_t A = 0; A < sc.spec.sorts.size(); ++A) {
      const auto m = marginalize(psi.grid, D, {A, 0});
      EXPECT_NEAR(psi.grid.physical().integrate(m), 1.0, 1e-10) << sc.name;
    }
  }
}

TEST(Symmetrize, StatisticsAndNormalization) {
  const auto specB = th::system({th::sort("b", 1.0, 2, Statistics::boson)});
  const auto g = build_grid(specB, {Axis{-8, 8, 65}, Axis{-8, 8, 65}});
  const auto& ax = g.mesh.axes[0];
  std::vector<cplx> phi(ax.n), chi(ax.n);
  for (std::size_t i = 0; i < ax.n; ++i) {
    phi[i] = th::packet(ax.x(i), -1.0, 1.0, 0.5);
    chi[i] = th::packet(ax.x(i), 1.5, 0.7, -1.0);
  }
  const auto b = symmetrize({{phi, chi}}, specB, g);
  EXPECT_NEAR(b.norm2(), 1.0, 1e-12);
  const auto specF = th::system({th::sort("f", 1.0, 2, Statistics::fermion)});
  const auto f = symmetrize({{phi, chi}}, specF, g);
  for (std::size_t i = 0; i < ax.n; ++i)
    for (std::size_t j = 0; j < ax.n; ++j) {
      ASSERT_EQ(b.values[i * ax.n + j], b.values[j * ax.n + i]);
      ASSERT_EQ(f.values[i * ax.n + j], -f.values[j * ax.n + i]);
    }
  EXPECT_THROW(symmetrize({{phi, phi}}, specF, g), ZeroNorm);
  EXPECT_THROW(symmetrize({{phi}}, specB, g), ConfigError);

  // marginal identical for both particle slots of a sort
  const auto D = total_density(b);
  const auto m0 = marginalize(g, D, {0, 0});
  const auto m1 = marginalize(g, D, {0, 1});
  EXPECT_LT(th::max_abs_diff(m0, m1), 1e-12);

  // N(A) = 1 returns the normalized factor
  const auto spec1 = th::system({th::sort("e")});
  const auto g1 = build_grid(spec1, {ax});
  const auto one = symmetrize({{phi}}, spec1, g1);
  const double n = std::sqrt(WaveField(g1, spec1, phi).norm2());
  for (std::size_t i = 0; i < ax.n; ++i) ASSERT_LT(std::abs(one.values[i] - phi[i] / n), 1e-15);
}

TEST(WaveField, BoundaryRatioGate) {
  const auto spec = th::system({th::sort("e")});
  const auto g = build_grid(spec, {Axis{-3, 3, 64}});
  const auto wide = th::sample(g, spec, [](const auto& q) { return th::packet(q[0], 0.0, 2.0, 0.0); });
  EXPECT_THROW(require_boundary_negligible(wide), ConfigError);
  const auto g2 = build_grid(spec, {Axis{-12, 12, 64}});
  const auto narrow = th::sample(g2, spec, [](const auto& q) { return th::packet(q[0], 0.0, 1.0, 0.0); });
  EXPECT_NO_THROW(require_boundary_negligible(narrow));
}

TEST(Madelung, DensityIsAmplitudeSquared) {
  const auto spec = th::system({th::sort("e")});
  const auto g = build_grid(spec, {Axis{-6, 6, 40}});
  const auto psi = th::sample(g, spec, [](const auto& q) { return th::packet(q[0], 0.3, 1.0, 1.5); });
  const auto m = madelung(psi);
  for (std::size_t i = 0; i < g.size(); ++i) {
    EXPECT_EQ(m.density[i], m.amplitude[i] * m.amplitude[i]);
    EXPECT_GE(m.density[i], 0.0);
  }
  EXPECT_FALSE(m.phase.has_value());
}
