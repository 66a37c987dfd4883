#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "helpers.hpp"

using namespace mpqhd;
namespace fs = std::filesystem;

namespace {

RunConfig parse(const std::string& text) {
  std::istringstream in(text);
  return parse_config(in);
}

std::string error_of(const std::string& text) {
  try {
    parse(text);
  } catch (const ConfigError& e) {
    return e.what();
  }
  return "";
}

fs::path scratch(const std::string& name) {
  auto p = fs::temp_directory_path() / ("mpqhd_test_" + name);
  fs::remove_all(p);
  return p;
}

}  // namespace

TEST(Config, RunSection) {
  const auto c = parse(R"(
# comment
[run]
verb = check
scenario = corr2d   # trailing comment
levels = 2
eps = 1e-8
seed = 0x10
out = /tmp/x
)");
  EXPECT_EQ(c.verb, "check");
  EXPECT_EQ(c.scenario, "corr2d");
  EXPECT_EQ(c.levels, 2u);
  EXPECT_DOUBLE_EQ(c.eps, 1e-8);
  EXPECT_EQ(c.seed, 16u);
  EXPECT_EQ(c.out, fs::path("/tmp/x"));
  EXPECT_FALSE(c.custom);
  EXPECT_NO_THROW(c.validate());
}

TEST(Config, InlineSystem) {
  const auto c = parse(R"(
[run]
verb = fields
[system]
dim = 1
potential = soft_coulomb
a = 1
coeff = 1 -1; -1 1
[sort.a]
mass = 1
x0 = -1
sigma = 1
k = 2
[sort.b]
mass = 2
count = 1
x0 = 1
sigma = 1.2
[grid]
min = -10
max = 10
n = 129
levels = 65 129
)");
  ASSERT_TRUE(c.custom);
  const auto sc = c.resolve();
  EXPECT_EQ(sc.spec.sorts.size(), 2u);
  EXPECT_EQ(sc.spec.sorts[1].label, "b");
  EXPECT_EQ(sc.spec.potential.kind, PotentialKind::soft_coulomb);
  EXPECT_DOUBLE_EQ(sc.spec.potential.c(0, 1), -1.0);
  EXPECT_EQ(sc.levels, (std::vector<std::size_t>{65, 129}));
  const auto psi = sc.wavefield(sc.grid(default_point_cap));
  EXPECT_EQ(psi.values.size(), 129u * 129u);
  EXPECT_NEAR(psi.norm2(), 1.0, 1e-10);
  const auto w = mean_velocity(psi, Scope::of_sort(0));
  EXPECT_NEAR(w.comp[0][58], 2.0, 5e-3);  // product state: v_a = k/m everywhere
}

TEST(Config, DiagnosticsCarryLineNumbers) {
  auto e = error_of("[run]\nverb = check\nbogus = 1\n");
  EXPECT_NE(e.find("line 3"), std::string::npos) << e;
  EXPECT_NE(e.find("bogus"), std::string::npos) << e;

  e = error_of("[run]\nlevels = three\n");
  EXPECT_NE(e.find("line 2"), std::string::npos) << e;

  e = error_of("[nonsense]\nx = 1\n");
  EXPECT_NE(e.find("nonsense"), std::string::npos) << e;

  e = error_of("verb = check\n");
  EXPECT_NE(e.find("outside"), std::string::npos) << e;

  // several problems are reported together
  e = error_of("[run]\neps = x\nlevels = y\n");
  EXPECT_NE(e.find("line 2"), std::string::npos) << e;
  EXPECT_NE(e.find("line 3"), std::string::npos) << e;

  e = error_of("[system]\ndim = 1\n[sort.a]\nx0 = 0\nsigma = 1\n");
  EXPECT_NE(e.find("[grid]"), std::string::npos) << e;
}

TEST(Config, Validation) {
  RunConfig c;
  c.verb = "frobnicate";
  EXPECT_THROW(c.validate(), ConfigError);
  c.verb = "check";
  EXPECT_THROW(c.validate(), ConfigError);  // no scenario
  c.scenario = "gaussian1d";
  EXPECT_NO_THROW(c.validate());
  c.levels = 4;
  EXPECT_THROW(c.validate(), ConfigError);
  c.levels = 2;
  c.eps = -1;
  EXPECT_THROW(c.validate(), ConfigError);
  c.eps = 1e-10;
  c.verb = "cyl";
  EXPECT_THROW(c.validate(), ConfigError);
  c.scenario = "ring3d";
  EXPECT_NO_THROW(c.validate());
  c.scenario = "nope";
  EXPECT_THROW(c.validate(), ConfigError);
}

TEST(Run, InvalidConfigWritesNothing) {
  const auto out = scratch("invalid");
  RunConfig c;
  c.verb = "check";
  c.scenario = "gaussian1d";
  c.levels = 9;
  c.out = out;
  std::ostringstream log, err;
  EXPECT_EQ(run(c, log, err), exit_code::invalid);
  EXPECT_FALSE(fs::exists(out));
  EXPECT_FALSE(err.str().empty());
}

TEST(Run, CapExceededWritesNothing) {
  const auto out = scratch("cap");
  RunConfig c;
  c.verb = "fields";
  c.scenario = "corr2d";
  c.cap = 1000;
  c.out = out;
  std::ostringstream log, err;
  EXPECT_EQ(run(c, log, err), exit_code::cap_exceeded);
  EXPECT_FALSE(fs::exists(out));
}

TEST(Run, FieldsBundle) {
  const auto out = scratch("fields");
  RunConfig c;
  c.verb = "fields";
  c.scenario = "gaussian1d";
  c.points = 257;
  c.out = out;
  std::ostringstream log, err;
  ASSERT_EQ(run(c, log, err), exit_code::pass) << err.str();
  for (const char* f : {"summary.json", "fields.json", "rho_e.csv", "w_e.csv", "wavefield.bin", "wavefield.hdr"})
    EXPECT_TRUE(fs::exists(out / f)) << f;
  std::ifstream csv(out / "rho_e.csv");
  std::string header;
  std::getline(csv, header);
  EXPECT_EQ(header.rfind("q1,", 0), 0u) << header;
  std::size_t rows = 0;
  for (std::string line; std::getline(csv, line);) ++rows;
  EXPECT_EQ(rows, 257u);
  const auto j = io::json::parse(std::ifstream(out / "summary.json"));
  EXPECT_EQ(j.at("verb"), "fields");
  EXPECT_EQ(j.at("scenario"), "gaussian1d");
  fs::remove_all(out);
}

TEST(Io, WavefieldRoundTrip) {
  const auto sc = scenario_twosort_counter();
  const auto psi = sc.wavefield(sc.grid(65, default_point_cap));
  const auto dir = scratch("wf");
  fs::create_directories(dir);
  io::save_wavefield(psi, dir / "psi");
  const auto back = io::load_wavefield(dir / "psi", sc.spec);
  EXPECT_EQ(back.values, psi.values);
  EXPECT_TRUE(back.grid.mesh.axes == psi.grid.mesh.axes);

  auto other = sc.spec;
  other.sorts[1].mass = 3.0;
  EXPECT_THROW(io::load_wavefield(dir / "psi", other), SpecMismatch);

  // truncated payload
  fs::resize_file(dir / "psi.bin", fs::file_size(dir / "psi.bin") - 16);
  EXPECT_THROW(io::load_wavefield(dir / "psi", sc.spec), SpecMismatch);
  fs::remove_all(dir);
}

TEST(Io, NumbersRoundTrip) {
  for (double v : {0.1, -1.0 / 3.0, 6.02214076e23, 2.2250738585072014e-308}) EXPECT_EQ(std::stod(io::num(v)), v);
  EXPECT_EQ(io::hex64(0x5eed), "0000000000005eed");
}

TEST(Scenarios, Catalogue) {
  EXPECT_EQ(bundled_scenarios().size(), 6u);
  EXPECT_EQ(list_scenarios("ring").size(), 1u);
  EXPECT_TRUE(list_scenarios("zzz").empty());
  EXPECT_THROW(find_scenario("zzz"), ConfigError);
  for (const auto& sc : bundled_scenarios()) {
    EXPECT_FALSE(sc.levels.empty()) << sc.name;
    EXPECT_TRUE(std::is_sorted(sc.levels.begin(), sc.levels.end())) << sc.name;
  }
}

TEST(Scenarios, GaussianReferenceValues) {
  const auto v = gaussian_reference_values();
  auto get = [&](const std::string& q) {
    for (const auto& e : v)
      if (e.quantity == q) return e.value;
    ADD_FAILURE() << q;
    return 0.0;
  };
  EXPECT_DOUBLE_EQ(get("w"), 2.0);
  EXPECT_DOUBLE_EQ(get("d(1.0)"), 0.5);
  EXPECT_NEAR(get("D(0)"), 0.3989422804, 1e-10);
  EXPECT_NEAR(get("P(0)"), 0.0997355701, 1e-10);
  EXPECT_NEAR(get("Pi^W(0)"), 1.6955047, 1e-7);

  // numerically on the bundled grid
  const auto sc = scenario_gaussian1d();
  const auto psi = sc.wavefield();
  const auto& ax = psi.grid.mesh.axes[0];
  EXPECT_NEAR(ax.h(), 24.0 / 2047.0, 1e-15);
  const auto P = scalar_quantum_pressure(psi, std::size_t{0});
  // 0 is not a node of the 2048-point grid; interpolate between the two centre nodes
  const double mid = 0.5 * (P.values[1023] + P.values[1024]);
  EXPECT_NEAR(mid, get("P(0)"), 1e-4);
}
