// End-to-end tests of the command-line driver.

#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <sys/wait.h>

namespace fs = std::filesystem;

namespace {

int cli(const std::string& args) {
  const std::string cmd = std::string("\"") + MPQHD_CLI_PATH + "\" " + args + " > /dev/null 2>&1";
  const int st = std::system(cmd.c_str());
  return WIFEXITED(st) ? WEXITSTATUS(st) : -1;
}

fs::path scratch(const std::string& name) {
  auto p = fs::temp_directory_path() / ("mpqhd_cli_" + name);
  fs::remove_all(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

}  // namespace

TEST(Cli, ListAndHelp) {
  EXPECT_EQ(cli("list"), 0);
  EXPECT_EQ(cli("list ring"), 0);
  EXPECT_EQ(cli("--help"), 0);
  EXPECT_EQ(cli(""), 2);
  EXPECT_EQ(cli("explode"), 2);
}

TEST(Cli, CheckIsDeterministic) {
  const auto a = scratch("det_a"), b = scratch("det_b");
  ASSERT_EQ(cli("check gaussian1d --levels 2 --out " + a.string()), 0);
  ASSERT_EQ(cli("check --scenario gaussian1d --levels 2 --out " + b.string()), 0);
  EXPECT_TRUE(fs::exists(a / "residuals.json"));
  const auto sa = slurp(a / "summary.json");
  EXPECT_FALSE(sa.empty());
  EXPECT_EQ(sa, slurp(b / "summary.json"));
  EXPECT_EQ(slurp(a / "residuals.json"), slurp(b / "residuals.json"));
  fs::remove_all(a);
  fs::remove_all(b);
}

TEST(Cli, InvalidInputsExitTwoWithoutOutput) {
  const auto out = scratch("invalid");
  const auto cfg = fs::temp_directory_path() / "mpqhd_cli_bad.cfg";
  std::ofstream(cfg) << "[run]\nverb = check\nlevels = lots\n";
  EXPECT_EQ(cli("check gaussian1d --config " + cfg.string() + " --out " + out.string()), 2);
  EXPECT_EQ(cli("check nosuch --out " + out.string()), 2);
  EXPECT_EQ(cli("check gaussian1d --eps -1 --out " + out.string()), 2);
  EXPECT_EQ(cli("check gaussian1d --levels 5 --out " + out.string()), 2);
  EXPECT_EQ(cli("cyl gaussian1d --out " + out.string()), 2);
  EXPECT_EQ(cli("check gaussian1d --levels two --out " + out.string()), 2);
  EXPECT_FALSE(fs::exists(out));
  fs::remove(cfg);
}

TEST(Cli, CapOverride) {
  const auto out = scratch("cap");
  EXPECT_EQ(cli("fields corr2d --cap-override 1000 --out " + out.string()), 3);
  EXPECT_FALSE(fs::exists(out));
}

TEST(Cli, ConfigFileDrivesRun) {
  const auto out = scratch("cfg");
  const auto cfg = fs::temp_directory_path() / "mpqhd_cli_good.cfg";
  std::ofstream(cfg) << "[run]\nverb = tensors\nout = " << out.string()
                     << "\n[system]\ndim = 1\n[sort.e]\nx0 = 0\nsigma = 1\nk = 2\n[grid]\nmin = -10\nmax = 10\nn = 201\n";
  EXPECT_EQ(cli("tensors --config " + cfg.string()), 0);
  EXPECT_TRUE(fs::exists(out / "tensors.json"));
  EXPECT_TRUE(fs::exists(out / "Pi_K_e.csv"));
  fs::remove_all(out);
  fs::remove(cfg);
}

TEST(Cli, CylindricalOnRing) {
  const auto out = scratch("cyl");
  EXPECT_EQ(cli("cyl ring3d --levels 2 --out " + out.string()), 0);
  EXPECT_TRUE(fs::exists(out / "cyl.json"));
  EXPECT_TRUE(fs::exists(out / "cyl_parts.csv"));
  fs::remove_all(out);
}
