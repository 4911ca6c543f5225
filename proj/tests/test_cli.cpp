#include <gtest/gtest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

#include "germlab/experiments.hpp"
#include "germlab/linalg.hpp"

using namespace germlab;

namespace {

int run(const std::string& args) {
  std::string cmd = std::string(GERMLAB_BIN) + " " + args + " >/dev/null 2>&1";
  int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream f(p);
  std::stringstream s;
  s << f.rdbuf();
  return s.str();
}

std::filesystem::path scratch(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / ("germlab_cli_" + name);
  std::filesystem::remove_all(dir);
  return dir;
}

Rational Q(long a, long b = 1) {
  Rational r(a, b);
  r.canonicalize();
  return r;
}

}  // namespace

TEST(Cli, ThetaBaseline) {
  auto dir = scratch("theta");
  ASSERT_EQ(run("theta --p 5 --depth 3 --out " + dir.string()), 0);
  std::string csv = slurp(dir / "theta.csv");
  EXPECT_EQ(csv.substr(0, csv.find('\n')), "test_function,O_0,O_1,O_u,O_pi,O_u*pi");
  EXPECT_NE(csv.find("0,1/1,1/50,1/50,1/10,1/10"), std::string::npos);
  auto j = nlohmann::json::parse(slurp(dir / "theta.json"));
  EXPECT_EQ(j["det"], "1/390625");
  EXPECT_TRUE(j["upper_triangular"].get<bool>());
}

TEST(Cli, AkCompareAgrees) { EXPECT_EQ(run("ak-compare --p 7"), 0); }

TEST(Cli, ParahoricsA1) {
  auto dir = scratch("parahorics");
  ASSERT_EQ(run("parahorics --type A1 --out " + dir.string()), 0);
  EXPECT_EQ(nlohmann::json::parse(slurp(dir / "parahorics.json"))["count"], 3);
}

TEST(Cli, ExitCodes) {
  EXPECT_EQ(run("theta --p 4"), 2);
  EXPECT_EQ(run("theta --field zz"), 2);
  EXPECT_EQ(run("germs --p 5"), 2);  // seed missing
  EXPECT_EQ(run("nonsense"), 2);
  EXPECT_EQ(run("kappa-match --p 5 --seed 1"), 0);
  EXPECT_EQ(run("kappa-match --p 5 --seed 1 --negative-control"), 1);
  EXPECT_EQ(run("presburger --expr \"(t-3)*(t-5)\" --q 3"), 0);
  EXPECT_EQ(run("presburger --expr \"t-\""), 2);
}

TEST(Cli, ConfigFileAndReproducibility) {
  auto dir = scratch("config");
  std::filesystem::create_directories(dir);
  auto cfg = dir / "run.json";
  std::ofstream(cfg) << R"({"p": 7, "depth": 3, "seed": 11, "samples": 2, "a0": 2, "a_span": 1})";
  ASSERT_EQ(run("germs --config " + cfg.string() + " --out " + (dir / "a").string()), 0);
  ASSERT_EQ(setenv("GERMLAB_WORKERS", "3", 1), 0);
  ASSERT_EQ(run("germs --config " + cfg.string() + " --out " + (dir / "b").string()), 0);
  unsetenv("GERMLAB_WORKERS");
  std::string a = slurp(dir / "a" / "germs.csv");
  EXPECT_FALSE(a.empty());
  EXPECT_EQ(a, slurp(dir / "b" / "germs.csv"));
  std::ofstream(cfg) << R"({"p": "seven"})";
  EXPECT_EQ(run("theta --config " + cfg.string()), 2);
}

TEST(Experiments, AkFamilyValues) {
  for (int p : {5, 7}) {
    AkReport r = ak_regression_family(p, 3);
    ASSERT_EQ(r.entries.size(), 10u);
    EXPECT_TRUE(r.agree);
    EXPECT_EQ(r.entries[0].mixed[0], Q(1, p));
    EXPECT_EQ(r.entries[1].mixed[0], Q(1, p));
    // Shells 1 and 2 of |x|^-1: (p-1)/p^2 * p + (p-1)/p^3 * p^2.
    EXPECT_EQ(r.entries[2].mixed[0], Q(2 * (p - 1), p));
    EXPECT_EQ(r.entries[3].mixed[0], Q(p + 1, p * p));
    EXPECT_EQ(r.entries[4].mixed.size(), 25u);
    EXPECT_EQ(r.entries[4].mixed[1], Q(1, 2 * p * p));
    // Elliptic X with -D = u pi^2 in the + class: (-p^-2, 1, 1, 0, 0).
    RationalVector g;
    for (int i = 5; i < 10; ++i) g.push_back(r.entries[i].mixed[0]);
    EXPECT_EQ(g, (RationalVector{Q(-1, p * p), 1, 1, 0, 0}));
  }
}
