#include <gtest/gtest.h>

#include <cstdlib>
#include <fstream>
#include <sys/wait.h>

#include "json.hpp"

namespace {

int run(const std::string& args) {
  const std::string cmd = std::string(DWELLCERT_CLI) + " " + args + " > /dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string data(const std::string& name) { return std::string(DWELLCERT_DATA) + "/" + name; }

std::string tmp(const std::string& name) { return ::testing::TempDir() + name; }

nlohmann::json read_json(const std::string& path) {
  std::ifstream f(path);
  return nlohmann::json::parse(f);
}

}  // namespace

TEST(Cli, AnalyzeExitCodes) {
  EXPECT_EQ(run("analyze --system " + data("ex1.json") + " --method periodic-looped --T 0.44"), 0);
  EXPECT_EQ(run("analyze --system " + data("ex1.json") + " --method periodic-looped --T 0.45"), 2);
  EXPECT_EQ(run("analyze --system " + data("ex1.json") + " --method periodic-looped"), 1);
  EXPECT_EQ(run("analyze --system " + data("ex1.json") + " --method periodic-looped --T 0.3 --Tmin 0.1"), 1);
  EXPECT_EQ(run("analyze --system " + data("ex1.json") + " --example ex1 --method spectral --T 0.3"), 1);
  EXPECT_EQ(run("analyze --system /nonexistent.json --method spectral --T 0.3"), 1);
  EXPECT_EQ(run("analyze --example ex1 --method bogus --T 0.3"), 1);
  EXPECT_EQ(run("analyze --example robust1 --method periodic-looped --T 0.1"), 1);
  EXPECT_EQ(run("frobnicate"), 1);
}

TEST(Cli, AlphaConstants) {
  const std::string out = tmp("alpha.json");
  EXPECT_EQ(run("analyze --system " + data("ex3.json") + " --method alpha --P diag:2.3622,1.4752 --out " + out), 2);
  const auto r = read_json(out);
  EXPECT_NEAR(r["result"]["c"].get<double>(), -2.4036, 1e-3);
  EXPECT_NEAR(r["result"]["d"].get<double>(), -0.3646, 1e-3);
}

TEST(Cli, ReportRoundTrip) {
  const std::string first = tmp("first.json"), second = tmp("second.json");
  ASSERT_EQ(run("analyze --example ex3 --method ranged --Tmin 0.2 --Tmax 0.5 --out " + first), 0);
  const auto a = read_json(first);
  std::string args;
  for (const auto& s : a["argv"]) args += " " + (s.get<std::string>() == first ? second : s.get<std::string>());
  ASSERT_EQ(run(args), 0);
  const auto b = read_json(second);
  EXPECT_EQ(a["input"], b["input"]);
  EXPECT_EQ(a["result"]["certificate"], b["result"]["certificate"]);
  EXPECT_EQ(a["result"]["solver"]["t_star"], b["result"]["solver"]["t_star"]);
  EXPECT_EQ(a["result"]["checks"], b["result"]["checks"]);
}

TEST(Cli, SearchBoundary) {
  const std::string out = tmp("search.json");
  ASSERT_EQ(run("search --system " + data("ex2.json") + " --method min-dt --out " + out), 0);
  const auto r = read_json(out);
  EXPECT_NEAR(r["result"]["bound"].get<double>(), 1.2323, 1e-3);
  EXPECT_EQ(r["result"]["direction"], "min-feasible-T");
  EXPECT_EQ(run("search --example ex2 --method min-dt --bracket 2,3"), 1);
  EXPECT_EQ(run("search --example ex2 --mode sideways"), 1);
  EXPECT_EQ(run("search --example ex3 --mode interval --method periodic-looped"), 1);
}

TEST(Cli, SearchRangedWithFixedLowerBound) {
  const std::string out = tmp("ranged.json");
  ASSERT_EQ(run("search --example ex3 --method ranged --Tmin 0.2 --bracket 0.3,0.8 --out " + out), 0);
  const auto r = read_json(out);
  EXPECT_GT(r["result"]["bound"].get<double>(), 0.5063);
  EXPECT_EQ(r["input"]["Tmin"], 0.2);
}

TEST(Cli, SimulateWritesCsv) {
  const std::string report = tmp("cert.json"), csv = tmp("trace.csv"), sim = tmp("sim.json");
  ASSERT_EQ(run("analyze --example ex1 --method periodic-looped --T 0.3 --out " + report), 0);
  ASSERT_EQ(run("simulate --example ex1 --seq periodic:0.3 --horizon 20 --P report:" + report + " --csv " + csv +
                " --out " + sim),
            0);
  std::ifstream f(csv);
  std::string header;
  std::getline(f, header);
  EXPECT_EQ(header, "t,tau,k,x1,x2,V,event");
  const auto r = read_json(sim);
  EXPECT_TRUE(r["result"]["empirical"]["decreasing_envelope"].get<bool>());
  EXPECT_EQ(r["input"]["sequence"], "periodic:0.3");

  EXPECT_EQ(run("simulate --example ex1 --seq log --horizon 30"), 0);
  EXPECT_EQ(run("simulate --example ex1 --seq random:0.1,0.4,11 --x0 1,0"), 0);
  EXPECT_EQ(run("simulate --example ex1 --seq random:0.1,0.4,11 --x0 1,0,0"), 1);
  EXPECT_EQ(run("simulate --example ex1 --seq warp:3"), 1);
}

TEST(Cli, Reproduce) {
  const std::string out = tmp("repro.json");
  EXPECT_EQ(run("reproduce --suite ex1 --tol-report --out " + out), 0);
  const auto r = read_json(out);
  EXPECT_EQ(r["result"]["rows"].size(), 4u);
  EXPECT_TRUE(r["result"]["all_pass"].get<bool>());
  EXPECT_EQ(run("reproduce --suite robust2"), 0);
  EXPECT_EQ(run("reproduce --suite ex9"), 1);
}
