#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "csflow_cli.hpp"

namespace fs = std::filesystem;
using csflow::cli::json;

namespace {

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result run(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = csflow::cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

std::vector<std::vector<double>> parse_csv(const std::string& text, std::string& header) {
  std::istringstream in(text);
  std::getline(in, header);
  std::vector<std::vector<double>> rows;
  std::string line;
  while (std::getline(in, line)) {
    std::vector<double> row;
    std::stringstream ls(line);
    std::string cell;
    while (std::getline(ls, cell, ',')) row.push_back(std::stod(cell));
    rows.push_back(row);
  }
  return rows;
}

fs::path temp_file(const std::string& name) {
  return fs::temp_directory_path() / ("csflow_test_" + name);
}

}  // namespace

TEST(CliFlow, RoundSphereColumnsMatchClosedForm) {
  const auto r = run({"flow", "--lambda", "1,1,1", "--h", "1e-4", "--t-end", "0.2"});
  ASSERT_EQ(r.code, 0) << r.err;
  std::string header;
  const auto rows = parse_csv(r.out, header);
  EXPECT_EQ(header, "t,lambda1,lambda2,lambda3,R11,R22,R33,cs_density,cs_integral");
  ASSERT_EQ(rows.size(), 2001u);
  for (const auto& row : rows) {
    ASSERT_EQ(row.size(), 9u);
    EXPECT_NEAR(row[1], std::sqrt(1.0 - 4.0 * row[0]), 1e-8);
  }
  EXPECT_NEAR(rows.back()[0], 0.2, 1e-15);
}

TEST(CliFlow, NormalizedConvergesToRound) {
  const auto r = run({"flow", "--lambda", "2,1,1", "--normalized", "--t-end", "10"});
  ASSERT_EQ(r.code, 0) << r.err;
  std::string header;
  const auto last = parse_csv(r.out, header).back();
  double spread = 0.0;
  for (int i = 1; i <= 3; ++i)
    for (int j = 1; j <= 3; ++j) spread = std::max(spread, std::abs(last[i] / last[j] - 1.0));
  EXPECT_LT(spread, 1e-6);
}

TEST(CliFlow, InvalidLambdaNamesParameter) {
  const auto r = run({"flow", "--lambda", "0,1,1"});
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("lambda1"), std::string::npos);
  EXPECT_EQ(run({"flow", "--lambda", "1,1"}).code, 2);
  EXPECT_EQ(run({"flow", "--lambda", "1,x,1"}).code, 2);
  EXPECT_EQ(run({"flow", "--h", "-1"}).code, 2);
  EXPECT_EQ(run({"flow", "--h", "0.5", "--t-end", "0.1"}).code, 2);
  EXPECT_EQ(run({"flow", "--format", "xml"}).code, 2);
  EXPECT_EQ(run({}).code, 2);
}

TEST(CliFlow, ExtinctionWritesPartialFileAndWarns) {
  const auto path = temp_file("extinct.csv");
  const auto r = run({"flow", "--lambda", "1,1,1", "--h", "0.01", "--t-end", "0.3", "--output",
                      path.string()});
  EXPECT_EQ(r.code, 0);
  EXPECT_NE(r.err.find("warning"), std::string::npos);
  std::ifstream in(path);
  std::stringstream buf;
  buf << in.rdbuf();
  std::string header;
  const auto rows = parse_csv(buf.str(), header);
  ASSERT_FALSE(rows.empty());
  EXPECT_LT(rows.back()[0], 0.3);
  fs::remove(path);
}

TEST(CliFlow, JsonFormat) {
  const auto r = run({"flow", "--lambda", "1.2,1,0.9", "--t-end", "0.01", "--format", "json",
                      "--paper-anchors"});
  ASSERT_EQ(r.code, 0);
  const auto j = json::parse(r.out);
  EXPECT_EQ(j["schema_version"], 1);
  EXPECT_EQ(j["rows"].size(), 11u);
  EXPECT_TRUE(j.contains("paper_anchors"));
}

TEST(CliCsDerivative, Verdicts) {
  auto r = run({"cs-derivative", "--lambda", "1,1,1"});
  ASSERT_EQ(r.code, 0) << r.err;
  auto j = json::parse(r.out);
  EXPECT_TRUE(j["invariant"].get<bool>());

  r = run({"cs-derivative", "--lambda", "2,1,1"});
  ASSERT_EQ(r.code, 0);
  j = json::parse(r.out);
  EXPECT_FALSE(j["invariant"].get<bool>());
  const double pi2 = std::numbers::pi * std::numbers::pi;
  EXPECT_NEAR(j["tp1_dot_coefficient"].get<double>(), 16.0 / pi2 * 2.0 * 9.0, 1e-12);
  EXPECT_NEAR(j["ratio"].get<double>(), 4.0, 1e-12);
  EXPECT_EQ(j["F"].get<double>(), 576.0);

  r = run({"cs-derivative", "--lambda", "3,3,3"});
  EXPECT_TRUE(json::parse(r.out)["invariant"].get<bool>());
  EXPECT_EQ(run({"cs-derivative", "--lambda", "-3,3,3"}).code, 2);
}

TEST(CliWarpedVerify, ExactCases) {
  auto r = run({"warped-verify", "--n", "1", "--warp", "2+sin", "--resolution", "6"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_TRUE(json::parse(r.out)["exact"].get<bool>());
  r = run({"warped-verify", "--n", "2", "--warp", "2+0.5cos", "--resolution", "6"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_TRUE(json::parse(r.out)["exact"].get<bool>());
  r = run({"warped-verify", "--n", "2", "--warp", "2-0.9sin(t1)*sin(t2)", "--resolution", "4"});
  EXPECT_EQ(r.code, 0) << r.err;
}

TEST(CliWarpedVerify, ValidationErrors) {
  EXPECT_EQ(run({"warped-verify", "--warp", "1+2sin"}).code, 2);
  EXPECT_EQ(run({"warped-verify", "--warp", "2+tan"}).code, 2);
  EXPECT_EQ(run({"warped-verify", "--n", "3"}).code, 2);
  EXPECT_EQ(run({"warped-verify", "--resolution", "2"}).code, 2);
  // n = 1 warps may only depend on t1
  EXPECT_EQ(run({"warped-verify", "--n", "1", "--warp", "2+sin(t2)", "--resolution", "4"}).code, 2);
}

TEST(CliWarpedVerify, TightToleranceFails) {
  const auto r = run({"warped-verify", "--n", "1", "--warp", "2+0.9sin", "--resolution", "4",
                      "--sparsity-tol", "-1"});
  EXPECT_EQ(r.code, 1);
  EXPECT_EQ(json::parse(r.out)["checks"][0]["status"], "fail");
}

TEST(CliVerifyAll, PassesAndCorruptedToleranceFails) {
  auto r = run({"verify-all", "--samples", "10", "--resolution", "4"});
  ASSERT_EQ(r.code, 0) << r.out;
  auto j = json::parse(r.out);
  EXPECT_EQ(j["schema_version"], 1);
  for (const auto& c : j["checks"]) {
    EXPECT_TRUE(c.contains("name") && c.contains("status") && c.contains("max_error") &&
                c.contains("tolerance") && c.contains("paper_anchor"));
  }

  r = run({"verify-all", "--samples", "10", "--resolution", "4", "--tol",
           "berger.F_factorizations=1e-300"});
  EXPECT_EQ(r.code, 1);
  j = json::parse(r.out);
  EXPECT_EQ(j["checks"][0]["name"], "berger.F_factorizations");
  EXPECT_EQ(j["checks"][0]["status"], "fail");

  EXPECT_EQ(run({"verify-all", "--tol", "no.such.check=1"}).code, 2);
}

TEST(CliConfig, KeyValueFile) {
  const auto path = temp_file("config.ini");
  {
    std::ofstream cfg(path);
    cfg << "[flow]\nlambda=\"1,1,1\"\nh=0.01\nt-end=0.05\n";
  }
  const auto r = run({"--config", path.string(), "flow"});
  ASSERT_EQ(r.code, 0) << r.err;
  std::string header;
  EXPECT_EQ(parse_csv(r.out, header).size(), 6u);
  fs::remove(path);
}

TEST(CliHelp, ExitsZero) {
  EXPECT_EQ(run({"--help"}).code, 0);
  EXPECT_EQ(run({"flow", "--help"}).code, 0);
}
