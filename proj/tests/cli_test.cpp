// Copyright 2026 The subgauss Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
//
// End-to-end checks of the command-line tool: flag handling, exit codes,
// output formats and the documented cross-command consistency laws.

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "gtest/gtest.h"
#include "subgauss/mechanism.hpp"

namespace {

struct CliResult {
  int exit_code = -1;
  std::string output;  // stdout only
};

CliResult run_cli(const std::string& args) {
  const std::string command =
      std::string(SUBGAUSS_CLI_PATH) + " " + args + " 2>/dev/null";
  FILE* pipe = popen(command.c_str(), "r");
  EXPECT_NE(pipe, nullptr);
  CliResult result;
  char buffer[4096];
  while (size_t n = fread(buffer, 1, sizeof(buffer), pipe)) {
    result.output.append(buffer, n);
  }
  const int status = pclose(pipe);
  result.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return result;
}

std::vector<std::string> split_lines(const std::string& text) {
  std::vector<std::string> lines;
  std::istringstream is(text);
  std::string line;
  while (std::getline(is, line)) lines.push_back(line);
  return lines;
}

TEST(Cli, UsageErrorsExitTwo) {
  EXPECT_EQ(run_cli("").exit_code, 2);
  EXPECT_EQ(run_cli("delta --sigma 1").exit_code, 2);
  EXPECT_EQ(run_cli("no-such-command").exit_code, 2);
  EXPECT_EQ(run_cli("delta --sigma 1 --q 2 --iterations 1 --epsilon 1").exit_code,
            2);
}

TEST(Cli, DeltaZeroWhenQZero) {
  const CliResult r = run_cli("delta --sigma 1 --q 0 --iterations 5 --epsilon 1");
  EXPECT_EQ(r.exit_code, 0);
  EXPECT_DOUBLE_EQ(std::atof(r.output.c_str()), 0.0);
}

TEST(Cli, DeltaFullBatchMatchesClosedFormToPrintedPrecision) {
  const CliResult r = run_cli(
      "delta --sigma 2 --q 1 --iterations 1 --epsilon 1 --grid-step 1e-6");
  EXPECT_EQ(r.exit_code, 0);
  // Pessimistic accounting rounds delta up by at most ~ grid_step.
  const double expected = subgauss::analytic_delta_single_step(2.0, 1.0, 1.0);
  const double printed = std::atof(r.output.c_str());
  EXPECT_GE(printed, expected - 1e-9);
  EXPECT_LE(printed, expected + 1e-7);
  // Scientific notation with six digits after the point.
  EXPECT_NE(r.output.find('e'), std::string::npos);
  EXPECT_EQ(r.output.find('.'), 1u);
}

TEST(Cli, DeltaPessimisticDominatesOptimistic) {
  const std::string base =
      "delta --sigma 1 --q 0.1 --iterations 32 --epsilon 2 --grid-step 1e-4 ";
  const CliResult pess = run_cli(base + "--mode pessimistic");
  const CliResult opt = run_cli(base + "--mode optimistic");
  ASSERT_EQ(pess.exit_code, 0);
  ASSERT_EQ(opt.exit_code, 0);
  EXPECT_GE(std::atof(pess.output.c_str()), std::atof(opt.output.c_str()));
}

TEST(Cli, DeltaGridOverflowExitsThree) {
  const CliResult r = run_cli(
      "delta --sigma 0.5 --q 1 --iterations 1 --epsilon 1 --max-grid-points 64");
  EXPECT_EQ(r.exit_code, 3);
}

TEST(Cli, CalibrateIsDeterministicAndRoundTrips) {
  const std::string cmd =
      "calibrate --q 0.5 --iterations 10 --epsilon 1 --delta 1e-5 "
      "--grid-step 1e-4";
  const CliResult first = run_cli(cmd);
  const CliResult second = run_cli(cmd);
  ASSERT_EQ(first.exit_code, 0);
  EXPECT_EQ(first.output, second.output);

  double sigma = 0.0, sigma_eff = 0.0, achieved = 0.0;
  ASSERT_EQ(std::sscanf(first.output.c_str(),
                        "sigma=%lf sigma_eff=%lf achieved_delta=%lf", &sigma,
                        &sigma_eff, &achieved),
            3);
  EXPECT_NEAR(sigma_eff, sigma / 0.5, 1e-11 * sigma_eff);  // 13 printed digits
  EXPECT_LE(achieved, 1e-5);

  // Feeding the calibrated sigma back into the accountant meets the
  // budget.
  char delta_cmd[256];
  std::snprintf(delta_cmd, sizeof(delta_cmd),
                "delta --sigma %.12e --q 0.5 --iterations 10 --epsilon 1 "
                "--grid-step 1e-4",
                sigma);
  const CliResult check = run_cli(delta_cmd);
  ASSERT_EQ(check.exit_code, 0);
  EXPECT_LE(std::atof(check.output.c_str()), 1e-5 * (1.0 + 1e-6));
}

TEST(Cli, CalibrateFullBatchSigmaEffEqualsSigma) {
  const CliResult r = run_cli(
      "calibrate --q 1 --iterations 4 --epsilon 1 --delta 1e-4 --grid-step 1e-4");
  ASSERT_EQ(r.exit_code, 0);
  double sigma = 0.0, sigma_eff = 0.0;
  ASSERT_EQ(std::sscanf(r.output.c_str(), "sigma=%lf sigma_eff=%lf", &sigma,
                        &sigma_eff),
            2);
  EXPECT_DOUBLE_EQ(sigma, sigma_eff);
}

TEST(Cli, CalibrateUnreachableTargetExitsFour) {
  const CliResult r = run_cli(
      "calibrate --q 0.2 --iterations 1 --epsilon 1 --delta 0.5");
  EXPECT_EQ(r.exit_code, 4);
}

TEST(Cli, ConvergenceSweepWritesOrderedCsv) {
  const std::string path = ::testing::TempDir() + "/sweep.csv";
  const CliResult r = run_cli(
      "convergence-sweep --output " + path +
      " --epsilons 1 --qs 0.5,1.0 --iteration-counts 1,4 --delta 1e-5 "
      "--grid-step 1e-4 --rel-tol 1e-5");
  ASSERT_EQ(r.exit_code, 0);
  EXPECT_TRUE(r.output.empty());  // rows go to the file, progress to stderr

  std::ifstream in(path);
  ASSERT_TRUE(in.good());
  std::string header;
  std::getline(in, header);
  EXPECT_EQ(header, "epsilon,q,T,sigma,sigma_eff,sigma_full_batch,ratio");
  std::vector<std::string> rows;
  std::string line;
  while (std::getline(in, line)) rows.push_back(line);
  ASSERT_EQ(rows.size(), 4u);  // (q, T) in ascending order
  EXPECT_EQ(rows[0].rfind("1,0.5,1,", 0), 0u);
  EXPECT_EQ(rows[1].rfind("1,0.5,4,", 0), 0u);
  EXPECT_EQ(rows[2].rfind("1,1,1,", 0), 0u);
  EXPECT_EQ(rows[3].rfind("1,1,4,", 0), 0u);
  // Full-batch rows have ratio exactly 1.
  double eps, q, sigma, sigma_eff, full, ratio;
  long long T;
  ASSERT_EQ(std::sscanf(rows[2].c_str(), "%lf,%lf,%lld,%lf,%lf,%lf,%lf", &eps,
                        &q, &T, &sigma, &sigma_eff, &full, &ratio),
            7);
  EXPECT_DOUBLE_EQ(ratio, 1.0);
  EXPECT_DOUBLE_EQ(sigma, full);
}

TEST(Cli, ConjectureSweepCsvStaysNegative) {
  const std::string path = ::testing::TempDir() + "/conjecture.csv";
  const CliResult r = run_cli(
      "conjecture-sweep --output " + path +
      " --epsilon-min 0.5 --epsilon-max 2 --epsilon-points 3 --q-points 32 "
      "--sigma-points 32");
  ASSERT_EQ(r.exit_code, 0);
  std::ifstream in(path);
  std::string header;
  std::getline(in, header);
  EXPECT_EQ(header, "epsilon,max_a_minus_b,argmax_q,argmax_sigma,achieved_delta");
  std::string line;
  int rows = 0;
  while (std::getline(in, line)) {
    double eps, gap, q, sigma, delta;
    ASSERT_EQ(std::sscanf(line.c_str(), "%lf,%lf,%lf,%lf,%lf", &eps, &gap, &q,
                          &sigma, &delta),
              5);
    EXPECT_LT(gap, 0.0);
    EXPECT_LE(delta, 1e-5);
    ++rows;
  }
  EXPECT_EQ(rows, 3);
}

TEST(Cli, VerifyMomentsPasses) {
  const CliResult r = run_cli("verify moments");
  EXPECT_EQ(r.exit_code, 0);
  EXPECT_NE(r.output.find("PASS plrv moment bounds"), std::string::npos);
}

TEST(Cli, VerifyKlReportsRatioTable) {
  const CliResult r = run_cli("verify kl --q 0.5");
  EXPECT_EQ(r.exit_code, 0);
  EXPECT_NE(r.output.find("PASS kl rate q=0.5"), std::string::npos);
  const auto lines = split_lines(r.output);
  ASSERT_GE(lines.size(), 6u);  // five u rows and a verdict
}

TEST(Cli, VerifyVarianceDeterministicUnderSeed) {
  const CliResult first = run_cli("verify variance --seed 7");
  const CliResult second = run_cli("verify variance --seed 7");
  EXPECT_EQ(first.exit_code, 0);
  EXPECT_EQ(first.output, second.output);
  EXPECT_NE(first.output.find("PASS variance decomposition suite"),
            std::string::npos);
}

TEST(Cli, SimulateVarianceEmitsCsvRow) {
  const CliResult r = run_cli(
      "simulate-variance --q 0.3 --sigma 1.5 --samples 50000 --seed 3");
  ASSERT_EQ(r.exit_code, 0);
  const auto lines = split_lines(r.output);
  ASSERT_EQ(lines.size(), 2u);
  EXPECT_EQ(lines[0],
            "q,sigma,subsampling_var,effective_noise_var,total_analytic,"
            "total_empirical,stderr");
  double q, sigma, sub, noise, total, empirical, se;
  ASSERT_EQ(std::sscanf(lines[1].c_str(), "%lf,%lf,%lf,%lf,%lf,%lf,%lf", &q,
                        &sigma, &sub, &noise, &total, &empirical, &se),
            7);
  EXPECT_NEAR(total, sub + noise, 1e-11 * total);  // 13 printed digits
  EXPECT_NEAR(empirical, total, 6.0 * se);
}

}  // namespace
