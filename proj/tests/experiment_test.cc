// Copyright 2026 The MIQCQP-ES Authors
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "miqcqp/experiment.h"

#include <sstream>
#include <string>

#include "gtest/gtest.h"
#include "miqcqp/random.h"

namespace miqcqp {
namespace {

// Drops the trailing wall_time column of every line.
std::string WithoutWallTime(const std::string& csv) {
  std::istringstream in(csv);
  std::string line, out;
  while (std::getline(in, line)) out += line.substr(0, line.rfind(',')) + "\n";
  return out;
}

std::string RunsCsv(const MatrixResult& result) {
  std::ostringstream os;
  WriteRunRecordsCsv(os, result.records);
  return os.str();
}

ExperimentConfig SmallConfig() {
  ExperimentConfig config;
  config.test_cases = {TestCase::kTC1, TestCase::kTC0};
  config.conds = {10.0};
  config.levels = {30.0};
  config.seeds = 3;
  config.budget = 2000;
  config.threads = 1;
  return config;
}

TEST(DeriveSeedTest, FrozenValues) {
  const InstanceDescriptor d{TestCase::kTC0, 8, 4, 4, 10, 10};
  EXPECT_EQ(DeriveSeed(d, 0), 5453193888456463568ull);
  EXPECT_EQ(DeriveSeed(d, 1), 5453194987968091779ull);
  const InstanceDescriptor s{TestCase::kSphere, 4, 2, 2, 1, 1e9};
  EXPECT_EQ(DeriveSeed(s, 9), 7361972251777163455ull);
  EXPECT_EQ(Fnv1a64("", 0), 14695981039346656037ull);
}

TEST(ExpandCellsTest, DeskGridHas240Runs) {
  const ExperimentConfig config;
  EXPECT_EQ(ExpandCells(config).size() * static_cast<std::size_t>(config.seeds), 240u);
  EXPECT_EQ(config.budget, 20000);
}

TEST(ExpandCellsTest, SphereIgnoresConditionGrid) {
  ExperimentConfig config;
  config.test_cases = {TestCase::kSphere};
  config.dims = {4};
  const std::vector<Cell> cells = ExpandCells(config);
  ASSERT_EQ(cells.size(), 4u);  // 2 levels x 2 solvers
  EXPECT_EQ(cells[0].instance.cond, 1.0);
}

TEST(ExpandCellsTest, SortedByDescriptorThenSolver) {
  const std::vector<Cell> cells = ExpandCells(SmallConfig());
  ASSERT_EQ(cells.size(), 4u);
  EXPECT_EQ(cells[0].instance.test_case, TestCase::kTC0);
  EXPECT_EQ(cells[0].solver, SolverKind::kMies);
  EXPECT_EQ(cells[1].solver, SolverKind::kCmaIh);
  EXPECT_EQ(cells[2].instance.test_case, TestCase::kTC1);
}

TEST(RunMatrixTest, EmptyGridGivesHeaderOnly) {
  ExperimentConfig config;
  config.test_cases = {};
  OracleCache cache;
  const MatrixResult result = RunMatrix(config, cache);
  EXPECT_TRUE(result.records.empty());
  EXPECT_EQ(RunsCsv(result), std::string(kRunCsvHeader) + "\n");
}

TEST(RunMatrixTest, RowsSortedAndInvariantsHold) {
  OracleCache cache;
  const ExperimentConfig config = SmallConfig();
  const MatrixResult result = RunMatrix(config, cache);
  ASSERT_EQ(result.records.size(), 12u);
  for (std::size_t i = 0; i < result.records.size(); ++i) {
    EXPECT_EQ(CheckRunRecordInvariants(result.records[i]), "");
    EXPECT_LE(result.records[i].evaluations_used, config.budget);
    if (i > 0) EXPECT_TRUE(RunRecordLess(result.records[i - 1], result.records[i]));
  }
  EXPECT_EQ(result.summary.size(), 4u);
  for (const SummaryRow& row : result.summary) {
    EXPECT_EQ(row.normalization, Normalization::kRatio);
    EXPECT_GE(row.objective.min, 1.0 - 1e-12);
  }
  std::istringstream lines(RunsCsv(result));
  std::string line;
  int count = 0;
  while (std::getline(lines, line)) ++count;
  EXPECT_EQ(count, 13);
}

TEST(RunMatrixTest, DeterministicAcrossRerunsAndThreadCounts) {
  OracleCache cache;
  ExperimentConfig config = SmallConfig();
  const std::string first = WithoutWallTime(RunsCsv(RunMatrix(config, cache)));
  const std::string second = WithoutWallTime(RunsCsv(RunMatrix(config, cache)));
  config.threads = 3;
  const std::string threaded = WithoutWallTime(RunsCsv(RunMatrix(config, cache)));
  EXPECT_EQ(first, second);
  EXPECT_EQ(first, threaded);
}

TEST(RunMatrixTest, UnreachableReferencesAreFlagged) {
  ExperimentConfig config = SmallConfig();
  config.test_cases = {TestCase::kTC0};
  config.dims = {20};
  config.all_integer = true;
  config.seeds = 1;
  config.solvers = {SolverKind::kMies};
  OracleCache cache;
  const MatrixResult result = RunMatrix(config, cache);
  ASSERT_EQ(result.summary.size(), 1u);
  EXPECT_EQ(result.summary[0].normalization, Normalization::kUnavailable);
}

TEST(RunMatrixTest, TraceRowsCarryRunIdentity) {
  ExperimentConfig config = SmallConfig();
  config.trace = true;
  config.seeds = 1;
  OracleCache cache;
  const MatrixResult result = RunMatrix(config, cache);
  ASSERT_EQ(result.traces.size(), result.records.size());
  std::ostringstream os;
  WriteTraceCsv(os, result);
  const std::string csv = os.str();
  EXPECT_EQ(csv.substr(0, kTraceCsvHeader.size()), kTraceCsvHeader);
  EXPECT_NE(csv.find("\nTC0,8,4,4,10,30,mies,0,0,15,"), std::string::npos);
  EXPECT_NE(csv.find("\nTC1,8,4,4,10,30,cma_ih,0,0,1,"), std::string::npos);
}

TEST(ConfigJsonTest, OverridesAndValidates) {
  const ExperimentConfig config = ApplyConfigJson(ExperimentConfig(), R"({
    "test_cases": ["TC2", "sphere"],
    "dims": 4,
    "conds": [100],
    "levels": [10, 80],
    "solvers": "cma_ih",
    "seeds": 2,
    "budget": 5000,
    "all_integer": true,
    "mies": {"mu": 5, "lambda": 35, "selection": "plus", "mean_step_divisor": "n_z"},
    "cma": {"integer_min_std": 0.3, "init_sigma": 2.0}
  })");
  EXPECT_EQ(config.test_cases, (std::vector<TestCase>{TestCase::kTC2, TestCase::kSphere}));
  EXPECT_EQ(config.dims, std::vector<int>{4});
  EXPECT_EQ(config.levels, (std::vector<double>{10, 80}));
  EXPECT_EQ(config.solvers, std::vector<SolverKind>{SolverKind::kCmaIh});
  EXPECT_EQ(config.seeds, 2);
  EXPECT_EQ(config.budget, 5000);
  EXPECT_TRUE(config.all_integer);
  EXPECT_EQ(config.mies.mu, 5);
  EXPECT_EQ(config.mies.selection, mies::Selection::kPlus);
  EXPECT_EQ(config.mies.mean_step_divisor, mies::MeanStepDivisor::kNz);
  EXPECT_EQ(config.cma.integer_min_std, 0.3);
  EXPECT_EQ(config.cma.init_sigma, 2.0);
  // Untouched keys keep their defaults.
  EXPECT_EQ(config.mies.init_q, 1.0);
  EXPECT_EQ(ExpandCells(config).front().instance.n_r, 0);
}

TEST(ConfigJsonTest, RejectsBadInput) {
  EXPECT_THROW(ApplyConfigJson(ExperimentConfig(), R"({"seed": 3})"), std::invalid_argument);
  EXPECT_THROW(ApplyConfigJson(ExperimentConfig(), R"({"mies": {"tau": 1}})"),
               std::invalid_argument);
  EXPECT_THROW(ApplyConfigJson(ExperimentConfig(), R"({"dims": [5]})"),
               std::invalid_argument);
  EXPECT_THROW(ApplyConfigJson(ExperimentConfig(), R"([1, 2])"), std::invalid_argument);
  EXPECT_ANY_THROW(ApplyConfigJson(ExperimentConfig(), "{not json"));
}

}  // namespace
}  // namespace miqcqp
