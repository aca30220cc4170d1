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

#ifndef MIQCQP_EXPERIMENT_H_
#define MIQCQP_EXPERIMENT_H_

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "miqcqp/cma_ih.h"
#include "miqcqp/metrics.h"
#include "miqcqp/mies.h"
#include "miqcqp/oracle.h"
#include "miqcqp/run_record.h"

namespace miqcqp {

// Grid of test_case x D x c x E x solver, each cell run for `seeds` seeds.
// Defaults are the desk-scale grid (240 runs).
struct ExperimentConfig {
  std::vector<TestCase> test_cases{TestCase::kTC0, TestCase::kTC1, TestCase::kTC2,
                                   TestCase::kTC3};
  std::vector<int> dims{8};
  std::vector<double> conds{10.0, 1e3, 1e6};
  std::vector<double> levels{10.0, 50.0};
  std::vector<SolverKind> solvers{SolverKind::kMies, SolverKind::kCmaIh};
  int seeds = 5;
  std::int64_t budget = 20000;
  bool all_integer = false;
  bool trace = false;
  int threads = 0;  // 0: hardware concurrency
  mies::Config mies;
  cma::Config cma;

  void Validate() const;
};

// Overrides fields of base with the keys present in a JSON object:
// test_cases, dims, conds, levels, solvers (lists); seeds, budget,
// all_integer, trace, threads (scalars); "mies" {mu, lambda, selection,
// mean_step_divisor, init_lo, init_hi, init_s, init_q} and "cma" {lambda,
// integer_min_std, tol_fun, tol_x, init_sigma, init_lo, init_hi}.
// Unknown keys are rejected.
ExperimentConfig ApplyConfigJson(ExperimentConfig base, const std::string& json_text);

struct Cell {
  InstanceDescriptor instance;
  SolverKind solver = SolverKind::kMies;
};

// Sorted by descriptor then solver. SPHERE cells ignore the c grid.
std::vector<Cell> ExpandCells(const ExperimentConfig& config);

// FNV-1a 64 of the UTF-8 bytes "<descriptor key>#<seed_index>".
std::uint64_t DeriveSeed(const InstanceDescriptor& d, int seed_index);

RunRecord RunSingle(const ProblemInstance& instance, SolverKind solver,
                    const ExperimentConfig& config, int seed_index,
                    std::vector<TraceRow>* trace = nullptr);

struct MatrixResult {
  std::vector<RunRecord> records;  // sorted by RunRecordLess
  std::vector<std::vector<TraceRow>> traces;  // parallel to records; empty unless tracing
  std::vector<SummaryRow> summary;
};

// Runs every (cell, seed) on a worker pool. References for normalization
// come from `references`, which is filled for cells within oracle reach.
MatrixResult RunMatrix(const ExperimentConfig& config, OracleCache& references);

// Solves (and caches) every distinct instance of the grid.
void ComputeReferences(const ExperimentConfig& config, OracleCache& references);

void WriteTraceCsv(std::ostream& os, const MatrixResult& result);

}  // namespace miqcqp

#endif  // MIQCQP_EXPERIMENT_H_
