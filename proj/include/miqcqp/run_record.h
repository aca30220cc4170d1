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

#ifndef MIQCQP_RUN_RECORD_H_
#define MIQCQP_RUN_RECORD_H_

#include <cstdint>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "miqcqp/quadforms.h"

namespace miqcqp {

enum class SolverKind { kMies, kCmaIh };
enum class Termination { kBudget, kTolerance };

std::string_view SolverName(SolverKind solver);
SolverKind ParseSolver(std::string_view name);
std::string_view TerminationName(Termination t);
Termination ParseTermination(std::string_view name);

// Outcome of one solver run. best_* describe the best-ever evaluated
// candidate: feasible candidates rank ahead of infeasible ones, then lower
// penalized cost wins.
struct RunRecord {
  InstanceDescriptor instance;
  SolverKind solver = SolverKind::kMies;
  int seed_index = 0;
  std::uint64_t seed = 0;
  double best_cost = 0.0;
  double best_f = 0.0;
  double best_g = 0.0;
  bool feasible = false;
  std::int64_t evaluations_used = 0;
  Termination termination = Termination::kBudget;
  double wall_time = 0.0;
  VectorXd best_x;
};

// One row per generation when tracing is enabled.
// min_integer_std is min_i sigma*sqrt(C_ii) over integer coordinates for
// cma-IH and min_i q_i over the parent population for mies (NaN when
// there are no integer coordinates).
struct TraceRow {
  std::int64_t generation = 0;
  std::int64_t evaluations = 0;
  double best_cost = 0.0;
  double sigma = 0.0;
  double min_integer_std = 0.0;
};

// CSV schema for run records. Column order is frozen:
// test_case,D,n_r,n_z,c,E,solver,seed_index,seed,best_cost,best_f,best_g,
// feasible,evaluations_used,termination,best_x,wall_time
// best_x is space separated. Reals use 17 significant digits.
inline constexpr std::string_view kRunCsvHeader =
    "test_case,D,n_r,n_z,c,E,solver,seed_index,seed,best_cost,best_f,best_g,"
    "feasible,evaluations_used,termination,best_x,wall_time";

inline constexpr std::string_view kTraceCsvHeader =
    "test_case,D,n_r,n_z,c,E,solver,seed_index,generation,evaluations,"
    "best_cost,sigma,min_integer_std";

std::string FormatReal(double v);
std::string RunRecordCsvRow(const RunRecord& r);
RunRecord ParseRunRecordCsvRow(std::string_view line);

void WriteRunRecordsCsv(std::ostream& os, const std::vector<RunRecord>& rows);
std::vector<RunRecord> ReadRunRecordsCsv(std::istream& is);

// Descriptor, solver, then seed index.
bool RunRecordLess(const RunRecord& a, const RunRecord& b);

// Checks feasible <=> best_g <= E (within 1e-9) and best_cost == best_f when
// feasible. Returns an empty string when the row is consistent.
std::string CheckRunRecordInvariants(const RunRecord& r);

}  // namespace miqcqp

#endif  // MIQCQP_RUN_RECORD_H_
