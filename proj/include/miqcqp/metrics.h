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

#ifndef MIQCQP_METRICS_H_
#define MIQCQP_METRICS_H_

#include <iosfwd>
#include <span>
#include <string_view>
#include <vector>

#include "miqcqp/oracle.h"
#include "miqcqp/run_record.h"

namespace miqcqp {

// Fraction of integer coordinates (0-based indices) where candidate and
// reference differ, compared with exact equality. Throws when
// integer_indices is empty or the vectors differ in length.
double IntegerErrorRate(const VectorXd& candidate, const VectorXd& reference,
                        std::span<const int> integer_indices);

enum class Normalization { kRatio, kAbsolute, kUnavailable };
std::string_view NormalizationName(Normalization n);

struct NormalizedValue {
  double value = 0.0;
  // kAbsolute: the reference optimum is 0, so value is the raw objective.
  Normalization kind = Normalization::kRatio;
};

// best_cost / reference_f. best_cost equals best_f on feasible rows, so
// infeasible rows carry their penalty instead of looking better than the
// optimum. A zero reference falls back to the absolute value.
NormalizedValue NormalizedObjective(const RunRecord& run, double reference_f);

struct Quantiles {
  double min = 0.0;
  double q25 = 0.0;
  double median = 0.0;
  double q75 = 0.0;
  double max = 0.0;
};

// Linear interpolation between order statistics at position q (n - 1).
Quantiles ComputeQuantiles(std::vector<double> values);

struct SummaryRow {
  InstanceDescriptor instance;
  SolverKind solver = SolverKind::kMies;
  int runs = 0;
  double reference_f = 0.0;  // NaN when unavailable
  Normalization normalization = Normalization::kRatio;
  Quantiles objective;  // normalized objective (or absolute, per flag)
  double mean_eps_z = 0.0;  // NaN when unavailable or n_z == 0
  double feasibility_rate = 0.0;
};

// Groups records by (descriptor, solver); order of the input is irrelevant.
// references is consulted by descriptor key; missing cells are flagged.
std::vector<SummaryRow> Summarize(const std::vector<RunRecord>& records,
                                  const OracleCache& references);

inline constexpr std::string_view kSummaryCsvHeader =
    "test_case,D,n_r,n_z,c,E,solver,runs,reference_f,normalization,q_min,q25,"
    "median,q75,q_max,mean_eps_z,feasibility_rate";

void WriteSummaryCsv(std::ostream& os, const std::vector<SummaryRow>& rows);

}  // namespace miqcqp

#endif  // MIQCQP_METRICS_H_
