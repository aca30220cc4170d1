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

#include "miqcqp/metrics.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <ostream>
#include <stdexcept>

namespace miqcqp {

double IntegerErrorRate(const VectorXd& candidate, const VectorXd& reference,
                        std::span<const int> integer_indices) {
  if (integer_indices.empty()) {
    throw std::invalid_argument("integer error rate undefined for n_z = 0");
  }
  if (candidate.size() != reference.size()) {
    throw std::invalid_argument("integer error rate: length mismatch");
  }
  int wrong = 0;
  for (int i : integer_indices) {
    if (i < 0 || i >= candidate.size()) {
      throw std::invalid_argument("integer error rate: index out of range");
    }
    if (candidate(i) != reference(i)) ++wrong;
  }
  return static_cast<double>(wrong) / static_cast<double>(integer_indices.size());
}

std::string_view NormalizationName(Normalization n) {
  switch (n) {
    case Normalization::kRatio:
      return "ratio";
    case Normalization::kAbsolute:
      return "absolute";
    case Normalization::kUnavailable:
      return "unavailable";
  }
  return "?";
}

NormalizedValue NormalizedObjective(const RunRecord& run, double reference_f) {
  if (reference_f == 0.0) return {run.best_cost, Normalization::kAbsolute};
  return {run.best_cost / reference_f, Normalization::kRatio};
}

Quantiles ComputeQuantiles(std::vector<double> values) {
  if (values.empty()) throw std::invalid_argument("quantiles of an empty set");
  std::sort(values.begin(), values.end());
  auto at = [&](double q) {
    const double pos = q * static_cast<double>(values.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const std::size_t hi = std::min(lo + 1, values.size() - 1);
    const double frac = pos - static_cast<double>(lo);
    if (frac == 0.0) return values[lo];
    return values[lo] + frac * (values[hi] - values[lo]);
  };
  return {values.front(), at(0.25), at(0.5), at(0.75), values.back()};
}

std::vector<SummaryRow> Summarize(const std::vector<RunRecord>& records,
                                  const OracleCache& references) {
  // Key on the textual descriptor plus solver so grouping is exact.
  std::map<std::pair<std::string, int>, std::vector<const RunRecord*>> groups;
  for (const RunRecord& r : records) {
    groups[{r.instance.Key(), static_cast<int>(r.solver)}].push_back(&r);
  }
  std::vector<SummaryRow> rows;
  rows.reserve(groups.size());
  for (const auto& [key, members] : groups) {
    SummaryRow row;
    row.instance = members.front()->instance;
    row.solver = members.front()->solver;
    row.runs = static_cast<int>(members.size());
    const OracleSolution* ref = references.Find(row.instance);
    std::vector<double> objective;
    double eps_sum = 0.0;
    int feasible = 0;
    const std::vector<int> integer_idx = [&] {
      std::vector<int> idx;
      for (int i = row.instance.n_r; i < row.instance.dim; ++i) idx.push_back(i);
      return idx;
    }();
    for (const RunRecord* r : members) {
      if (r->feasible) ++feasible;
      if (ref == nullptr) {
        objective.push_back(r->best_cost);
        continue;
      }
      const NormalizedValue nv = NormalizedObjective(*r, ref->f_star);
      objective.push_back(nv.value);
      if (!integer_idx.empty()) {
        eps_sum += IntegerErrorRate(r->best_x, ref->x_star, integer_idx);
      }
    }
    const double nan = std::numeric_limits<double>::quiet_NaN();
    if (ref == nullptr) {
      row.normalization = Normalization::kUnavailable;
      row.reference_f = nan;
      row.mean_eps_z = nan;
    } else {
      row.reference_f = ref->f_star;
      row.normalization =
          ref->f_star == 0.0 ? Normalization::kAbsolute : Normalization::kRatio;
      row.mean_eps_z = integer_idx.empty() ? nan : eps_sum / row.runs;
    }
    row.objective = ComputeQuantiles(std::move(objective));
    row.feasibility_rate = static_cast<double>(feasible) / row.runs;
    rows.push_back(std::move(row));
  }
  std::sort(rows.begin(), rows.end(), [](const SummaryRow& a, const SummaryRow& b) {
    if (DescriptorLess(a.instance, b.instance)) return true;
    if (DescriptorLess(b.instance, a.instance)) return false;
    return static_cast<int>(a.solver) < static_cast<int>(b.solver);
  });
  return rows;
}

void WriteSummaryCsv(std::ostream& os, const std::vector<SummaryRow>& rows) {
  os << kSummaryCsvHeader << '\n';
  for (const SummaryRow& r : rows) {
    const InstanceDescriptor& d = r.instance;
    os << TestCaseName(d.test_case) << ',' << d.dim << ',' << d.n_r << ','
       << d.n_z << ',' << FormatReal(d.cond) << ',' << FormatReal(d.level) << ','
       << SolverName(r.solver) << ',' << r.runs << ',' << FormatReal(r.reference_f)
       << ',' << NormalizationName(r.normalization) << ','
       << FormatReal(r.objective.min) << ',' << FormatReal(r.objective.q25) << ','
       << FormatReal(r.objective.median) << ',' << FormatReal(r.objective.q75)
       << ',' << FormatReal(r.objective.max) << ',' << FormatReal(r.mean_eps_z)
       << ',' << FormatReal(r.feasibility_rate) << '\n';
  }
}

}  // namespace miqcqp
