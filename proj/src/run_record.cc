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

#include "miqcqp/run_record.h"

#include <charconv>
#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <tuple>

namespace miqcqp {
namespace {

std::vector<std::string_view> SplitCsv(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = line.find(',', start);
    if (pos == std::string_view::npos) {
      out.push_back(line.substr(start));
      break;
    }
    out.push_back(line.substr(start, pos - start));
    start = pos + 1;
  }
  return out;
}

double ParseDouble(std::string_view s) {
  // strtod handles nan/inf spellings that from_chars may not on older
  // standard libraries.
  std::string tmp(s);
  char* end = nullptr;
  const double v = std::strtod(tmp.c_str(), &end);
  if (end == tmp.c_str() || *end != '\0') {
    throw std::invalid_argument("not a number: " + tmp);
  }
  return v;
}

template <typename Int>
Int ParseInt(std::string_view s) {
  Int v{};
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) {
    throw std::invalid_argument("not an integer: " + std::string(s));
  }
  return v;
}

}  // namespace

std::string_view SolverName(SolverKind solver) {
  return solver == SolverKind::kMies ? "mies" : "cma_ih";
}

SolverKind ParseSolver(std::string_view name) {
  if (name == "mies") return SolverKind::kMies;
  if (name == "cma_ih" || name == "cma-ih" || name == "cma-IH") {
    return SolverKind::kCmaIh;
  }
  throw std::invalid_argument("unknown solver: " + std::string(name));
}

std::string_view TerminationName(Termination t) {
  return t == Termination::kBudget ? "budget" : "tolerance";
}

Termination ParseTermination(std::string_view name) {
  if (name == "budget") return Termination::kBudget;
  if (name == "tolerance") return Termination::kTolerance;
  throw std::invalid_argument("unknown termination: " + std::string(name));
}

std::string FormatReal(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

std::string RunRecordCsvRow(const RunRecord& r) {
  std::ostringstream os;
  const InstanceDescriptor& d = r.instance;
  os << TestCaseName(d.test_case) << ',' << d.dim << ',' << d.n_r << ','
     << d.n_z << ',' << FormatReal(d.cond) << ',' << FormatReal(d.level) << ','
     << SolverName(r.solver) << ',' << r.seed_index << ',' << r.seed << ','
     << FormatReal(r.best_cost) << ',' << FormatReal(r.best_f) << ','
     << FormatReal(r.best_g) << ',' << (r.feasible ? 1 : 0) << ','
     << r.evaluations_used << ',' << TerminationName(r.termination) << ',';
  for (Eigen::Index i = 0; i < r.best_x.size(); ++i) {
    if (i > 0) os << ' ';
    os << FormatReal(r.best_x(i));
  }
  os << ',' << FormatReal(r.wall_time);
  return os.str();
}

RunRecord ParseRunRecordCsvRow(std::string_view line) {
  if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
  const std::vector<std::string_view> f = SplitCsv(line);
  if (f.size() != 17) {
    throw std::invalid_argument("run record row: expected 17 fields, got " +
                                std::to_string(f.size()));
  }
  RunRecord r;
  r.instance.test_case = ParseTestCase(f[0]);
  r.instance.dim = ParseInt<int>(f[1]);
  r.instance.n_r = ParseInt<int>(f[2]);
  r.instance.n_z = ParseInt<int>(f[3]);
  r.instance.cond = ParseDouble(f[4]);
  r.instance.level = ParseDouble(f[5]);
  r.solver = ParseSolver(f[6]);
  r.seed_index = ParseInt<int>(f[7]);
  r.seed = ParseInt<std::uint64_t>(f[8]);
  r.best_cost = ParseDouble(f[9]);
  r.best_f = ParseDouble(f[10]);
  r.best_g = ParseDouble(f[11]);
  r.feasible = ParseInt<int>(f[12]) != 0;
  r.evaluations_used = ParseInt<std::int64_t>(f[13]);
  r.termination = ParseTermination(f[14]);
  std::vector<double> xs;
  std::istringstream xin{std::string(f[15])};
  std::string tok;
  while (xin >> tok) xs.push_back(ParseDouble(tok));
  r.best_x = Eigen::Map<VectorXd>(xs.data(), static_cast<Eigen::Index>(xs.size()));
  r.wall_time = ParseDouble(f[16]);
  return r;
}

void WriteRunRecordsCsv(std::ostream& os, const std::vector<RunRecord>& rows) {
  os << kRunCsvHeader << '\n';
  for (const RunRecord& r : rows) os << RunRecordCsvRow(r) << '\n';
}

std::vector<RunRecord> ReadRunRecordsCsv(std::istream& is) {
  std::string line;
  if (!std::getline(is, line)) return {};
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != kRunCsvHeader) {
    throw std::invalid_argument("run record CSV: unexpected header");
  }
  std::vector<RunRecord> rows;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    rows.push_back(ParseRunRecordCsvRow(line));
  }
  return rows;
}

bool RunRecordLess(const RunRecord& a, const RunRecord& b) {
  if (DescriptorLess(a.instance, b.instance)) return true;
  if (DescriptorLess(b.instance, a.instance)) return false;
  return std::tuple(static_cast<int>(a.solver), a.seed_index) <
         std::tuple(static_cast<int>(b.solver), b.seed_index);
}

std::string CheckRunRecordInvariants(const RunRecord& r) {
  const double level = r.instance.level;
  if (r.best_x.size() != r.instance.dim) return "best_x length != D";
  if (r.instance.n_r + r.instance.n_z != r.instance.dim) return "n_r + n_z != D";
  // Solvers flag feasibility with the exact test g <= E; the 1e-9 slack
  // only absorbs values parsed back from text.
  if (r.feasible && !(r.best_g <= level + 1e-9)) {
    return "feasible row with best_g > E + 1e-9";
  }
  if (!r.feasible && r.best_g <= level) {
    return "infeasible row with best_g <= E";
  }
  if (r.feasible && r.best_cost != r.best_f) {
    return "feasible row with best_cost != best_f";
  }
  if (!r.feasible && !(r.best_cost >= r.best_f)) {
    return "infeasible row with best_cost < best_f";
  }
  for (int i = r.instance.n_r; i < r.instance.dim; ++i) {
    if (r.best_x(i) != std::round(r.best_x(i))) {
      return "integer coordinate is not integral";
    }
  }
  if (r.evaluations_used < 0) return "negative evaluation count";
  return {};
}

}  // namespace miqcqp
