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

#include <algorithm>
#include <atomic>
#include <numeric>
#include <ostream>
#include <set>
#include <stdexcept>
#include <thread>

#include "json.hpp"
#include "miqcqp/random.h"

namespace miqcqp {
namespace {

using nlohmann::json;

void CheckKeys(const json& obj, std::initializer_list<const char*> allowed,
               const char* where) {
  for (const auto& [key, value] : obj.items()) {
    if (std::find_if(allowed.begin(), allowed.end(),
                     [&](const char* a) { return key == a; }) == allowed.end()) {
      throw std::invalid_argument(std::string("config: unknown key '") + key +
                                  "' in " + where);
    }
  }
}

template <typename T>
std::vector<T> AsList(const json& v) {
  if (v.is_array()) return v.get<std::vector<T>>();
  return {v.get<T>()};
}

std::vector<InstanceDescriptor> DistinctInstances(const ExperimentConfig& config) {
  std::vector<InstanceDescriptor> out;
  for (const Cell& c : ExpandCells(config)) {
    if (out.empty() || !(out.back() == c.instance)) out.push_back(c.instance);
  }
  return out;
}

}  // namespace

void ExperimentConfig::Validate() const {
  if (seeds < 0) throw std::invalid_argument("config: seeds must be >= 0");
  if (budget < 0) throw std::invalid_argument("config: budget must be >= 0");
  for (int d : dims) {
    if (d < 2 || d % 2 != 0) throw std::invalid_argument("config: D must be even");
  }
  for (double c : conds) {
    if (!(c >= 1.0)) throw std::invalid_argument("config: c must be >= 1");
  }
  for (double e : levels) {
    if (!(e > 0.0)) throw std::invalid_argument("config: E must be > 0");
  }
  mies.Validate();
  cma.Validate();
}

ExperimentConfig ApplyConfigJson(ExperimentConfig base, const std::string& json_text) {
  const json root = json::parse(json_text);
  if (!root.is_object()) throw std::invalid_argument("config: expected a JSON object");
  CheckKeys(root,
            {"test_cases", "dims", "conds", "levels", "solvers", "seeds", "budget",
             "all_integer", "trace", "threads", "mies", "cma"},
            "config");
  if (root.contains("test_cases")) {
    base.test_cases.clear();
    for (const auto& s : AsList<std::string>(root["test_cases"])) {
      base.test_cases.push_back(ParseTestCase(s));
    }
  }
  if (root.contains("dims")) base.dims = AsList<int>(root["dims"]);
  if (root.contains("conds")) base.conds = AsList<double>(root["conds"]);
  if (root.contains("levels")) base.levels = AsList<double>(root["levels"]);
  if (root.contains("solvers")) {
    base.solvers.clear();
    for (const auto& s : AsList<std::string>(root["solvers"])) {
      base.solvers.push_back(ParseSolver(s));
    }
  }
  if (root.contains("seeds")) base.seeds = root["seeds"].get<int>();
  if (root.contains("budget")) base.budget = root["budget"].get<std::int64_t>();
  if (root.contains("all_integer")) base.all_integer = root["all_integer"].get<bool>();
  if (root.contains("trace")) base.trace = root["trace"].get<bool>();
  if (root.contains("threads")) base.threads = root["threads"].get<int>();
  if (root.contains("mies")) {
    const json& m = root["mies"];
    CheckKeys(m,
              {"mu", "lambda", "selection", "mean_step_divisor", "init_lo", "init_hi",
               "init_s", "init_q"},
              "mies");
    if (m.contains("mu")) base.mies.mu = m["mu"].get<int>();
    if (m.contains("lambda")) base.mies.lambda = m["lambda"].get<int>();
    if (m.contains("selection")) {
      const auto s = m["selection"].get<std::string>();
      if (s != "comma" && s != "plus") {
        throw std::invalid_argument("config: selection must be comma or plus");
      }
      base.mies.selection = s == "comma" ? mies::Selection::kComma : mies::Selection::kPlus;
    }
    if (m.contains("mean_step_divisor")) {
      const auto s = m["mean_step_divisor"].get<std::string>();
      if (s != "one" && s != "n_z") {
        throw std::invalid_argument("config: mean_step_divisor must be one or n_z");
      }
      base.mies.mean_step_divisor =
          s == "one" ? mies::MeanStepDivisor::kOne : mies::MeanStepDivisor::kNz;
    }
    if (m.contains("init_lo")) base.mies.init_lo = m["init_lo"].get<double>();
    if (m.contains("init_hi")) base.mies.init_hi = m["init_hi"].get<double>();
    if (m.contains("init_s")) base.mies.init_s = m["init_s"].get<double>();
    if (m.contains("init_q")) base.mies.init_q = m["init_q"].get<double>();
  }
  if (root.contains("cma")) {
    const json& c = root["cma"];
    CheckKeys(c,
              {"lambda", "integer_min_std", "tol_fun", "tol_x", "init_sigma", "init_lo",
               "init_hi"},
              "cma");
    if (c.contains("lambda")) base.cma.lambda = c["lambda"].get<int>();
    if (c.contains("integer_min_std")) {
      base.cma.integer_min_std = c["integer_min_std"].get<double>();
    }
    if (c.contains("tol_fun")) base.cma.tol_fun = c["tol_fun"].get<double>();
    if (c.contains("tol_x")) base.cma.tol_x = c["tol_x"].get<double>();
    if (c.contains("init_sigma")) base.cma.init_sigma = c["init_sigma"].get<double>();
    if (c.contains("init_lo")) base.cma.init_lo = c["init_lo"].get<double>();
    if (c.contains("init_hi")) base.cma.init_hi = c["init_hi"].get<double>();
  }
  base.Validate();
  return base;
}

std::vector<Cell> ExpandCells(const ExperimentConfig& config) {
  std::vector<Cell> cells;
  for (TestCase tc : config.test_cases) {
    for (int dim : config.dims) {
      const int n_r = config.all_integer ? 0 : dim / 2;
      const std::vector<double> conds =
          tc == TestCase::kSphere ? std::vector<double>{1.0} : config.conds;
      for (double c : conds) {
        for (double e : config.levels) {
          for (SolverKind s : config.solvers) {
            cells.push_back({{tc, dim, n_r, dim - n_r, c, e}, s});
          }
        }
      }
    }
  }
  std::sort(cells.begin(), cells.end(), [](const Cell& a, const Cell& b) {
    if (DescriptorLess(a.instance, b.instance)) return true;
    if (DescriptorLess(b.instance, a.instance)) return false;
    return static_cast<int>(a.solver) < static_cast<int>(b.solver);
  });
  cells.erase(std::unique(cells.begin(), cells.end(),
                          [](const Cell& a, const Cell& b) {
                            return a.instance == b.instance && a.solver == b.solver;
                          }),
              cells.end());
  return cells;
}

std::uint64_t DeriveSeed(const InstanceDescriptor& d, int seed_index) {
  const std::string text = d.Key() + "#" + std::to_string(seed_index);
  return Fnv1a64(text.data(), text.size());
}

RunRecord RunSingle(const ProblemInstance& instance, SolverKind solver,
                    const ExperimentConfig& config, int seed_index,
                    std::vector<TraceRow>* trace) {
  const std::uint64_t seed = DeriveSeed(instance.descriptor(), seed_index);
  RunRecord r;
  if (solver == SolverKind::kMies) {
    mies::Config mc = config.mies;
    mc.budget = config.budget;
    r = mies::Run(instance, mc, seed, trace);
  } else {
    cma::Config cc = config.cma;
    cc.budget = config.budget;
    r = cma::Run(instance, cc, seed, trace);
  }
  r.seed_index = seed_index;
  return r;
}

void ComputeReferences(const ExperimentConfig& config, OracleCache& references) {
  for (const InstanceDescriptor& d : DistinctInstances(config)) {
    references.GetOrSolve(d);
  }
}

MatrixResult RunMatrix(const ExperimentConfig& config, OracleCache& references) {
  config.Validate();
  ComputeReferences(config, references);

  struct Job {
    Cell cell;
    int seed_index;
  };
  std::vector<Job> jobs;
  for (const Cell& c : ExpandCells(config)) {
    for (int s = 0; s < config.seeds; ++s) jobs.push_back({c, s});
  }

  MatrixResult result;
  result.records.resize(jobs.size());
  result.traces.resize(config.trace ? jobs.size() : 0);

  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next.fetch_add(1); i < jobs.size(); i = next.fetch_add(1)) {
      const ProblemInstance inst = MakeInstance(jobs[i].cell.instance);
      std::vector<TraceRow>* trace = config.trace ? &result.traces[i] : nullptr;
      result.records[i] =
          RunSingle(inst, jobs[i].cell.solver, config, jobs[i].seed_index, trace);
    }
  };
  unsigned threads = config.threads > 0 ? static_cast<unsigned>(config.threads)
                                        : std::max(1u, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, std::max<std::size_t>(1, jobs.size())));
  {
    std::vector<std::jthread> pool;
    for (unsigned t = 1; t < threads; ++t) pool.emplace_back(worker);
    worker();
  }

  // Jobs were generated in sorted order already; keep the sort as the
  // contract in case cell expansion changes.
  std::vector<std::size_t> order(jobs.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return RunRecordLess(result.records[a], result.records[b]);
  });
  MatrixResult sorted;
  sorted.records.reserve(jobs.size());
  for (std::size_t i : order) {
    sorted.records.push_back(std::move(result.records[i]));
    if (config.trace) sorted.traces.push_back(std::move(result.traces[i]));
  }
  sorted.summary = Summarize(sorted.records, references);
  return sorted;
}

void WriteTraceCsv(std::ostream& os, const MatrixResult& result) {
  os << kTraceCsvHeader << '\n';
  for (std::size_t i = 0; i < result.traces.size(); ++i) {
    const RunRecord& r = result.records[i];
    const InstanceDescriptor& d = r.instance;
    for (const TraceRow& t : result.traces[i]) {
      os << TestCaseName(d.test_case) << ',' << d.dim << ',' << d.n_r << ','
         << d.n_z << ',' << FormatReal(d.cond) << ',' << FormatReal(d.level) << ','
         << SolverName(r.solver) << ',' << r.seed_index << ',' << t.generation << ','
         << t.evaluations << ',' << FormatReal(t.best_cost) << ','
         << FormatReal(t.sigma) << ',' << FormatReal(t.min_integer_std) << '\n';
    }
  }
}

}  // namespace miqcqp
