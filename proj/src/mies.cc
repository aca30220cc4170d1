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

#include "miqcqp/mies.h"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "miqcqp/best_so_far.h"
#include "miqcqp/intdist.h"

namespace miqcqp::mies {
namespace {

void EvaluateInto(const ProblemInstance& instance, Individual& ind) {
  ind.eval = instance.Evaluate(ind.Decision());
}

double MinOrNan(const std::vector<Individual>& pop) {
  double m = std::numeric_limits<double>::quiet_NaN();
  for (const Individual& ind : pop) {
    if (ind.q.size() == 0) continue;
    const double v = ind.q.minCoeff();
    if (std::isnan(m) || v < m) m = v;
  }
  return m;
}

double MeanStepSize(const std::vector<Individual>& pop) {
  double sum = 0.0;
  std::int64_t count = 0;
  for (const Individual& ind : pop) {
    sum += ind.s.sum();
    count += ind.s.size();
  }
  return count > 0 ? sum / static_cast<double>(count)
                   : std::numeric_limits<double>::quiet_NaN();
}

}  // namespace

VectorXd Individual::Decision() const {
  VectorXd d(x.size() + z.size());
  d.head(x.size()) = x;
  d.tail(z.size()) = z.cast<double>();
  return d;
}

void Config::Validate() const {
  if (mu < 1 || lambda < mu) {
    throw std::invalid_argument("mies: need lambda >= mu >= 1");
  }
  if (budget < 0) throw std::invalid_argument("mies: negative budget");
  if (!(init_hi >= init_lo)) throw std::invalid_argument("mies: empty init box");
  if (!(init_s >= kMinStepSize)) throw std::invalid_argument("mies: init_s too small");
  if (!(init_q >= kMinMeanStep)) throw std::invalid_argument("mies: init_q < 1");
}

Individual Mutate(const Individual& parent, RandomStream& rng,
                  MeanStepDivisor divisor) {
  Individual child = parent;
  const auto n_r = parent.x.size();
  if (n_r > 0) {
    const double nr = static_cast<double>(n_r);
    const double tau_global = 1.0 / std::sqrt(2.0 * nr);
    const double tau_local = 1.0 / std::sqrt(2.0 * std::sqrt(nr));
    const double global = tau_global * rng.Normal();
    for (Eigen::Index i = 0; i < n_r; ++i) {
      child.s(i) = std::max(
          kMinStepSize, parent.s(i) * std::exp(global + tau_local * rng.Normal()));
      child.x(i) = parent.x(i) + child.s(i) * rng.Normal();
    }
  }
  const auto n_z = parent.z.size();
  if (n_z > 0) {
    const double nz = static_cast<double>(n_z);
    const double tau_global = 1.0 / std::sqrt(2.0 * nz);
    const double tau_local = 1.0 / std::sqrt(2.0 * std::sqrt(nz));
    const double global = tau_global * rng.Normal();
    const int conversion = divisor == MeanStepDivisor::kOne ? 1 : static_cast<int>(n_z);
    for (Eigen::Index i = 0; i < n_z; ++i) {
      double q = parent.q(i) * std::exp(global + tau_local * rng.Normal());
      // exp overflow leaves q at +inf; cap so the conversion stays finite.
      q = std::clamp(q, kMinMeanStep, 1e300);
      child.q(i) = q;
      child.z(i) = parent.z(i) + SampleDoubleGeometric(PFromMeanStep(q, conversion), rng);
    }
  }
  return child;
}

std::vector<Individual> Select(const std::vector<Individual>& parents,
                               const std::vector<Individual>& offspring,
                               const Config& config) {
  std::vector<const Individual*> pool;
  pool.reserve(parents.size() + offspring.size());
  if (config.selection == Selection::kPlus) {
    for (const Individual& p : parents) pool.push_back(&p);
  }
  for (const Individual& o : offspring) pool.push_back(&o);
  std::stable_sort(pool.begin(), pool.end(),
                   [](const Individual* a, const Individual* b) {
                     if (a->eval.cost != b->eval.cost) {
                       return a->eval.cost < b->eval.cost;
                     }
                     return a->eval.g < b->eval.g;
                   });
  const std::size_t keep = std::min<std::size_t>(config.mu, pool.size());
  std::vector<Individual> next;
  next.reserve(keep);
  for (std::size_t i = 0; i < keep; ++i) next.push_back(*pool[i]);
  return next;
}

Individual RandomIndividual(const ProblemInstance& instance,
                            const Config& config, RandomStream& rng) {
  Individual ind;
  const int n_r = instance.num_continuous();
  const int n_z = instance.num_integer();
  ind.x.resize(n_r);
  for (int i = 0; i < n_r; ++i) {
    ind.x(i) = config.init_lo + (config.init_hi - config.init_lo) * rng.Uniform();
  }
  ind.s = VectorXd::Constant(n_r, config.init_s);
  const auto zlo = static_cast<std::int64_t>(std::ceil(config.init_lo));
  const auto zhi = static_cast<std::int64_t>(std::floor(config.init_hi));
  if (n_z > 0 && zlo > zhi) {
    throw std::invalid_argument("mies: init box contains no integer");
  }
  ind.z.resize(n_z);
  for (int i = 0; i < n_z; ++i) ind.z(i) = rng.UniformInt(zlo, zhi);
  ind.q = VectorXd::Constant(n_z, config.init_q);
  return ind;
}

RunRecord Run(const ProblemInstance& instance, const Config& config,
              std::uint64_t seed, std::vector<TraceRow>* trace) {
  config.Validate();
  const auto start = std::chrono::steady_clock::now();
  RandomStream rng(seed);
  BestSoFar best;
  std::int64_t evaluations = 0;

  std::vector<Individual> parents;
  parents.reserve(config.mu);
  for (int i = 0; i < config.mu; ++i) {
    Individual ind = RandomIndividual(instance, config, rng);
    EvaluateInto(instance, ind);
    ++evaluations;
    best.Offer(ind.Decision(), ind.eval);
    parents.push_back(std::move(ind));
  }

  std::int64_t generation = 0;
  auto record_trace = [&] {
    if (trace == nullptr) return;
    trace->push_back({generation, evaluations, best.lowest_cost(),
                      MeanStepSize(parents), MinOrNan(parents)});
  };
  record_trace();

  std::vector<Individual> offspring;
  offspring.reserve(config.lambda);
  while (evaluations < config.budget) {
    offspring.clear();
    for (int k = 0; k < config.lambda && evaluations < config.budget; ++k) {
      const Individual& parent =
          parents[static_cast<std::size_t>(rng.UniformInt(0, config.mu - 1))];
      Individual child = Mutate(parent, rng, config.mean_step_divisor);
      EvaluateInto(instance, child);
      ++evaluations;
      best.Offer(child.Decision(), child.eval);
      offspring.push_back(std::move(child));
    }
    // The budget ran out mid-generation.
    if (static_cast<int>(offspring.size()) < config.lambda) break;
    parents = Select(parents, offspring, config);
    ++generation;
    record_trace();
  }

  RunRecord record;
  record.instance = instance.descriptor();
  record.solver = SolverKind::kMies;
  record.seed = seed;
  record.evaluations_used = evaluations;
  record.termination = Termination::kBudget;
  best.FillRecord(record);
  record.wall_time =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return record;
}

}  // namespace miqcqp::mies
