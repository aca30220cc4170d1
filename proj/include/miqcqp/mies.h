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

// Self-adaptive mixed-integer evolution strategy. Real coordinates mutate
// with normal steps under log-normally adapted standard deviations s;
// integer coordinates mutate with doubly-geometric steps whose mean step
// sizes q adapt the same way. Recombination is not used. Candidates are
// ranked by the penalized cost of the instance; nothing bounds the search.

#ifndef MIQCQP_MIES_H_
#define MIQCQP_MIES_H_

#include <cstdint>
#include <vector>

#include "miqcqp/quadforms.h"
#include "miqcqp/random.h"
#include "miqcqp/run_record.h"

namespace miqcqp::mies {

using VectorXl = Eigen::Matrix<std::int64_t, Eigen::Dynamic, 1>;

// Lower bound on the real-valued step sizes.
inline constexpr double kMinStepSize = 1e-5;
// Lower bound on the integer mean step sizes.
inline constexpr double kMinMeanStep = 1.0;

enum class Selection { kComma, kPlus };

// How q_i converts to a geometric parameter: p = PFromMeanStep(q_i, n)
// with n = 1 (kOne, per-coordinate mean step) or n = n_z (kNz).
enum class MeanStepDivisor { kOne, kNz };

struct Individual {
  VectorXd x;  // continuous decision variables
  VectorXd s;  // per-coordinate standard deviations, >= kMinStepSize
  VectorXl z;  // integer decision variables
  VectorXd q;  // per-coordinate integer mean steps, >= kMinMeanStep
  Evaluation eval;

  // x followed by z, as evaluated by the instance.
  VectorXd Decision() const;
};

struct Config {
  int mu = 15;
  int lambda = 100;
  Selection selection = Selection::kComma;
  std::int64_t budget = 20000;
  double init_lo = -10.0;
  double init_hi = 10.0;
  double init_s = 1.0;
  double init_q = 1.0;
  MeanStepDivisor mean_step_divisor = MeanStepDivisor::kOne;

  void Validate() const;
};

// Returns a mutated copy; the parent is untouched.
Individual Mutate(const Individual& parent, RandomStream& rng,
                  MeanStepDivisor divisor = MeanStepDivisor::kOne);

// The mu best of the offspring (comma) or of parents followed by offspring
// (plus). Ordering: cost, then constraint value g, then position.
std::vector<Individual> Select(const std::vector<Individual>& parents,
                               const std::vector<Individual>& offspring,
                               const Config& config);

// Uniform initial individual over [init_lo, init_hi] (integers uniform on
// the integer points of that interval).
Individual RandomIndividual(const ProblemInstance& instance,
                            const Config& config, RandomStream& rng);

// Fixed-budget loop. The initial mu parents are always evaluated, so a zero
// budget still reports the best of the initial population.
RunRecord Run(const ProblemInstance& instance, const Config& config,
              std::uint64_t seed, std::vector<TraceRow>* trace = nullptr);

}  // namespace miqcqp::mies

#endif  // MIQCQP_MIES_H_
