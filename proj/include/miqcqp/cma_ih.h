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

// CMA-ES with integer handling. All D coordinates share one covariance
// matrix; sampled candidates have their integer coordinates rounded before
// evaluation, while the unrounded samples drive the adaptation. After each
// update the per-coordinate standard deviation sigma*sqrt(C_ii) of every
// integer coordinate is lifted to at least integer_min_std, which keeps a
// non-vanishing chance of leaving an integer plateau.
//
// Strategy constants follow the usual defaults: lambda = 4 + floor(3 ln D),
// mu = lambda / 2, log-linear weights, cumulative step-size adaptation and
// rank-one plus rank-mu covariance updates.

#ifndef MIQCQP_CMA_IH_H_
#define MIQCQP_CMA_IH_H_

#include <cstdint>
#include <span>
#include <vector>

#include "miqcqp/quadforms.h"
#include "miqcqp/random.h"
#include "miqcqp/run_record.h"

namespace miqcqp::cma {

struct Config {
  int lambda = 0;  // 0 selects 4 + floor(3 ln D)
  std::int64_t budget = 20000;
  double integer_min_std = 0.2;
  // Stop when the best costs of the last 10 + ceil(30 D / lambda)
  // generations span at most tol_fun.
  double tol_fun = 1e-9;
  // Stop when sigma * max sqrt(C_ii) over continuous coordinates drops
  // below tol_x. A value <= 0 selects 1e-11 * init_sigma.
  double tol_x = 0.0;
  double init_sigma = 5.0;
  double init_lo = -10.0;
  double init_hi = 10.0;

  void Validate() const;
  double EffectiveTolX() const { return tol_x > 0.0 ? tol_x : 1e-11 * init_sigma; }
};

struct StrategyParameters {
  int dim = 0;
  int lambda = 0;
  int mu = 0;
  VectorXd weights;  // non-increasing, sums to 1
  double mu_eff = 0.0;
  double c_sigma = 0.0;
  double d_sigma = 0.0;
  double c_c = 0.0;
  double c_1 = 0.0;
  double c_mu = 0.0;
  double chi_n = 0.0;  // E||N(0, I)||

  static StrategyParameters Defaults(int dim, int lambda = 0);
};

struct CmaState {
  VectorXd mean;
  double sigma = 1.0;
  MatrixXd cov;
  VectorXd path_sigma;
  VectorXd path_c;
  VectorXd weights;
  std::int64_t generation = 0;

  // Eigen cache: cov = basis * diag(axis^2) * basis^T at the last refresh.
  MatrixXd basis;
  VectorXd axis;
  std::int64_t evaluations_at_refresh = 0;

  static CmaState Initial(const VectorXd& mean, double sigma,
                          const VectorXd& weights);
};

struct Population {
  std::vector<VectorXd> raw;      // feeds the update
  std::vector<VectorXd> rounded;  // evaluated
};

// Rounds half away from zero.
double RoundHalfAway(double v);

// Inflates row and column i of cov by the same factor for every i in
// integer_indices with sigma*sqrt(C_ii) < min_std, so that afterwards
// sigma*sqrt(C_ii) == min_std. Returns true when cov changed.
bool EnforceIntegerFloor(CmaState& state, std::span<const int> integer_indices,
                         double min_std);

class CmaIh {
 public:
  CmaIh(int dim, std::vector<int> integer_indices, const Config& config,
        const VectorXd& initial_mean);

  Population Ask(RandomStream& rng) const;

  // costs[k] belongs to population.raw[k]. Throws on non-finite costs.
  void Tell(const Population& population, std::span<const double> costs);

  const CmaState& state() const { return state_; }
  CmaState& mutable_state() { return state_; }
  const StrategyParameters& params() const { return params_; }
  const std::vector<int>& integer_indices() const { return integer_; }

  // min over integer coordinates of sigma*sqrt(C_ii); NaN without any.
  double MinIntegerStd() const;
  // max over continuous coordinates of sigma*sqrt(C_ii); NaN without any.
  double MaxContinuousStd() const;

  std::int64_t evaluations() const { return evaluations_; }

 private:
  void RefreshEigen();

  StrategyParameters params_;
  Config config_;
  std::vector<int> integer_;
  std::vector<bool> is_integer_;
  CmaState state_;
  std::int64_t evaluations_ = 0;
};

// Ask / evaluate / tell until the budget is spent or a tolerance fires. The
// rounded initial mean is always evaluated first.
RunRecord Run(const ProblemInstance& instance, const Config& config,
              std::uint64_t seed, std::vector<TraceRow>* trace = nullptr);

}  // namespace miqcqp::cma

#endif  // MIQCQP_CMA_IH_H_
