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

#include "miqcqp/cma_ih.h"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <deque>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "Eigen/Eigenvalues"
#include "miqcqp/best_so_far.h"

namespace miqcqp::cma {
namespace {

constexpr double kEigenFloor = 1e-14;
constexpr double kRescaleAbove = 1e20;
constexpr double kRescaleBelow = 1e-20;

// Moves the magnitude of C into sigma. sigma^2 C, path_sigma and every
// decision of the algorithm are unchanged; only overflow is avoided.
void Rescale(CmaState& s) {
  const double top = s.cov.diagonal().maxCoeff();
  if (!(top > kRescaleAbove || top < kRescaleBelow)) return;
  const double root = std::sqrt(top);
  s.cov /= top;
  s.path_c /= root;
  s.axis /= root;
  s.sigma *= root;
}

}  // namespace

void Config::Validate() const {
  if (lambda != 0 && lambda < 2) throw std::invalid_argument("cma: lambda must be >= 2");
  if (budget < 0) throw std::invalid_argument("cma: negative budget");
  if (!(integer_min_std > 0.0)) {
    throw std::invalid_argument("cma: integer_min_std must be > 0");
  }
  if (!(tol_fun > 0.0)) throw std::invalid_argument("cma: tol_fun must be > 0");
  if (!(init_sigma > 0.0)) throw std::invalid_argument("cma: init_sigma must be > 0");
  if (!(init_hi >= init_lo)) throw std::invalid_argument("cma: empty init box");
}

StrategyParameters StrategyParameters::Defaults(int dim, int lambda) {
  if (dim < 1) throw std::invalid_argument("cma: dim must be >= 1");
  StrategyParameters p;
  const double n = dim;
  p.dim = dim;
  p.lambda = lambda > 0 ? lambda : 4 + static_cast<int>(std::floor(3.0 * std::log(n)));
  p.lambda = std::max(p.lambda, 2);
  p.mu = p.lambda / 2;
  p.weights.resize(p.mu);
  for (int i = 0; i < p.mu; ++i) {
    p.weights(i) = std::log((p.lambda + 1) / 2.0) - std::log(i + 1.0);
  }
  p.weights /= p.weights.sum();
  p.mu_eff = 1.0 / p.weights.squaredNorm();
  p.c_sigma = (p.mu_eff + 2.0) / (n + p.mu_eff + 5.0);
  p.d_sigma = 1.0 + 2.0 * std::max(0.0, std::sqrt((p.mu_eff - 1.0) / (n + 1.0)) - 1.0) +
              p.c_sigma;
  p.c_c = (4.0 + p.mu_eff / n) / (n + 4.0 + 2.0 * p.mu_eff / n);
  p.c_1 = 2.0 / ((n + 1.3) * (n + 1.3) + p.mu_eff);
  p.c_mu = std::min(1.0 - p.c_1, 2.0 * (p.mu_eff - 2.0 + 1.0 / p.mu_eff) /
                                     ((n + 2.0) * (n + 2.0) + p.mu_eff));
  p.chi_n = std::sqrt(n) * (1.0 - 1.0 / (4.0 * n) + 1.0 / (21.0 * n * n));
  return p;
}

CmaState CmaState::Initial(const VectorXd& mean, double sigma,
                           const VectorXd& weights) {
  const auto n = mean.size();
  CmaState s;
  s.mean = mean;
  s.sigma = sigma;
  s.cov = MatrixXd::Identity(n, n);
  s.path_sigma = VectorXd::Zero(n);
  s.path_c = VectorXd::Zero(n);
  s.weights = weights;
  s.basis = MatrixXd::Identity(n, n);
  s.axis = VectorXd::Ones(n);
  return s;
}

double RoundHalfAway(double v) { return std::round(v); }

bool EnforceIntegerFloor(CmaState& state, std::span<const int> integer_indices,
                         double min_std) {
  bool changed = false;
  for (int i : integer_indices) {
    const double std_i = state.sigma * std::sqrt(state.cov(i, i));
    if (std_i >= min_std) continue;
    double factor = min_std / std_i;
    if (!std::isfinite(factor)) {
      // C_ii collapsed to zero: reset the coordinate to an isolated one.
      state.cov.row(i).setZero();
      state.cov.col(i).setZero();
      state.cov(i, i) = (min_std / state.sigma) * (min_std / state.sigma);
      changed = true;
      continue;
    }
    state.cov.row(i) *= factor;
    state.cov.col(i) *= factor;
    // Row and column scaling multiplied C_ii by factor^2; pin it exactly.
    state.cov(i, i) = (min_std / state.sigma) * (min_std / state.sigma);
    if (state.sigma * std::sqrt(state.cov(i, i)) < min_std) {
      state.cov(i, i) = std::nextafter(state.cov(i, i),
                                       std::numeric_limits<double>::infinity());
    }
    changed = true;
  }
  return changed;
}

CmaIh::CmaIh(int dim, std::vector<int> integer_indices, const Config& config,
             const VectorXd& initial_mean)
    : params_(StrategyParameters::Defaults(dim, config.lambda)),
      config_(config),
      integer_(std::move(integer_indices)),
      is_integer_(static_cast<std::size_t>(dim), false) {
  config_.Validate();
  if (initial_mean.size() != dim) {
    throw std::invalid_argument("cma: initial mean has wrong dimension");
  }
  for (int i : integer_) {
    if (i < 0 || i >= dim) throw std::invalid_argument("cma: integer index out of range");
    is_integer_[static_cast<std::size_t>(i)] = true;
  }
  state_ = CmaState::Initial(initial_mean, config_.init_sigma, params_.weights);
  if (EnforceIntegerFloor(state_, integer_, config_.integer_min_std)) RefreshEigen();
}

Population CmaIh::Ask(RandomStream& rng) const {
  const int n = params_.dim;
  Population pop;
  pop.raw.reserve(params_.lambda);
  pop.rounded.reserve(params_.lambda);
  VectorXd z(n);
  for (int k = 0; k < params_.lambda; ++k) {
    for (int i = 0; i < n; ++i) z(i) = rng.Normal();
    VectorXd x = state_.mean + state_.sigma * (state_.basis * state_.axis.cwiseProduct(z));
    VectorXd r = x;
    for (int i : integer_) r(i) = RoundHalfAway(r(i));
    pop.raw.push_back(std::move(x));
    pop.rounded.push_back(std::move(r));
  }
  return pop;
}

void CmaIh::Tell(const Population& population, std::span<const double> costs) {
  const int n = params_.dim;
  const int lambda = params_.lambda;
  if (static_cast<int>(population.raw.size()) != lambda ||
      static_cast<int>(costs.size()) != lambda) {
    throw std::invalid_argument("cma: Tell expects exactly lambda candidates");
  }
  for (double c : costs) {
    if (!std::isfinite(c)) throw std::invalid_argument("cma: non-finite cost");
  }
  std::vector<int> order(lambda);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](int a, int b) { return costs[a] < costs[b]; });

  const StrategyParameters& p = params_;
  CmaState& s = state_;
  const VectorXd old_mean = s.mean;
  MatrixXd steps(n, p.mu);  // (x_i - m_old) / sigma for the mu best
  VectorXd new_mean = VectorXd::Zero(n);
  for (int j = 0; j < p.mu; ++j) {
    const VectorXd& x = population.raw[order[j]];
    new_mean += p.weights(j) * x;
    steps.col(j) = (x - old_mean) / s.sigma;
  }
  s.mean = new_mean;
  const VectorXd mean_step = (new_mean - old_mean) / s.sigma;

  // C^(-1/2) from the cached decomposition.
  const VectorXd inv_axis = s.axis.cwiseInverse();
  const VectorXd whitened =
      s.basis * inv_axis.cwiseProduct(s.basis.transpose() * mean_step);
  s.path_sigma = (1.0 - p.c_sigma) * s.path_sigma +
                 std::sqrt(p.c_sigma * (2.0 - p.c_sigma) * p.mu_eff) * whitened;

  const double gen = static_cast<double>(s.generation + 1);
  const double ps_norm = s.path_sigma.norm();
  const double hsig_denom = std::sqrt(1.0 - std::pow(1.0 - p.c_sigma, 2.0 * gen));
  const bool hsig = ps_norm / hsig_denom < (1.4 + 2.0 / (n + 1.0)) * p.chi_n;

  s.path_c = (1.0 - p.c_c) * s.path_c;
  if (hsig) s.path_c += std::sqrt(p.c_c * (2.0 - p.c_c) * p.mu_eff) * mean_step;

  const double delta_h = hsig ? 0.0 : p.c_c * (2.0 - p.c_c);
  MatrixXd rank_mu = steps * p.weights.asDiagonal() * steps.transpose();
  s.cov = (1.0 - p.c_1 - p.c_mu + p.c_1 * delta_h) * s.cov +
          p.c_1 * (s.path_c * s.path_c.transpose()) + p.c_mu * rank_mu;
  s.cov = 0.5 * (s.cov + s.cov.transpose()).eval();

  s.sigma *= std::exp((p.c_sigma / p.d_sigma) * (ps_norm / p.chi_n - 1.0));
  ++s.generation;
  evaluations_ += lambda;

  const bool floored = EnforceIntegerFloor(s, integer_, config_.integer_min_std);
  Rescale(s);
  const double lag = static_cast<double>(lambda) / ((p.c_1 + p.c_mu) * n * 10.0);
  if (floored || static_cast<double>(evaluations_ - s.evaluations_at_refresh) > lag) {
    RefreshEigen();
  }
}

void CmaIh::RefreshEigen() {
  CmaState& s = state_;
  Eigen::SelfAdjointEigenSolver<MatrixXd> solver(s.cov);
  VectorXd ev = solver.eigenvalues();
  const double top = ev.maxCoeff();
  const double floor = kEigenFloor * std::max(top, 0.0);
  bool repaired = false;
  for (Eigen::Index i = 0; i < ev.size(); ++i) {
    if (!(ev(i) >= floor) || ev(i) <= 0.0) {
      ev(i) = std::max(floor, std::numeric_limits<double>::min());
      repaired = true;
    }
  }
  s.basis = solver.eigenvectors();
  s.axis = ev.cwiseSqrt();
  if (repaired) {
    s.cov = s.basis * ev.asDiagonal() * s.basis.transpose();
    s.cov = 0.5 * (s.cov + s.cov.transpose()).eval();
    // Repair can move diagonal entries; restore the integer floor.
    if (EnforceIntegerFloor(s, integer_, config_.integer_min_std)) {
      Eigen::SelfAdjointEigenSolver<MatrixXd> again(s.cov);
      s.basis = again.eigenvectors();
      s.axis = again.eigenvalues().cwiseMax(floor).cwiseSqrt();
    }
  }
  s.evaluations_at_refresh = evaluations_;
}

double CmaIh::MinIntegerStd() const {
  double m = std::numeric_limits<double>::quiet_NaN();
  for (int i : integer_) {
    const double v = state_.sigma * std::sqrt(state_.cov(i, i));
    if (std::isnan(m) || v < m) m = v;
  }
  return m;
}

double CmaIh::MaxContinuousStd() const {
  double m = std::numeric_limits<double>::quiet_NaN();
  for (int i = 0; i < params_.dim; ++i) {
    if (is_integer_[static_cast<std::size_t>(i)]) continue;
    const double v = state_.sigma * std::sqrt(state_.cov(i, i));
    if (std::isnan(m) || v > m) m = v;
  }
  return m;
}

RunRecord Run(const ProblemInstance& instance, const Config& config,
              std::uint64_t seed, std::vector<TraceRow>* trace) {
  config.Validate();
  const auto start = std::chrono::steady_clock::now();
  RandomStream rng(seed);
  const int dim = instance.dim();

  VectorXd mean(dim);
  for (int i = 0; i < dim; ++i) {
    mean(i) = config.init_lo + (config.init_hi - config.init_lo) * rng.Uniform();
  }
  CmaIh es(dim, instance.IntegerIndices(), config, mean);

  BestSoFar best;
  std::int64_t evaluations = 0;
  {
    VectorXd m = es.state().mean;
    for (int i : es.integer_indices()) m(i) = RoundHalfAway(m(i));
    best.Offer(m, instance.Evaluate(m));
    ++evaluations;
  }
  auto record_trace = [&] {
    if (trace == nullptr) return;
    trace->push_back({es.state().generation, evaluations, best.lowest_cost(),
                      es.state().sigma, es.MinIntegerStd()});
  };
  record_trace();

  const int lambda = es.params().lambda;
  const std::size_t history_len =
      10 + static_cast<std::size_t>(std::ceil(30.0 * dim / lambda));
  std::deque<double> history;
  const double tol_x = config.EffectiveTolX();
  Termination termination = Termination::kBudget;
  std::vector<double> costs(static_cast<std::size_t>(lambda));

  while (evaluations < config.budget) {
    const Population pop = es.Ask(rng);
    double gen_best = std::numeric_limits<double>::infinity();
    int evaluated = 0;
    for (int k = 0; k < lambda && evaluations < config.budget; ++k, ++evaluated) {
      const Evaluation e = instance.Evaluate(pop.rounded[k]);
      ++evaluations;
      best.Offer(pop.rounded[k], e);
      costs[k] = e.cost;
      gen_best = std::min(gen_best, e.cost);
    }
    // The budget ran out mid-generation.
    if (evaluated < lambda) break;
    es.Tell(pop, costs);
    record_trace();

    history.push_back(gen_best);
    if (history.size() > history_len) history.pop_front();
    if (history.size() == history_len) {
      const auto [lo, hi] = std::minmax_element(history.begin(), history.end());
      if (*hi - *lo <= config.tol_fun) {
        termination = Termination::kTolerance;
        break;
      }
    }
    const double max_cont = es.MaxContinuousStd();
    if (!std::isnan(max_cont) && max_cont < tol_x) {
      termination = Termination::kTolerance;
      break;
    }
  }

  RunRecord record;
  record.instance = instance.descriptor();
  record.solver = SolverKind::kCmaIh;
  record.seed = seed;
  record.evaluations_used = evaluations;
  record.termination = termination;
  best.FillRecord(record);
  record.wall_time =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return record;
}

}  // namespace miqcqp::cma
