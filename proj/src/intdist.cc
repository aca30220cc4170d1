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

#include "miqcqp/intdist.h"

#include <cmath>
#include <stdexcept>

#include "boost/math/special_functions/gamma.hpp"

namespace miqcqp {
namespace {

void CheckP(double p) {
  if (!(p > 0.0 && p <= 1.0)) {
    throw std::invalid_argument("geometric parameter p must lie in (0, 1]");
  }
}

void CheckNz(int n_z) {
  if (n_z < 1) throw std::invalid_argument("n_z must be >= 1");
}

}  // namespace

DoubleGeometricParam DoubleGeometricParam::FromMeanStep(double mean_step,
                                                        int n_z) {
  return {PFromMeanStep(mean_step, n_z), n_z};
}

double DoubleGeometricParam::MeanStep() const { return MeanStepFromP(p, n_z); }

double PFromMeanStep(double mean_step, int n_z) {
  CheckNz(n_z);
  if (!(mean_step >= 0.0) || std::isinf(mean_step)) {
    throw std::invalid_argument("mean step must be finite and >= 0");
  }
  const double t = mean_step / n_z;
  return 1.0 - t / (std::sqrt(1.0 + t * t) + 1.0);
}

double MeanStepFromP(double p, int n_z) {
  CheckNz(n_z);
  CheckP(p);
  return n_z * 2.0 * (1.0 - p) / (p * (2.0 - p));
}

std::int64_t SampleGeometric(double p, double u) {
  CheckP(p);
  if (!(u >= 0.0 && u < 1.0)) {
    throw std::invalid_argument("uniform draw must lie in [0, 1)");
  }
  if (p == 1.0) return 0;
  const double g = std::floor(std::log1p(-u) / std::log1p(-p));
  if (!(g < static_cast<double>(kMaxGeometricSample))) {
    return kMaxGeometricSample;
  }
  return static_cast<std::int64_t>(g);
}

std::int64_t SampleDoubleGeometric(double p, RandomStream& rng) {
  CheckP(p);
  if (p == 1.0) return 0;
  const std::int64_t g1 = SampleGeometric(p, rng.Uniform());
  const std::int64_t g2 = SampleGeometric(p, rng.Uniform());
  return g1 - g2;
}

double DoubleGeometricPmf(std::int64_t k, double p) {
  CheckP(p);
  const double a = static_cast<double>(k < 0 ? -k : k);
  if (p == 1.0) return k == 0 ? 1.0 : 0.0;
  return p * std::pow(1.0 - p, a) / (2.0 - p);
}

double ChiSquareSurvival(double statistic, int degrees_of_freedom) {
  if (degrees_of_freedom < 1) {
    throw std::invalid_argument("chi-square needs at least one degree of freedom");
  }
  if (statistic <= 0.0) return 1.0;
  return boost::math::gamma_q(0.5 * degrees_of_freedom, 0.5 * statistic);
}

GoodnessOfFit TestDoubleGeometric(double p, std::int64_t samples,
                                  RandomStream& rng, int max_abs_bin) {
  CheckP(p);
  if (samples < 1) throw std::invalid_argument("need at least one sample");
  const double n = static_cast<double>(samples);

  // Shrink [lo, hi] until every inner bin and both tails expect >= 5
  // counts. One-sided tail mass beyond hi is (1 - p)^(hi + 1) / (2 - p).
  int hi = max_abs_bin;
  while (hi > 0 && (n * DoubleGeometricPmf(hi, p) < 5.0 ||
                    n * std::pow(1.0 - p, hi + 1) / (2.0 - p) < 5.0)) {
    --hi;
  }
  const int lo = -hi;

  std::vector<double> observed(2 * hi + 3, 0.0);  // [left tail, inner, right tail]
  double sum = 0.0;
  double sum_sq = 0.0;
  double sum_abs = 0.0;
  for (std::int64_t i = 0; i < samples; ++i) {
    const std::int64_t z = SampleDoubleGeometric(p, rng);
    const double zd = static_cast<double>(z);
    sum += zd;
    sum_sq += zd * zd;
    sum_abs += std::abs(zd);
    if (z < lo) {
      observed.front() += 1.0;
    } else if (z > hi) {
      observed.back() += 1.0;
    } else {
      observed[static_cast<std::size_t>(z - lo + 1)] += 1.0;
    }
  }

  std::vector<double> expected(observed.size());
  double inner_mass = 0.0;
  for (int k = lo; k <= hi; ++k) {
    const double m = DoubleGeometricPmf(k, p);
    expected[static_cast<std::size_t>(k - lo + 1)] = n * m;
    inner_mass += m;
  }
  // Each tail holds half of the remaining mass by symmetry.
  const double tail = 0.5 * std::max(0.0, 1.0 - inner_mass);
  expected.front() = n * tail;
  expected.back() = n * tail;

  GoodnessOfFit out;
  out.p = p;
  out.samples = samples;
  int bins = 0;
  for (std::size_t i = 0; i < observed.size(); ++i) {
    if (expected[i] <= 0.0) continue;
    const double d = observed[i] - expected[i];
    out.chi_square += d * d / expected[i];
    ++bins;
  }
  out.degrees_of_freedom = std::max(1, bins - 1);
  out.p_value = ChiSquareSurvival(out.chi_square, out.degrees_of_freedom);
  out.mean = sum / n;
  const double var = std::max(0.0, sum_sq / n - out.mean * out.mean);
  out.standard_error = std::sqrt(var / n);
  out.mean_abs = sum_abs / n;
  out.expected_mean_abs = MeanStepFromP(p, 1);
  return out;
}

}  // namespace miqcqp
