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

// Doubly-geometric integer mutation: z = g1 - g2 with g1, g2 i.i.d.
// geometric, Pr{g = k} = p (1 - p)^k. The parameter p is tied to the mean
// step size S = E[|z|_1] of an n_z-dimensional mutation by
//
//   p = 1 - (S/n_z) / (sqrt(1 + (S/n_z)^2) + 1)
//   S = n_z * 2 (1 - p) / (p (2 - p)).

#ifndef MIQCQP_INTDIST_H_
#define MIQCQP_INTDIST_H_

#include <cstdint>
#include <vector>

#include "miqcqp/random.h"

namespace miqcqp {

// Samples are clamped to this magnitude so that integer coordinates stay
// exactly representable as doubles.
inline constexpr std::int64_t kMaxGeometricSample = std::int64_t{1} << 50;

struct DoubleGeometricParam {
  double p = 1.0;
  int n_z = 1;

  static DoubleGeometricParam FromMeanStep(double mean_step, int n_z);
  double MeanStep() const;
};

double PFromMeanStep(double mean_step, int n_z);
double MeanStepFromP(double p, int n_z);

// floor(log(1 - u) / log(1 - p)); 0 when p == 1. u must lie in [0, 1).
std::int64_t SampleGeometric(double p, double u);

std::int64_t SampleDoubleGeometric(double p, RandomStream& rng);
inline std::int64_t SampleDoubleGeometric(const DoubleGeometricParam& param,
                                          RandomStream& rng) {
  return SampleDoubleGeometric(param.p, rng);
}

// Pr{z = k} = p (1 - p)^|k| / (2 - p).
double DoubleGeometricPmf(std::int64_t k, double p);

// Chi-square goodness of fit of the sampler against the pmf. Bins are
// k in [-max_abs_bin, max_abs_bin] plus one tail per side; outer bins whose
// expected count is below 5 are pooled into the tails.
struct GoodnessOfFit {
  double p = 0.0;
  std::int64_t samples = 0;
  double chi_square = 0.0;
  int degrees_of_freedom = 0;
  double p_value = 0.0;
  double mean = 0.0;
  double standard_error = 0.0;
  double mean_abs = 0.0;
  double expected_mean_abs = 0.0;
};

GoodnessOfFit TestDoubleGeometric(double p, std::int64_t samples,
                                  RandomStream& rng, int max_abs_bin = 30);

// Upper tail of the chi-square distribution.
double ChiSquareSurvival(double statistic, int degrees_of_freedom);

}  // namespace miqcqp

#endif  // MIQCQP_INTDIST_H_
