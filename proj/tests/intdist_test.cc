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

#include <chrono>
#include <cmath>
#include <stdexcept>

#include "gtest/gtest.h"
#include "miqcqp/random.h"

namespace miqcqp {
namespace {

TEST(PFromMeanStepTest, Examples) {
  EXPECT_EQ(PFromMeanStep(0.0, 1), 1.0);
  EXPECT_EQ(PFromMeanStep(0.0, 7), 1.0);
  EXPECT_NEAR(PFromMeanStep(1.0, 1), 0.5857864376269049, 1e-15);
  EXPECT_EQ(PFromMeanStep(2.0, 2), PFromMeanStep(1.0, 1));
  EXPECT_THROW(PFromMeanStep(-1.0, 1), std::invalid_argument);
  EXPECT_THROW(PFromMeanStep(1.0, 0), std::invalid_argument);
}

TEST(MeanStepFromPTest, Examples) {
  EXPECT_EQ(MeanStepFromP(1.0, 5), 0.0);
  EXPECT_NEAR(MeanStepFromP(2.0 - std::sqrt(2.0), 1), 1.0, 1e-14);
  EXPECT_NEAR(MeanStepFromP(0.5, 1), 4.0 / 3.0, 1e-15);
  EXPECT_THROW(MeanStepFromP(0.0, 1), std::invalid_argument);
  EXPECT_THROW(MeanStepFromP(1.5, 1), std::invalid_argument);
}

TEST(MeanStepFromPTest, RoundTrip) {
  for (int n : {1, 3, 8}) {
    for (double s : {0.01, 0.1, 1.0, 10.0, 100.0}) {
      const double back = MeanStepFromP(PFromMeanStep(s, n), n);
      EXPECT_NEAR(back, s, 1e-12 * s) << s << " " << n;
    }
  }
  for (double p : {0.01, 0.1, 0.3, 0.5, 0.9, 0.999}) {
    EXPECT_NEAR(PFromMeanStep(MeanStepFromP(p, 1), 1), p, 1e-12 * p);
  }
  const DoubleGeometricParam param = DoubleGeometricParam::FromMeanStep(3.0, 2);
  EXPECT_NEAR(param.MeanStep(), 3.0, 1e-12);
}

TEST(SampleGeometricTest, Examples) {
  EXPECT_EQ(SampleGeometric(1.0, 0.3), 0);
  EXPECT_EQ(SampleGeometric(1.0, 0.999), 0);
  // log(0.3) / log(0.5) = 1.7369655941662063
  EXPECT_EQ(SampleGeometric(0.5, 0.7), 1);
  EXPECT_EQ(SampleGeometric(0.5, 0.0), 0);
  EXPECT_EQ(SampleGeometric(0.5, 0.75), 2);
}

TEST(SampleGeometricTest, ClampsHugeSamples) {
  EXPECT_EQ(SampleGeometric(1e-300, 0.9999999999), kMaxGeometricSample);
}

TEST(SampleDoubleGeometricTest, DegenerateIsZero) {
  RandomStream rng(3);
  for (int i = 0; i < 1000; ++i) EXPECT_EQ(SampleDoubleGeometric(1.0, rng), 0);
}

TEST(SampleDoubleGeometricTest, DeterministicPerSeed) {
  RandomStream a(99), b(99);
  for (int i = 0; i < 1000; ++i) {
    EXPECT_EQ(SampleDoubleGeometric(0.3, a), SampleDoubleGeometric(0.3, b));
  }
}

TEST(PmfTest, Examples) {
  EXPECT_EQ(DoubleGeometricPmf(0, 1.0), 1.0);
  EXPECT_EQ(DoubleGeometricPmf(3, 1.0), 0.0);
  EXPECT_NEAR(DoubleGeometricPmf(0, 0.5), 1.0 / 3.0, 1e-16);
  double total = 0.0;
  for (int k = -50; k <= 50; ++k) total += DoubleGeometricPmf(k, 0.5);
  EXPECT_NEAR(total, 1.0, 1e-12);
}

TEST(PmfTest, Symmetric) {
  for (double p : {0.1, 0.3, 0.5, 0.9}) {
    for (int k = 0; k < 40; ++k) {
      EXPECT_EQ(DoubleGeometricPmf(k, p), DoubleGeometricPmf(-k, p));
    }
  }
}

TEST(ChiSquareSurvivalTest, KnownQuantiles) {
  // Upper 5% points of chi-square with 1 and 10 degrees of freedom.
  EXPECT_NEAR(ChiSquareSurvival(3.841458820694124, 1), 0.05, 1e-12);
  EXPECT_NEAR(ChiSquareSurvival(18.307038053275146, 10), 0.05, 1e-12);
  EXPECT_EQ(ChiSquareSurvival(0.0, 4), 1.0);
}

class GoodnessOfFitTest : public ::testing::TestWithParam<double> {};

TEST_P(GoodnessOfFitTest, MillionSamplesMatchPmf) {
  const double p = GetParam();
  RandomStream rng(20260101);
  const auto start = std::chrono::steady_clock::now();
  const GoodnessOfFit fit = TestDoubleGeometric(p, 1000000, rng);
  const double seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  EXPECT_GT(fit.p_value, 1e-3) << "chi2 " << fit.chi_square << " dof "
                               << fit.degrees_of_freedom;
  EXPECT_LT(std::abs(fit.mean), 3.0 * fit.standard_error);
  EXPECT_NEAR(fit.mean_abs, fit.expected_mean_abs, 0.02 * fit.expected_mean_abs);
  EXPECT_NEAR(fit.expected_mean_abs, MeanStepFromP(p, 1), 1e-12 * fit.expected_mean_abs);
  EXPECT_GE(fit.degrees_of_freedom, 1);
  EXPECT_LT(seconds, 10.0);
}

INSTANTIATE_TEST_SUITE_P(Probabilities, GoodnessOfFitTest,
                         ::testing::Values(0.1, 0.3, 0.5, 0.9));

TEST(DoubleGeometricFitTest, HalfHasMeanAbsFourThirds) {
  RandomStream rng(11);
  const GoodnessOfFit fit = TestDoubleGeometric(0.5, 1000000, rng);
  EXPECT_NEAR(fit.expected_mean_abs, 4.0 / 3.0, 1e-15);
  EXPECT_NEAR(fit.mean_abs, 4.0 / 3.0, 0.02 * 4.0 / 3.0);
}

TEST(DoubleGeometricFitTest, SameSeedSameStatistic) {
  RandomStream a(5), b(5);
  EXPECT_EQ(TestDoubleGeometric(0.3, 100000, a).chi_square,
            TestDoubleGeometric(0.3, 100000, b).chi_square);
}

}  // namespace
}  // namespace miqcqp
