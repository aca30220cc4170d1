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

#include "miqcqp/quadforms.h"

#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>

#include "Eigen/Eigenvalues"
#include "gtest/gtest.h"

namespace miqcqp {
namespace {

constexpr double kPi = std::numbers::pi;

MatrixXd Diag(std::initializer_list<double> values) {
  VectorXd v(static_cast<Eigen::Index>(values.size()));
  Eigen::Index i = 0;
  for (double x : values) v(i++) = x;
  return v.asDiagonal();
}

TEST(HessianMatrixTest, RejectsAsymmetricAndIndefinite) {
  MatrixXd a(2, 2);
  a << 1, 0.5, 0.4, 1;
  EXPECT_THROW(HessianMatrix{a}, std::invalid_argument);
  EXPECT_THROW(HessianMatrix{Diag({1, -1})}, std::invalid_argument);
  EXPECT_NO_THROW(HessianMatrix{Diag({0, 1})});
}

TEST(BuildCigarTest, Examples) {
  EXPECT_EQ(BuildCigar(2, 10).matrix(), Diag({1, 10}));
  EXPECT_EQ(BuildCigar(1, 100).matrix(), Diag({1}));
  EXPECT_EQ(BuildCigar(3, 1000).matrix(), Diag({1, 1000, 1000}));
  EXPECT_THROW(BuildCigar(0, 10), std::invalid_argument);
  EXPECT_THROW(BuildCigar(3, 0.5), std::invalid_argument);
}

TEST(BuildEllipseTest, Examples) {
  EXPECT_EQ(BuildEllipse(2, 100).matrix(), Diag({1, 100}));
  EXPECT_TRUE(BuildEllipse(3, 100).matrix().isApprox(Diag({1, 10, 100}), 1e-15));
  EXPECT_TRUE(BuildEllipse(5, 1e4).matrix().isApprox(Diag({1, 10, 100, 1000, 1e4}), 1e-15));
  EXPECT_THROW(BuildEllipse(1, 10), std::invalid_argument);
}

TEST(BuildPlaneRotationTest, TwoByTwoIsGivens) {
  const MatrixXd r = BuildPlaneRotation(2, kPi / 4);
  const double h = std::sqrt(2.0) / 2;
  MatrixXd expected(2, 2);
  expected << h, -h, h, h;
  EXPECT_LE((r - expected).cwiseAbs().maxCoeff(), 1e-15);
}

TEST(BuildPlaneRotationTest, ZeroAngleIsIdentity) {
  EXPECT_EQ(BuildPlaneRotation(4, 0.0), MatrixXd::Identity(4, 4));
}

TEST(BuildPlaneRotationTest, ActsOnSpanVectors) {
  const int n = 4;
  const MatrixXd r = BuildPlaneRotation(n, kPi / 4);
  VectorXd u(n), v(n);
  u << 1, 0, 1, 0;
  v << 0, 1, 0, 1;
  u.normalize();
  v.normalize();
  const VectorXd expected = std::cos(kPi / 4) * u + std::sin(kPi / 4) * v;
  EXPECT_LE((r * u - expected).cwiseAbs().maxCoeff(), 1e-15);
}

TEST(BuildPlaneRotationTest, OrthogonalWithUnitDeterminant) {
  for (int n : {2, 3, 4, 8, 16}) {
    const MatrixXd r = BuildPlaneRotation(n, kPi / 4);
    EXPECT_LE((r * r.transpose() - MatrixXd::Identity(n, n)).cwiseAbs().maxCoeff(), 1e-12);
    EXPECT_NEAR(r.determinant(), 1.0, 1e-9);
  }
}

TEST(BuildRotatedEllipseTest, Examples) {
  MatrixXd expected(2, 2);
  expected << 50.5, -49.5, -49.5, 50.5;
  EXPECT_LE((BuildRotatedEllipse(2, 100).matrix() - expected).cwiseAbs().maxCoeff(), 1e-12);
  EXPECT_LE((BuildRotatedEllipse(2, 1).matrix() - MatrixXd::Identity(2, 2))
                .cwiseAbs()
                .maxCoeff(),
            1e-15);
  // {1, 10^(1/3), 10^(2/3), 10}
  const VectorXd ev = BuildRotatedEllipse(4, 10).Eigenvalues();
  const double frozen[] = {1.0, 2.154434690031884, 4.641588833612779, 10.0};
  for (int i = 0; i < 4; ++i) EXPECT_NEAR(ev(i), frozen[i], 1e-9);
}

TEST(BuildRotatedEllipseTest, SpectrumMatchesEllipse) {
  for (int n : {2, 4, 8}) {
    for (double c : {10.0, 1e3, 1e6}) {
      const VectorXd a = BuildRotatedEllipse(n, c).Eigenvalues();
      const VectorXd b = BuildEllipse(n, c).Eigenvalues();
      for (int i = 0; i < n; ++i) EXPECT_NEAR(a(i), b(i), 1e-9 * b(i)) << n << " " << c;
      const MatrixXd h = BuildRotatedEllipse(n, c).matrix();
      EXPECT_LE((h - h.transpose()).cwiseAbs().maxCoeff(), 1e-12);
    }
  }
}

TEST(BlockConcatTest, Examples) {
  EXPECT_EQ(BlockConcat(HessianMatrix(Diag({1, 10}))).matrix(), Diag({1, 10, 1, 10}));
  EXPECT_EQ(BlockConcat(HessianMatrix(MatrixXd::Identity(2, 2))).matrix(),
            MatrixXd::Identity(4, 4));
}

TEST(BlockConcatTest, DoublesSpectrumMultiplicity) {
  const HessianMatrix h = BuildRotatedEllipse(3, 100);
  const VectorXd base = h.Eigenvalues();
  const VectorXd doubled = BlockConcat(h).Eigenvalues();
  ASSERT_EQ(doubled.size(), 6);
  for (int i = 0; i < 3; ++i) {
    EXPECT_NEAR(doubled(2 * i), base(i), 1e-10 * base(i));
    EXPECT_NEAR(doubled(2 * i + 1), base(i), 1e-10 * base(i));
  }
}

TEST(MakeInstanceTest, Tc0Layout) {
  const ProblemInstance inst = MakeInstance(TestCase::kTC0, 4, 10, 30);
  EXPECT_EQ(inst.objective().hessian().matrix(), Diag({1, 10, 1, 10}));
  EXPECT_EQ(inst.constraint().hessian().matrix(), Diag({1, 10, 1, 10}));
  EXPECT_DOUBLE_EQ(inst.objective().scale(), 0.1);
  VectorXd xi0(4), xi1(4);
  xi0 << 7, -7, 7, -7;
  xi1 << -4, 4, -4, 4;
  EXPECT_EQ(inst.objective().center(), xi0);
  EXPECT_EQ(inst.constraint().center(), xi1);
  EXPECT_EQ(inst.num_continuous(), 2);
  EXPECT_EQ(inst.num_integer(), 2);
  EXPECT_EQ(inst.IntegerIndices(), (std::vector<int>{2, 3}));
  EXPECT_DOUBLE_EQ(inst.level(), 30.0);
}

TEST(MakeInstanceTest, Tc3UsesRotatedBlocksForBothForms) {
  const ProblemInstance inst = MakeInstance(TestCase::kTC3, 4, 100, 50);
  const MatrixXd expected = BlockConcat(BuildRotatedEllipse(2, 100)).matrix();
  EXPECT_EQ(inst.objective().hessian().matrix(), expected);
  EXPECT_EQ(inst.constraint().hessian().matrix(), expected);
}

TEST(MakeInstanceTest, HessianKindsPerTestCase) {
  const MatrixXd cigar = BlockConcat(BuildCigar(4, 1e3)).matrix();
  const MatrixXd rot = BlockConcat(BuildRotatedEllipse(4, 1e3)).matrix();
  struct Row {
    TestCase tc;
    const MatrixXd* f;
    const MatrixXd* g;
  };
  for (const Row& r : {Row{TestCase::kTC0, &cigar, &cigar}, Row{TestCase::kTC1, &rot, &cigar},
                       Row{TestCase::kTC2, &cigar, &rot}, Row{TestCase::kTC3, &rot, &rot}}) {
    const ProblemInstance inst = MakeInstance(r.tc, 8, 1e3, 10);
    EXPECT_EQ(inst.objective().hessian().matrix(), *r.f) << TestCaseName(r.tc);
    EXPECT_EQ(inst.constraint().hessian().matrix(), *r.g) << TestCaseName(r.tc);
  }
}

TEST(MakeInstanceTest, AllIntegerVariant) {
  const ProblemInstance inst = MakeInstance(TestCase::kTC1, 8, 10, 10, true);
  EXPECT_EQ(inst.num_continuous(), 0);
  EXPECT_EQ(inst.num_integer(), 8);
  EXPECT_EQ(inst.IntegerIndices().front(), 0);
}

TEST(MakeInstanceTest, ValuesAtCentersAreZero) {
  for (TestCase tc : {TestCase::kTC0, TestCase::kTC1, TestCase::kTC2, TestCase::kTC3}) {
    const ProblemInstance inst = MakeInstance(tc, 8, 1e6, 10);
    EXPECT_EQ(inst.Objective(ObjectiveCenter(8)), 0.0);
    EXPECT_EQ(inst.Constraint(ConstraintCenter(8)), 0.0);
  }
}

TEST(MakeInstanceTest, RejectsBadArguments) {
  EXPECT_THROW(MakeInstance(TestCase::kTC0, 5, 10, 10), std::invalid_argument);
  EXPECT_THROW(MakeInstance(TestCase::kTC0, 8, 0.5, 10), std::invalid_argument);
  EXPECT_THROW(MakeInstance(TestCase::kTC0, 8, 10, 0), std::invalid_argument);
  EXPECT_THROW(MakeSphereInstance(3, 10), std::invalid_argument);
  EXPECT_THROW(ParseTestCase("TC9"), std::invalid_argument);
}

TEST(MakeInstanceTest, DescriptorRoundTrip) {
  const InstanceDescriptor d{TestCase::kTC2, 8, 4, 4, 1e4, 30};
  EXPECT_EQ(d.Key(), "TC2/D8/nr4/nz4/c10000/E30");
  EXPECT_EQ(MakeInstance(d).descriptor(), d);
  const InstanceDescriptor s{TestCase::kSphere, 2, 0, 2, 1, 10};
  EXPECT_EQ(MakeInstance(s).descriptor(), s);
  EXPECT_EQ(ParseTestCase("sphere"), TestCase::kSphere);
}

TEST(SphereInstanceTest, Examples) {
  const ProblemInstance inst = MakeSphereInstance(4, 10);
  EXPECT_EQ(inst.objective().scale(), 1.0);
  EXPECT_EQ(inst.Constraint(ObjectiveCenter(4)), 484.0);
  const ProblemInstance on_boundary = MakeSphereInstance(4, 484);
  const Evaluation e = on_boundary.Evaluate(ObjectiveCenter(4));
  EXPECT_TRUE(e.feasible);
  EXPECT_EQ(e.cost, 0.0);
  // 1e4 * 16 * 474^2
  EXPECT_EQ(inst.PenalizedCost(ObjectiveCenter(4)), 35948160000.0);
}

TEST(EvaluateTest, SingleCoordinateStep) {
  const ProblemInstance inst = MakeInstance(TestCase::kTC0, 4, 10, 30);
  VectorXd x = ObjectiveCenter(4);
  x(0) += 1.0;
  EXPECT_NEAR(inst.Objective(x), 0.1, 1e-15);
  EXPECT_THROW(inst.Objective(VectorXd::Zero(3)), std::invalid_argument);
}

TEST(EvaluateTest, PenaltyProperties) {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(-12, 12);
  for (TestCase tc : {TestCase::kTC0, TestCase::kTC1, TestCase::kTC2, TestCase::kTC3}) {
    const ProblemInstance inst = MakeInstance(tc, 8, 100, 30);
    for (int k = 0; k < 2000; ++k) {
      VectorXd x(8);
      for (int i = 0; i < 8; ++i) x(i) = u(rng);
      const Evaluation e = inst.Evaluate(x);
      EXPECT_GE(e.cost, e.f);
      EXPECT_EQ(e.cost == e.f, e.g <= inst.level());
      EXPECT_EQ(e.feasible, e.g <= inst.level());
    }
  }
}

TEST(EvaluateTest, PenaltyIsSecondOrderAtBoundary) {
  const ProblemInstance inst = MakeInstance(TestCase::kTC2, 8, 10, 30);
  // Walk from the constraint center toward the objective center until g = E.
  const VectorXd a = ConstraintCenter(8);
  const VectorXd dir = ObjectiveCenter(8) - a;
  double lo = 0, hi = 1;
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    (inst.Constraint(a + mid * dir) > inst.level() ? hi : lo) = mid;
  }
  const VectorXd boundary = a + lo * dir;
  const double h = 1e-4;
  const VectorXd outside = boundary + h * dir.normalized();
  const double excess = inst.PenalizedCost(outside) - inst.Objective(outside);
  EXPECT_GT(excess, 0.0);
  const double g_excess = inst.Constraint(outside) - inst.level();
  EXPECT_NEAR(excess, kPenaltyWeight * 64 * g_excess * g_excess, 1e-9 * excess);
  // Excess of g is O(h), so the penalty is O(h^2).
  EXPECT_LT(excess, kPenaltyWeight * 64 * 100 * h * h);
}

TEST(EvaluateTest, BoundaryIsUnpenalized) {
  const ProblemInstance inst = MakeSphereInstance(2, 121);
  VectorXd x(2);
  x << 7, 4;  // g = 11^2 + 0 = 121 exactly
  const Evaluation e = inst.Evaluate(x);
  EXPECT_EQ(e.g, 121.0);
  EXPECT_TRUE(e.feasible);
  EXPECT_EQ(e.cost, e.f);
}

}  // namespace
}  // namespace miqcqp
