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

// Parametric family of mixed-integer quadratically-constrained quadratic
// programs over unbounded variables:
//
//   minimize    f(x) = (1/c) (x - xi0)^T H_f (x - xi0)
//   subject to  g(x) = (1/c) (x - xi1)^T H_g (x - xi1) <= E
//               x_i integer for the last n_z coordinates.
//
// The Hessians come from two families (cigar and rotated ellipse), each
// built at block size n = D/2 and duplicated on the block diagonal.

#ifndef MIQCQP_QUADFORMS_H_
#define MIQCQP_QUADFORMS_H_

#include <string>
#include <string_view>
#include <vector>

#include "Eigen/Core"

namespace miqcqp {

using Eigen::MatrixXd;
using Eigen::VectorXd;

// Penalty weight multiplying D^2 (g - E)^2 in the black-box cost.
inline constexpr double kPenaltyWeight = 1.0e4;

// Symmetric positive semidefinite matrix. Construction validates both
// properties: |H_ij - H_ji| <= 1e-12 and
// lambda_min >= -1e-9 * lambda_max.
class HessianMatrix {
 public:
  explicit HessianMatrix(MatrixXd entries);

  const MatrixXd& matrix() const { return entries_; }
  int size() const { return static_cast<int>(entries_.rows()); }
  double operator()(int i, int j) const { return entries_(i, j); }

  // Ascending eigenvalues.
  VectorXd Eigenvalues() const;

 private:
  MatrixXd entries_;
};

// scale * (x - center)^T H (x - center).
class QuadraticForm {
 public:
  QuadraticForm(HessianMatrix hessian, VectorXd center, double scale);

  const HessianMatrix& hessian() const { return hessian_; }
  const VectorXd& center() const { return center_; }
  double scale() const { return scale_; }
  int dim() const { return hessian_.size(); }

  double Evaluate(const VectorXd& x) const;

 private:
  HessianMatrix hessian_;
  VectorXd center_;
  double scale_;
};

enum class TestCase { kTC0, kTC1, kTC2, kTC3, kSphere };

std::string_view TestCaseName(TestCase tc);
// Accepts "TC0".."TC3" and "SPHERE" (case-insensitive).
TestCase ParseTestCase(std::string_view name);

// Flat record identifying an instance. Used as CSV key and fixture key.
struct InstanceDescriptor {
  TestCase test_case = TestCase::kTC0;
  int dim = 0;
  int n_r = 0;
  int n_z = 0;
  double cond = 1.0;
  double level = 0.0;

  // Stable textual key, e.g. "TC0/D8/nr4/nz4/c10/E30".
  std::string Key() const;

  friend bool operator==(const InstanceDescriptor&,
                         const InstanceDescriptor&) = default;
};

// Strict weak order: test case, D, n_r, n_z, c, E.
bool DescriptorLess(const InstanceDescriptor& a, const InstanceDescriptor& b);

struct Evaluation {
  double f = 0.0;
  double g = 0.0;
  double cost = 0.0;
  bool feasible = false;
};

// Immutable after construction; safe to share between threads.
class ProblemInstance {
 public:
  ProblemInstance(QuadraticForm objective, QuadraticForm constraint,
                  double level, int n_r, int n_z, TestCase test_case,
                  double cond);

  const QuadraticForm& objective() const { return objective_; }
  const QuadraticForm& constraint() const { return constraint_; }
  double level() const { return level_; }
  int dim() const { return n_r_ + n_z_; }
  int num_continuous() const { return n_r_; }
  int num_integer() const { return n_z_; }
  TestCase test_case() const { return test_case_; }
  double cond() const { return cond_; }

  // 0-based indices n_r .. D-1.
  std::vector<int> IntegerIndices() const;
  bool IsInteger(int index) const { return index >= n_r_; }

  InstanceDescriptor descriptor() const;

  double Objective(const VectorXd& x) const;
  double Constraint(const VectorXd& x) const;
  double PenalizedCost(const VectorXd& x) const;
  Evaluation Evaluate(const VectorXd& x) const;

  // f + 1e4 D^2 Theta(g - E) (g - E)^2 with Theta(0) = 0.
  double CostFrom(double f, double g) const;

 private:
  void CheckDim(const VectorXd& x) const;

  QuadraticForm objective_;
  QuadraticForm constraint_;
  double level_;
  int n_r_;
  int n_z_;
  TestCase test_case_;
  double cond_;
};

// diag(1, c, ..., c).
HessianMatrix BuildCigar(int n, double c);

// diag(c^((i-1)/(n-1))), i = 1..n. Requires n >= 2.
HessianMatrix BuildEllipse(int n, double c);

// Rotation by theta in the plane spanned by the normalized alternating
// vectors u = (1,0,1,0,...) and v = (0,1,0,1,...).
MatrixXd BuildPlaneRotation(int n, double theta);

// R diag_ellipse R^T with theta = pi/4.
HessianMatrix BuildRotatedEllipse(int n, double c);

// blockdiag(H, H).
HessianMatrix BlockConcat(const HessianMatrix& h);

// Alternating centers (+7,-7,...) and (-4,+4,...).
VectorXd ObjectiveCenter(int dim);
VectorXd ConstraintCenter(int dim);

ProblemInstance MakeInstance(TestCase test_case, int dim, double cond,
                             double level, bool all_integer = false);

// Identity Hessians with unit scale around the same centers.
ProblemInstance MakeSphereInstance(int dim, double level,
                                   bool all_integer = false);

// Dispatches on descriptor.test_case; n_r == 0 selects the all-integer
// variant.
ProblemInstance MakeInstance(const InstanceDescriptor& descriptor);

}  // namespace miqcqp

#endif  // MIQCQP_QUADFORMS_H_
