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

#include <algorithm>
#include <cctype>
#include <cmath>
#include <numbers>
#include <sstream>
#include <stdexcept>
#include <tuple>
#include <utility>

#include "Eigen/Eigenvalues"

namespace miqcqp {
namespace {

constexpr double kSymmetryTol = 1e-12;
constexpr double kPsdRelTol = 1e-9;

std::string FormatNumber(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

HessianMatrix ForTestCase(bool rotated, int n, double c) {
  return BlockConcat(rotated ? BuildRotatedEllipse(n, c) : BuildCigar(n, c));
}

}  // namespace

HessianMatrix::HessianMatrix(MatrixXd entries) : entries_(std::move(entries)) {
  if (entries_.rows() != entries_.cols() || entries_.rows() == 0) {
    throw std::invalid_argument("HessianMatrix: expected a non-empty square matrix");
  }
  if (!entries_.allFinite()) {
    throw std::invalid_argument("HessianMatrix: non-finite entry");
  }
  const double asym = (entries_ - entries_.transpose()).cwiseAbs().maxCoeff();
  if (asym > kSymmetryTol) {
    throw std::invalid_argument("HessianMatrix: not symmetric");
  }
  const VectorXd ev = Eigenvalues();
  if (ev(0) < -kPsdRelTol * std::max(0.0, ev(ev.size() - 1))) {
    throw std::invalid_argument("HessianMatrix: not positive semidefinite");
  }
}

VectorXd HessianMatrix::Eigenvalues() const {
  Eigen::SelfAdjointEigenSolver<MatrixXd> solver(entries_,
                                                 Eigen::EigenvaluesOnly);
  return solver.eigenvalues();
}

QuadraticForm::QuadraticForm(HessianMatrix hessian, VectorXd center,
                             double scale)
    : hessian_(std::move(hessian)), center_(std::move(center)), scale_(scale) {
  if (center_.size() != hessian_.size()) {
    throw std::invalid_argument("QuadraticForm: center/hessian size mismatch");
  }
  if (!(scale_ > 0.0) || !std::isfinite(scale_)) {
    throw std::invalid_argument("QuadraticForm: scale must be positive");
  }
}

double QuadraticForm::Evaluate(const VectorXd& x) const {
  if (x.size() != center_.size()) {
    throw std::invalid_argument("QuadraticForm: dimension mismatch");
  }
  const VectorXd y = x - center_;
  return scale_ * y.dot(hessian_.matrix() * y);
}

std::string_view TestCaseName(TestCase tc) {
  switch (tc) {
    case TestCase::kTC0:
      return "TC0";
    case TestCase::kTC1:
      return "TC1";
    case TestCase::kTC2:
      return "TC2";
    case TestCase::kTC3:
      return "TC3";
    case TestCase::kSphere:
      return "SPHERE";
  }
  return "?";
}

TestCase ParseTestCase(std::string_view name) {
  std::string upper(name);
  std::transform(upper.begin(), upper.end(), upper.begin(),
                 [](unsigned char ch) { return std::toupper(ch); });
  for (TestCase tc : {TestCase::kTC0, TestCase::kTC1, TestCase::kTC2,
                      TestCase::kTC3, TestCase::kSphere}) {
    if (upper == TestCaseName(tc)) return tc;
  }
  throw std::invalid_argument("unknown test case: " + std::string(name));
}

std::string InstanceDescriptor::Key() const {
  std::ostringstream os;
  os << TestCaseName(test_case) << "/D" << dim << "/nr" << n_r << "/nz" << n_z
     << "/c" << FormatNumber(cond) << "/E" << FormatNumber(level);
  return os.str();
}

bool DescriptorLess(const InstanceDescriptor& a, const InstanceDescriptor& b) {
  return std::tuple(static_cast<int>(a.test_case), a.dim, a.n_r, a.n_z, a.cond,
                    a.level) < std::tuple(static_cast<int>(b.test_case), b.dim,
                                          b.n_r, b.n_z, b.cond, b.level);
}

ProblemInstance::ProblemInstance(QuadraticForm objective,
                                 QuadraticForm constraint, double level,
                                 int n_r, int n_z, TestCase test_case,
                                 double cond)
    : objective_(std::move(objective)),
      constraint_(std::move(constraint)),
      level_(level),
      n_r_(n_r),
      n_z_(n_z),
      test_case_(test_case),
      cond_(cond) {
  if (n_r_ < 0 || n_z_ < 0 || n_r_ + n_z_ == 0) {
    throw std::invalid_argument("ProblemInstance: invalid dimension split");
  }
  if (objective_.dim() != dim() || constraint_.dim() != dim()) {
    throw std::invalid_argument("ProblemInstance: form dimension != n_r + n_z");
  }
  if (!(level_ > 0.0)) {
    throw std::invalid_argument("ProblemInstance: constraint level must be > 0");
  }
}

std::vector<int> ProblemInstance::IntegerIndices() const {
  std::vector<int> idx(n_z_);
  for (int i = 0; i < n_z_; ++i) idx[i] = n_r_ + i;
  return idx;
}

InstanceDescriptor ProblemInstance::descriptor() const {
  return {test_case_, dim(), n_r_, n_z_, cond_, level_};
}

void ProblemInstance::CheckDim(const VectorXd& x) const {
  if (x.size() != dim()) {
    throw std::invalid_argument("ProblemInstance: dimension mismatch");
  }
}

double ProblemInstance::Objective(const VectorXd& x) const {
  CheckDim(x);
  return objective_.Evaluate(x);
}

double ProblemInstance::Constraint(const VectorXd& x) const {
  CheckDim(x);
  return constraint_.Evaluate(x);
}

double ProblemInstance::CostFrom(double f, double g) const {
  if (g > level_) {
    const double excess = g - level_;
    const double d = static_cast<double>(dim());
    return f + kPenaltyWeight * d * d * excess * excess;
  }
  return f;
}

double ProblemInstance::PenalizedCost(const VectorXd& x) const {
  return Evaluate(x).cost;
}

Evaluation ProblemInstance::Evaluate(const VectorXd& x) const {
  CheckDim(x);
  Evaluation e;
  e.f = objective_.Evaluate(x);
  e.g = constraint_.Evaluate(x);
  e.cost = CostFrom(e.f, e.g);
  e.feasible = e.g <= level_;
  return e;
}

HessianMatrix BuildCigar(int n, double c) {
  if (n < 1) throw std::invalid_argument("BuildCigar: n must be >= 1");
  if (!(c >= 1.0)) throw std::invalid_argument("BuildCigar: c must be >= 1");
  VectorXd diag = VectorXd::Constant(n, c);
  diag(0) = 1.0;
  return HessianMatrix(diag.asDiagonal());
}

HessianMatrix BuildEllipse(int n, double c) {
  if (n < 2) throw std::invalid_argument("BuildEllipse: n must be >= 2");
  if (!(c >= 1.0)) throw std::invalid_argument("BuildEllipse: c must be >= 1");
  VectorXd diag(n);
  for (int i = 0; i < n; ++i) {
    diag(i) = std::pow(c, static_cast<double>(i) / (n - 1));
  }
  return HessianMatrix(diag.asDiagonal());
}

MatrixXd BuildPlaneRotation(int n, double theta) {
  if (n < 2) throw std::invalid_argument("BuildPlaneRotation: n must be >= 2");
  VectorXd u = VectorXd::Zero(n);
  VectorXd v = VectorXd::Zero(n);
  for (int i = 0; i < n; ++i) (i % 2 == 0 ? u : v)(i) = 1.0;
  u.normalize();
  v.normalize();
  return MatrixXd::Identity(n, n) +
         (std::cos(theta) - 1.0) * (u * u.transpose() + v * v.transpose()) +
         std::sin(theta) * (v * u.transpose() - u * v.transpose());
}

HessianMatrix BuildRotatedEllipse(int n, double c) {
  const HessianMatrix ellipse = BuildEllipse(n, c);
  const MatrixXd r = BuildPlaneRotation(n, std::numbers::pi / 4.0);
  const MatrixXd h = r * ellipse.matrix() * r.transpose();
  return HessianMatrix(0.5 * (h + h.transpose()));
}

HessianMatrix BlockConcat(const HessianMatrix& h) {
  const int n = h.size();
  MatrixXd out = MatrixXd::Zero(2 * n, 2 * n);
  out.topLeftCorner(n, n) = h.matrix();
  out.bottomRightCorner(n, n) = h.matrix();
  return HessianMatrix(std::move(out));
}

VectorXd ObjectiveCenter(int dim) {
  VectorXd xi(dim);
  for (int i = 0; i < dim; ++i) xi(i) = (i % 2 == 0) ? 7.0 : -7.0;
  return xi;
}

VectorXd ConstraintCenter(int dim) {
  VectorXd xi(dim);
  for (int i = 0; i < dim; ++i) xi(i) = (i % 2 == 0) ? -4.0 : 4.0;
  return xi;
}

ProblemInstance MakeInstance(TestCase test_case, int dim, double cond,
                             double level, bool all_integer) {
  if (test_case == TestCase::kSphere) {
    throw std::invalid_argument("MakeInstance: use MakeSphereInstance");
  }
  if (dim < 4 || dim % 2 != 0) {
    throw std::invalid_argument("MakeInstance: D must be even and >= 4");
  }
  if (!(cond >= 1.0)) throw std::invalid_argument("MakeInstance: c must be >= 1");
  if (!(level > 0.0)) throw std::invalid_argument("MakeInstance: E must be > 0");
  const int n = dim / 2;
  bool rotated_f = false;
  bool rotated_g = false;
  switch (test_case) {
    case TestCase::kTC0:
      break;
    case TestCase::kTC1:
      rotated_f = true;
      break;
    case TestCase::kTC2:
      rotated_g = true;
      break;
    case TestCase::kTC3:
      rotated_f = rotated_g = true;
      break;
    case TestCase::kSphere:
      break;
  }
  const double scale = 1.0 / cond;
  QuadraticForm f(ForTestCase(rotated_f, n, cond), ObjectiveCenter(dim), scale);
  QuadraticForm g(ForTestCase(rotated_g, n, cond), ConstraintCenter(dim), scale);
  const int n_r = all_integer ? 0 : n;
  return ProblemInstance(std::move(f), std::move(g), level, n_r, dim - n_r,
                         test_case, cond);
}

ProblemInstance MakeSphereInstance(int dim, double level, bool all_integer) {
  if (dim < 2 || dim % 2 != 0) {
    throw std::invalid_argument("MakeSphereInstance: D must be even and >= 2");
  }
  if (!(level > 0.0)) {
    throw std::invalid_argument("MakeSphereInstance: E must be > 0");
  }
  const HessianMatrix id(MatrixXd::Identity(dim, dim));
  QuadraticForm f(id, ObjectiveCenter(dim), 1.0);
  QuadraticForm g(id, ConstraintCenter(dim), 1.0);
  const int n_r = all_integer ? 0 : dim / 2;
  return ProblemInstance(std::move(f), std::move(g), level, n_r, dim - n_r,
                         TestCase::kSphere, 1.0);
}

ProblemInstance MakeInstance(const InstanceDescriptor& d) {
  const bool all_integer = d.n_r == 0;
  ProblemInstance inst =
      d.test_case == TestCase::kSphere
          ? MakeSphereInstance(d.dim, d.level, all_integer)
          : MakeInstance(d.test_case, d.dim, d.cond, d.level, all_integer);
  if (inst.num_continuous() != d.n_r || inst.num_integer() != d.n_z) {
    throw std::invalid_argument("descriptor split is not n_r = n_z = D/2 or n_r = 0: " +
                                d.Key());
  }
  return inst;
}

}  // namespace miqcqp
