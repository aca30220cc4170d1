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

// Exact reference solutions for small instances.
//
// The continuous subproblem  min (y-a)^T A (y-a)  s.t. (y-b)^T B (y-b) <= E
// is solved through the multiplier nu >= 0 of the constraint: the
// stationary point y(nu) = (A + nu B)^-1 (A a + nu B b) has a constraint
// value that is non-increasing in nu, so bisection on nu finds the
// boundary solution whenever a itself is infeasible.
//
// Mixed instances are solved by depth-first enumeration of the integer
// coordinates inside a certified box. Every node solves the continuous
// relaxation of its subtree (free integers relaxed) and the subtree is
// skipped when that relaxation is infeasible or no better than the
// incumbent. Along one coordinate the relaxed optimum is a convex function
// of the fixed value, so each sweep walks outward from the relaxed value
// and stops at the first pruned child.

#ifndef MIQCQP_ORACLE_H_
#define MIQCQP_ORACLE_H_

#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "miqcqp/quadforms.h"

namespace miqcqp {

enum class OracleStatus { kInterior, kBoundary };

struct OracleSolution {
  VectorXd x_star;
  double f_star = 0.0;
  double g_at_star = 0.0;
  OracleStatus status = OracleStatus::kInterior;
  std::int64_t nodes_enumerated = 0;
  double multiplier = 0.0;  // nu at the final continuous solve
};

class OracleError : public std::runtime_error {
 public:
  enum class Kind { kInfeasible, kEnumerationLimit, kBracketFailure, kNotPositiveDefinite };
  OracleError(Kind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}
  Kind kind() const { return kind_; }

 private:
  Kind kind_;
};

struct IntegerBox {
  std::vector<std::int64_t> lo;
  std::vector<std::int64_t> hi;

  double Volume() const;
  bool Contains(const VectorXd& z) const;
};

inline constexpr int kMaxOracleIntegers = 8;
inline constexpr double kMaxEnumeration = 1e7;

// Exact up to a constraint residual |g - E| <= 1e-10 E; the returned point
// always satisfies g <= E. Requires E > 0 and B positive definite.
OracleSolution SolveContinuousQcqp(const HessianMatrix& a_hessian,
                                   const VectorXd& a_center,
                                   const HessianMatrix& b_hessian,
                                   const VectorXd& b_center, double level);

// [xi1_i - r, xi1_i + r] rounded outward for each integer coordinate, with
// r = sqrt(E / (scale_g * lambda_min(H_g))). Every feasible point lies
// inside.
IntegerBox CertifiedBox(const ProblemInstance& instance);

// Pruned enumeration over z_box (CertifiedBox when omitted). Guards: n_z <=
// kMaxOracleIntegers and at most kMaxEnumeration nodes. Ties within a
// relative 1e-12 go to the lexicographically smallest integer assignment.
OracleSolution SolveMixed(const ProblemInstance& instance,
                          std::optional<IntegerBox> z_box = std::nullopt);

// Reference implementation without pruning: visits every assignment of the
// box (volume <= kMaxEnumeration) and solves each continuous subproblem with
// SolveContinuousQcqp.
OracleSolution SolveMixedNaive(const ProblemInstance& instance,
                               std::optional<IntegerBox> z_box = std::nullopt);

// Fixture cache keyed by InstanceDescriptor::Key(), stored as JSON:
// {"<key>": {"x_star": [...], "f_star": ..., "g_at_star": ...,
//            "status": "interior"|"boundary", "nodes_enumerated": ...}}
class OracleCache {
 public:
  static OracleCache Load(const std::string& path);  // empty if missing
  void Save(const std::string& path) const;

  const OracleSolution* Find(const InstanceDescriptor& d) const;
  void Put(const InstanceDescriptor& d, OracleSolution s);
  std::size_t size() const { return entries_.size(); }

  // Returns the cached solution or solves and caches it. Returns nullptr
  // when the instance is beyond the oracle's reach (guards or limits).
  const OracleSolution* GetOrSolve(const InstanceDescriptor& d);

  std::string ToJson() const;
  static OracleCache FromJson(const std::string& text);

 private:
  std::map<std::string, OracleSolution> entries_;
  std::map<std::string, bool> unreachable_;
};

}  // namespace miqcqp

#endif  // MIQCQP_ORACLE_H_
