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

#ifndef MIQCQP_BEST_SO_FAR_H_
#define MIQCQP_BEST_SO_FAR_H_

#include <limits>

#include "miqcqp/quadforms.h"
#include "miqcqp/run_record.h"

namespace miqcqp {

// Archive of the best evaluated candidate of a run. Feasible candidates
// beat infeasible ones; within a class lower cost wins, then lower g, and
// the earlier candidate keeps its place on a full tie. Also tracks the
// lowest penalized cost seen regardless of feasibility.
class BestSoFar {
 public:
  void Offer(const VectorXd& x, const Evaluation& e) {
    if (e.cost < lowest_cost_) lowest_cost_ = e.cost;
    if (!has_ || Better(e, best_)) {
      has_ = true;
      best_ = e;
      x_ = x;
    }
  }

  bool has_value() const { return has_; }
  const Evaluation& evaluation() const { return best_; }
  const VectorXd& x() const { return x_; }
  double lowest_cost() const { return lowest_cost_; }

  void FillRecord(RunRecord& r) const {
    r.best_cost = best_.cost;
    r.best_f = best_.f;
    r.best_g = best_.g;
    r.feasible = best_.feasible;
    r.best_x = x_;
  }

 private:
  static bool Better(const Evaluation& a, const Evaluation& b) {
    if (a.feasible != b.feasible) return a.feasible;
    if (a.cost != b.cost) return a.cost < b.cost;
    return a.g < b.g;
  }

  bool has_ = false;
  Evaluation best_;
  VectorXd x_;
  double lowest_cost_ = std::numeric_limits<double>::infinity();
};

}  // namespace miqcqp

#endif  // MIQCQP_BEST_SO_FAR_H_
