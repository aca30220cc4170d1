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

#include "miqcqp/oracle.h"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include "Eigen/Cholesky"
#include "Eigen/Eigenvalues"
#include "json.hpp"

namespace miqcqp {
namespace {

constexpr double kResidualTol = 1e-10;
constexpr double kMaxMultiplier = 1e15;
constexpr double kLeafFeasibilityTol = 1e-12;
constexpr double kTieTol = 1e-12;
constexpr double kPruneTol = 1e-9;

struct ContinuousResult {
  VectorXd y;
  double g = 0.0;
  double nu = 0.0;
  bool boundary = false;
};

// Shared bisection on the multiplier. constraint_at(nu) returns the
// constraint value of y(nu) and stores whatever the caller needs to
// rebuild y(nu) for the returned multiplier.
template <typename ConstraintAt>
double BisectMultiplier(double level, ConstraintAt&& constraint_at) {
  double lo = 0.0;
  double hi = 1.0;
  double g_hi = constraint_at(hi);
  while (g_hi > level) {
    lo = hi;
    hi *= 2.0;
    if (hi > kMaxMultiplier) {
      throw OracleError(OracleError::Kind::kBracketFailure,
                        "oracle: no multiplier bracket within [0, 1e15]");
    }
    g_hi = constraint_at(hi);
  }
  for (int it = 0; it < 500 && g_hi < level * (1.0 - kResidualTol); ++it) {
    const double mid = 0.5 * (lo + hi);
    if (!(mid > lo && mid < hi)) break;
    const double g_mid = constraint_at(mid);
    if (g_mid > level) {
      lo = mid;
    } else {
      hi = mid;
      g_hi = g_mid;
    }
  }
  return hi;
}

// Direct route: factor A + nu B at every trial multiplier.
std::optional<ContinuousResult> SolveDirect(const MatrixXd& a_mat,
                                            const VectorXd& a,
                                            const MatrixXd& b_mat,
                                            const VectorXd& b, double level) {
  const VectorXd d0 = a - b;
  const double g0 = d0.dot(b_mat * d0);
  if (g0 <= level) return ContinuousResult{a, g0, 0.0, false};
  if (level < 0.0) return std::nullopt;
  if (level == 0.0) {
    return ContinuousResult{b, 0.0, std::numeric_limits<double>::infinity(), true};
  }
  const auto n = a.size();
  const VectorXd w = a_mat * d0;
  const double jitter = 1e-12 * (a_mat.trace() + b_mat.trace());
  auto offset = [&](double nu) -> VectorXd {
    MatrixXd m = a_mat + nu * b_mat;
    Eigen::LLT<MatrixXd> llt(m);
    if (llt.info() != Eigen::Success) {
      m += jitter * MatrixXd::Identity(n, n);
      llt.compute(m);
      if (llt.info() != Eigen::Success) {
        throw OracleError(OracleError::Kind::kNotPositiveDefinite,
                          "oracle: A + nu B is singular");
      }
    }
    return llt.solve(w);
  };
  const double nu = BisectMultiplier(level, [&](double trial) {
    const VectorXd d = offset(trial);
    return d.dot(b_mat * d);
  });
  const VectorXd d = offset(nu);
  return ContinuousResult{b + d, d.dot(b_mat * d), nu, true};
}

void CheckPositiveDefinite(const MatrixXd& m, const char* what) {
  Eigen::LLT<MatrixXd> llt(m);
  if (llt.info() != Eigen::Success) {
    throw OracleError(OracleError::Kind::kNotPositiveDefinite, what);
  }
}

MatrixXd Gather(const MatrixXd& m, const std::vector<int>& rows,
                const std::vector<int>& cols) {
  MatrixXd out(rows.size(), cols.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (std::size_t j = 0; j < cols.size(); ++j) out(i, j) = m(rows[i], cols[j]);
  }
  return out;
}

VectorXd Gather(const VectorXd& v, const std::vector<int>& idx) {
  VectorXd out(idx.size());
  for (std::size_t i = 0; i < idx.size(); ++i) out(i) = v(idx[i]);
  return out;
}

// Restriction of scale * (x - xi)^T H (x - xi) to the free coordinates U
// with the fixed coordinates F held at given values:
//   scale * (u - center)^T H_UU (u - center) + offset,
//   center = xi_U - H_UU^-1 H_UF (x_F - xi_F),
//   offset = scale * y_F^T (H_FF - H_FU H_UU^-1 H_UF) y_F.
struct Conditioner {
  MatrixXd gain;   // H_UU^-1 H_UF
  MatrixXd schur;  // scale * (H_FF - H_FU H_UU^-1 H_UF)
  MatrixXd free_block;  // scale * H_UU
  VectorXd xi_free;
  VectorXd xi_fixed;

  Conditioner(const QuadraticForm& form, const std::vector<int>& free_idx,
              const std::vector<int>& fixed_idx) {
    const MatrixXd& h = form.hessian().matrix();
    const double s = form.scale();
    const MatrixXd h_uu = Gather(h, free_idx, free_idx);
    const MatrixXd h_uf = Gather(h, free_idx, fixed_idx);
    const MatrixXd h_ff = Gather(h, fixed_idx, fixed_idx);
    xi_free = Gather(form.center(), free_idx);
    xi_fixed = Gather(form.center(), fixed_idx);
    free_block = s * h_uu;
    if (free_idx.empty()) {
      gain = MatrixXd::Zero(0, fixed_idx.size());
      schur = s * h_ff;
      return;
    }
    Eigen::LDLT<MatrixXd> ldlt(h_uu);
    if (ldlt.info() != Eigen::Success || !ldlt.isPositive()) {
      throw OracleError(OracleError::Kind::kNotPositiveDefinite,
                        "oracle: free Hessian block is not positive definite");
    }
    gain = ldlt.solve(h_uf);
    schur = s * (h_ff - h_uf.transpose() * gain);
    schur = 0.5 * (schur + schur.transpose()).eval();
  }

  void Apply(const VectorXd& fixed_values, VectorXd& center, double& offset) const {
    const VectorXd y = fixed_values - xi_fixed;
    center = xi_free - gain * y;
    offset = y.dot(schur * y);
  }
};

struct Relaxation {
  bool feasible = false;
  double bound = 0.0;  // relaxed objective
  VectorXd u;          // free coordinates
  double nu = 0.0;
  bool boundary = false;
};

// Per-depth data: integer coordinates n_r .. n_r+k-1 fixed.
class DepthModel {
 public:
  DepthModel(const ProblemInstance& inst, int depth) {
    const int n_r = inst.num_continuous();
    const int dim = inst.dim();
    for (int i = 0; i < dim; ++i) {
      if (i >= n_r && i < n_r + depth) {
        fixed_.push_back(i);
      } else {
        free_.push_back(i);
      }
    }
    objective_.emplace(inst.objective(), free_, fixed_);
    constraint_.emplace(inst.constraint(), free_, fixed_);
    if (!free_.empty()) {
      Eigen::GeneralizedSelfAdjointEigenSolver<MatrixXd> ges(
          objective_->free_block, constraint_->free_block);
      if (ges.info() != Eigen::Success) {
        throw OracleError(OracleError::Kind::kNotPositiveDefinite,
                          "oracle: generalized eigensolver failed");
      }
      basis_ = ges.eigenvectors();  // basis^T B basis = I
      curvature_ = ges.eigenvalues().cwiseMax(0.0);
      to_basis_ = basis_.transpose() * constraint_->free_block;
    }
  }

  const std::vector<int>& free_indices() const { return free_; }
  const std::vector<int>& fixed_indices() const { return fixed_; }

  // Relaxed subproblem in generalized eigen-coordinates u = b + basis t:
  // minimize sum_i lambda_i (t_i - c_i)^2 subject to |t|^2 <= E'.
  Relaxation Solve(const VectorXd& fixed_values, double level) const {
    Relaxation r;
    VectorXd a, b;
    double f_offset = 0.0;
    double g_offset = 0.0;
    objective_->Apply(fixed_values, a, f_offset);
    constraint_->Apply(fixed_values, b, g_offset);
    const double residual_level = level - g_offset;
    if (residual_level < 0.0) return r;
    r.feasible = true;
    if (free_.empty()) {
      r.bound = f_offset;
      r.u = VectorXd(0);
      return r;
    }
    const VectorXd c = to_basis_ * (a - b);
    const auto n = c.size();
    VectorXd t(n);
    for (Eigen::Index i = 0; i < n; ++i) t(i) = curvature_(i) > 0.0 ? c(i) : 0.0;
    if (t.squaredNorm() > residual_level) {
      r.boundary = true;
      if (residual_level == 0.0) {
        t.setZero();
        r.nu = std::numeric_limits<double>::infinity();
      } else {
        auto t_at = [&](double nu) {
          for (Eigen::Index i = 0; i < n; ++i) {
            t(i) = curvature_(i) * c(i) / (curvature_(i) + nu);
          }
          return t.squaredNorm();
        };
        r.nu = BisectMultiplier(residual_level, t_at);
        t_at(r.nu);
      }
    }
    r.bound = f_offset + (curvature_.array() * (t - c).array().square()).sum();
    r.u = b + basis_ * t;
    return r;
  }

 private:
  std::vector<int> free_;
  std::vector<int> fixed_;
  std::optional<Conditioner> objective_;
  std::optional<Conditioner> constraint_;
  MatrixXd basis_;
  VectorXd curvature_;
  MatrixXd to_basis_;
};

bool LexLess(const std::vector<std::int64_t>& a, const std::vector<std::int64_t>& b) {
  return std::lexicographical_compare(a.begin(), a.end(), b.begin(), b.end());
}

// Keeps the best leaf with the shared tie rule.
class Incumbent {
 public:
  void Offer(const ProblemInstance& inst, const VectorXd& x,
             const std::vector<std::int64_t>& assignment, double nu,
             bool boundary) {
    const Evaluation e = inst.Evaluate(x);
    if (e.g > inst.level() * (1.0 + kLeafFeasibilityTol)) return;
    if (has_) {
      const double tol = kTieTol * std::max(1.0, std::abs(best_.f_star));
      if (e.f > best_.f_star + tol) return;
      if (e.f >= best_.f_star - tol && !LexLess(assignment, assignment_)) return;
    }
    has_ = true;
    assignment_ = assignment;
    best_.x_star = x;
    best_.f_star = e.f;
    best_.g_at_star = e.g;
    best_.multiplier = nu;
    best_.status = (boundary || e.g >= inst.level()) ? OracleStatus::kBoundary
                                                      : OracleStatus::kInterior;
  }

  bool has_value() const { return has_; }
  double value() const {
    return has_ ? best_.f_star : std::numeric_limits<double>::infinity();
  }
  OracleSolution Take(std::int64_t nodes) {
    if (!has_) {
      throw OracleError(OracleError::Kind::kInfeasible,
                        "oracle: no feasible integer assignment");
    }
    best_.nodes_enumerated = nodes;
    return best_;
  }

 private:
  bool has_ = false;
  std::vector<std::int64_t> assignment_;
  OracleSolution best_;
};

class PrunedEnumeration {
 public:
  PrunedEnumeration(const ProblemInstance& inst, const IntegerBox& box)
      : inst_(inst), box_(box), n_r_(inst.num_continuous()), n_z_(inst.num_integer()) {
    depths_.reserve(n_z_ + 1);
    for (int k = 0; k <= n_z_; ++k) depths_.emplace_back(inst, k);
  }

  OracleSolution Run() {
    std::vector<std::int64_t> assignment;
    assignment.reserve(n_z_);
    const Relaxation root = Relax(assignment);
    if (!root.feasible) {
      throw OracleError(OracleError::Kind::kInfeasible,
                        "oracle: constraint set is empty");
    }
    Explore(assignment, root);
    return incumbent_.Take(nodes_);
  }

 private:
  Relaxation Relax(const std::vector<std::int64_t>& assignment) {
    if (++nodes_ > static_cast<std::int64_t>(kMaxEnumeration)) {
      throw OracleError(OracleError::Kind::kEnumerationLimit,
                        "oracle: enumeration guard exceeded");
    }
    VectorXd fixed(assignment.size());
    for (std::size_t i = 0; i < assignment.size(); ++i) {
      fixed(i) = static_cast<double>(assignment[i]);
    }
    return depths_[assignment.size()].Solve(fixed, inst_.level());
  }

  bool Prunable(const Relaxation& r) const {
    if (!r.feasible) return true;
    if (!incumbent_.has_value()) return false;
    const double inc = incumbent_.value();
    return r.bound > inc + kPruneTol * std::max(1.0, std::abs(inc));
  }

  void Explore(std::vector<std::int64_t>& assignment, const Relaxation& relax) {
    const int depth = static_cast<int>(assignment.size());
    const DepthModel& model = depths_[depth];
    if (depth == n_z_) {
      VectorXd x(inst_.dim());
      const auto& free_idx = model.free_indices();
      for (std::size_t i = 0; i < free_idx.size(); ++i) x(free_idx[i]) = relax.u(i);
      for (int j = 0; j < n_z_; ++j) x(n_r_ + j) = static_cast<double>(assignment[j]);
      incumbent_.Offer(inst_, x, assignment, relax.nu, relax.boundary);
      return;
    }
    // The next integer coordinate sits right after the continuous block
    // among the free coordinates.
    const double relaxed_value = relax.u(n_r_);
    const auto start = static_cast<std::int64_t>(std::floor(relaxed_value));
    const std::int64_t lo = box_.lo[depth];
    const std::int64_t hi = box_.hi[depth];
    for (int direction : {-1, +1}) {
      std::int64_t v = direction < 0 ? start : start + 1;
      for (; v >= lo && v <= hi; v += direction) {
        assignment.push_back(v);
        const Relaxation child = Relax(assignment);
        if (Prunable(child)) {
          assignment.pop_back();
          break;
        }
        Explore(assignment, child);
        assignment.pop_back();
      }
    }
  }

  const ProblemInstance& inst_;
  const IntegerBox& box_;
  int n_r_;
  int n_z_;
  std::vector<DepthModel> depths_;
  Incumbent incumbent_;
  std::int64_t nodes_ = 0;
};

void CheckOracleReach(const ProblemInstance& inst, const IntegerBox& box) {
  if (inst.num_integer() > kMaxOracleIntegers) {
    throw OracleError(OracleError::Kind::kEnumerationLimit,
                      "oracle: more than 8 integer coordinates");
  }
  if (static_cast<int>(box.lo.size()) != inst.num_integer() ||
      box.hi.size() != box.lo.size()) {
    throw std::invalid_argument("oracle: box does not match n_z");
  }
}

OracleSolution FromDirect(const ContinuousResult& r, const MatrixXd& a_mat,
                          const VectorXd& a) {
  OracleSolution s;
  s.x_star = r.y;
  const VectorXd d = r.y - a;
  s.f_star = d.dot(a_mat * d);
  s.g_at_star = r.g;
  s.multiplier = r.nu;
  s.status = r.boundary ? OracleStatus::kBoundary : OracleStatus::kInterior;
  s.nodes_enumerated = 1;
  return s;
}

const char* StatusName(OracleStatus s) {
  return s == OracleStatus::kInterior ? "interior" : "boundary";
}

}  // namespace

double IntegerBox::Volume() const {
  double v = 1.0;
  for (std::size_t i = 0; i < lo.size(); ++i) {
    v *= static_cast<double>(hi[i] - lo[i] + 1);
  }
  return v;
}

bool IntegerBox::Contains(const VectorXd& z) const {
  if (static_cast<std::size_t>(z.size()) != lo.size()) return false;
  for (std::size_t i = 0; i < lo.size(); ++i) {
    const double v = z(static_cast<Eigen::Index>(i));
    if (v < static_cast<double>(lo[i]) || v > static_cast<double>(hi[i])) return false;
  }
  return true;
}

OracleSolution SolveContinuousQcqp(const HessianMatrix& a_hessian,
                                   const VectorXd& a_center,
                                   const HessianMatrix& b_hessian,
                                   const VectorXd& b_center, double level) {
  const int n = a_hessian.size();
  if (b_hessian.size() != n || a_center.size() != n || b_center.size() != n) {
    throw std::invalid_argument("oracle: dimension mismatch");
  }
  if (!(level > 0.0)) throw std::invalid_argument("oracle: level must be > 0");
  CheckPositiveDefinite(b_hessian.matrix(), "oracle: constraint Hessian is not PD");
  const auto r = SolveDirect(a_hessian.matrix(), a_center, b_hessian.matrix(),
                             b_center, level);
  return FromDirect(*r, a_hessian.matrix(), a_center);
}

IntegerBox CertifiedBox(const ProblemInstance& inst) {
  const QuadraticForm& g = inst.constraint();
  const double lambda_min = g.hessian().Eigenvalues()(0);
  if (!(lambda_min > 0.0)) {
    throw OracleError(OracleError::Kind::kNotPositiveDefinite,
                      "oracle: constraint Hessian is not positive definite");
  }
  const double radius = std::sqrt(inst.level() / (g.scale() * lambda_min));
  IntegerBox box;
  for (int i : inst.IntegerIndices()) {
    const double c = g.center()(i);
    box.lo.push_back(static_cast<std::int64_t>(std::floor(c - radius)));
    box.hi.push_back(static_cast<std::int64_t>(std::ceil(c + radius)));
  }
  return box;
}

OracleSolution SolveMixed(const ProblemInstance& inst,
                          std::optional<IntegerBox> z_box) {
  if (inst.num_integer() == 0) {
    return SolveContinuousQcqp(
        HessianMatrix(inst.objective().scale() * inst.objective().hessian().matrix()),
        inst.objective().center(),
        HessianMatrix(inst.constraint().scale() * inst.constraint().hessian().matrix()),
        inst.constraint().center(), inst.level());
  }
  const IntegerBox box = z_box ? *z_box : CertifiedBox(inst);
  CheckOracleReach(inst, box);
  PrunedEnumeration search(inst, box);
  return search.Run();
}

OracleSolution SolveMixedNaive(const ProblemInstance& inst,
                               std::optional<IntegerBox> z_box) {
  if (inst.num_integer() == 0) return SolveMixed(inst);
  const IntegerBox box = z_box ? *z_box : CertifiedBox(inst);
  CheckOracleReach(inst, box);
  if (box.Volume() > kMaxEnumeration) {
    throw OracleError(OracleError::Kind::kEnumerationLimit,
                      "oracle: box volume exceeds enumeration guard");
  }
  const int n_r = inst.num_continuous();
  const int n_z = inst.num_integer();
  std::vector<int> cont(n_r);
  std::vector<int> ints(n_z);
  for (int i = 0; i < n_r; ++i) cont[i] = i;
  for (int j = 0; j < n_z; ++j) ints[j] = n_r + j;
  std::optional<Conditioner> fc;
  std::optional<Conditioner> gc;
  if (n_r > 0) {
    fc.emplace(inst.objective(), cont, ints);
    gc.emplace(inst.constraint(), cont, ints);
  }

  Incumbent incumbent;
  std::int64_t nodes = 0;
  std::vector<std::int64_t> z(box.lo);
  VectorXd x(inst.dim());
  while (true) {
    ++nodes;
    for (int j = 0; j < n_z; ++j) x(n_r + j) = static_cast<double>(z[j]);
    if (n_r == 0) {
      incumbent.Offer(inst, x, z, 0.0, false);
    } else {
      VectorXd a, b;
      double f_off = 0.0;
      double g_off = 0.0;
      const VectorXd zv = x.tail(n_z);
      fc->Apply(zv, a, f_off);
      gc->Apply(zv, b, g_off);
      const auto r = SolveDirect(fc->free_block, a, gc->free_block, b,
                                 inst.level() - g_off);
      if (r) {
        x.head(n_r) = r->y;
        incumbent.Offer(inst, x, z, r->nu, r->boundary);
      }
    }
    int j = n_z - 1;
    while (j >= 0 && z[j] == box.hi[j]) {
      z[j] = box.lo[j];
      --j;
    }
    if (j < 0) break;
    ++z[j];
  }
  return incumbent.Take(nodes);
}

const OracleSolution* OracleCache::Find(const InstanceDescriptor& d) const {
  const auto it = entries_.find(d.Key());
  return it == entries_.end() ? nullptr : &it->second;
}

void OracleCache::Put(const InstanceDescriptor& d, OracleSolution s) {
  entries_[d.Key()] = std::move(s);
}

const OracleSolution* OracleCache::GetOrSolve(const InstanceDescriptor& d) {
  if (const OracleSolution* hit = Find(d)) return hit;
  const std::string key = d.Key();
  if (unreachable_.count(key)) return nullptr;
  try {
    const ProblemInstance inst = MakeInstance(d);
    OracleSolution s = SolveMixed(inst);
    auto [it, inserted] = entries_.emplace(key, std::move(s));
    return &it->second;
  } catch (const OracleError&) {
    unreachable_[key] = true;
    return nullptr;
  }
}

std::string OracleCache::ToJson() const {
  nlohmann::ordered_json root = nlohmann::ordered_json::object();
  for (const auto& [key, s] : entries_) {
    nlohmann::ordered_json e;
    e["x_star"] = std::vector<double>(s.x_star.data(), s.x_star.data() + s.x_star.size());
    e["f_star"] = s.f_star;
    e["g_at_star"] = s.g_at_star;
    e["status"] = StatusName(s.status);
    e["nodes_enumerated"] = s.nodes_enumerated;
    root[key] = std::move(e);
  }
  return root.dump(2);
}

OracleCache OracleCache::FromJson(const std::string& text) {
  OracleCache cache;
  const nlohmann::json root = nlohmann::json::parse(text);
  for (const auto& [key, e] : root.items()) {
    OracleSolution s;
    const auto xs = e.at("x_star").get<std::vector<double>>();
    s.x_star = Eigen::Map<const VectorXd>(xs.data(), static_cast<Eigen::Index>(xs.size()));
    s.f_star = e.at("f_star").get<double>();
    s.g_at_star = e.at("g_at_star").get<double>();
    const std::string status = e.at("status").get<std::string>();
    if (status != "interior" && status != "boundary") {
      throw std::invalid_argument("oracle fixture: bad status for " + key);
    }
    s.status = status == "interior" ? OracleStatus::kInterior : OracleStatus::kBoundary;
    s.nodes_enumerated = e.value("nodes_enumerated", std::int64_t{0});
    cache.entries_[key] = std::move(s);
  }
  return cache;
}

OracleCache OracleCache::Load(const std::string& path) {
  std::ifstream in(path);
  if (!in) return {};
  std::stringstream ss;
  ss << in.rdbuf();
  return FromJson(ss.str());
}

void OracleCache::Save(const std::string& path) const {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write oracle fixtures: " + path);
  out << ToJson() << '\n';
}

}  // namespace miqcqp
