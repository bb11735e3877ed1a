// Copyright 2026 The rncep Authors
//
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

// Bounded-variable revised simplex.
//
// Every row i gets a logical variable r_i with A x - r = 0 and the row's
// range as bounds on r_i, so the working problem is {A_full z = 0, l <= z <= u}.
// Rows whose starting activity violates the range receive an artificial
// column +-e_i; phase 1 minimizes the sum of artificials, phase 2 the real
// objective with artificials fixed at zero.
//
// The basis is factorized with a sparse LU and updated with eta vectors in
// product form between refactorizations. Pricing is Dantzig's rule; after a
// run of degenerate pivots it switches to Bland's rule until the next
// nondegenerate step. The ratio test is Harris' two-pass variant.

#include <algorithm>
#include <cmath>

#include <Eigen/SparseCore>
#include <Eigen/SparseLU>

#include "rncep/error.hpp"
#include "rncep/lp.hpp"

namespace rncep {
namespace {

using SpMat = Eigen::SparseMatrix<double, Eigen::ColMajor, int>;

enum class VarState : unsigned char { kBasic, kAtLower, kAtUpper, kFree };

constexpr double kDegenerateStep = 1e-11;

double PowerOfTwo(double scale) {
  if (!(scale > 0.0) || !std::isfinite(scale)) return 1.0;
  return std::exp2(std::round(std::log2(scale)));
}

class Simplex {
 public:
  Simplex(const LinearProgram& lp, const SolveOptions& options)
      : lp_(lp), opt_(options), m_(lp.num_rows()), n_(lp.num_cols()) {
    max_iters_ = opt_.max_iters > 0 ? opt_.max_iters : 10 * (m_ + n_) + 10;
  }

  LpSolution Run();

 private:
  enum class PhaseResult { kOptimal, kUnbounded, kIterationLimit };

  void LoadScaled();
  void ComputeScaling(const LinearProgram::Csc& csc);
  void InitialBasis();

  std::size_t VarCount() const { return n_ + m_ + art_row_.size(); }
  bool IsFixed(std::size_t j) const { return lo_[j] == up_[j]; }

  template <typename F>
  void ForEachEntry(std::size_t j, F&& f) const {
    if (j < n_) {
      for (std::size_t p = start_[j]; p < start_[j + 1]; ++p) f(index_[p], value_[p]);
    } else if (j < n_ + m_) {
      f(j - n_, -1.0);
    } else {
      std::size_t t = j - n_ - m_;
      f(art_row_[t], art_sign_[t]);
    }
  }

  double Dot(const Eigen::VectorXd& y, std::size_t j) const {
    double s = 0.0;
    ForEachEntry(j, [&](std::size_t i, double v) { s += y[static_cast<Eigen::Index>(i)] * v; });
    return s;
  }

  void Refactor();
  Eigen::VectorXd Ftran(std::size_t j) const;
  Eigen::VectorXd Btran(const std::vector<double>& cost) const;
  PhaseResult RunPhase(const std::vector<double>& cost);

  const LinearProgram& lp_;
  SolveOptions opt_;
  std::size_t m_;
  std::size_t n_;
  std::size_t max_iters_;
  std::size_t iterations_ = 0;

  // Scaled structural columns.
  std::vector<std::size_t> start_;
  std::vector<std::size_t> index_;
  std::vector<double> value_;
  std::vector<double> row_scale_;
  std::vector<double> col_scale_;

  std::vector<std::size_t> art_row_;
  std::vector<double> art_sign_;

  std::vector<double> lo_;
  std::vector<double> up_;
  std::vector<double> x_;
  std::vector<VarState> state_;
  std::vector<std::size_t> basis_;

  mutable Eigen::SparseLU<SpMat, Eigen::COLAMDOrdering<int>> lu_;
  struct Eta {
    std::size_t pos;
    double pivot;
    std::vector<std::pair<std::size_t, double>> entries;  // excludes pos
  };
  std::vector<Eta> etas_;
};

void Simplex::ComputeScaling(const LinearProgram::Csc& csc) {
  row_scale_.assign(m_, 1.0);
  col_scale_.assign(n_, 1.0);
  if (!opt_.scaling) return;
  for (int pass = 0; pass < 2; ++pass) {
    std::vector<double> row_min(m_, kInf);
    std::vector<double> row_max(m_, 0.0);
    for (std::size_t j = 0; j < n_; ++j) {
      for (std::size_t p = csc.start[j]; p < csc.start[j + 1]; ++p) {
        double v = std::abs(csc.value[p]) * col_scale_[j];
        if (v == 0.0) continue;
        row_min[csc.index[p]] = std::min(row_min[csc.index[p]], v);
        row_max[csc.index[p]] = std::max(row_max[csc.index[p]], v);
      }
    }
    for (std::size_t i = 0; i < m_; ++i) {
      if (row_max[i] > 0.0) row_scale_[i] = PowerOfTwo(1.0 / std::sqrt(row_min[i] * row_max[i]));
    }
    for (std::size_t j = 0; j < n_; ++j) {
      double lo = kInf;
      double hi = 0.0;
      for (std::size_t p = csc.start[j]; p < csc.start[j + 1]; ++p) {
        double v = std::abs(csc.value[p]) * row_scale_[csc.index[p]];
        if (v == 0.0) continue;
        lo = std::min(lo, v);
        hi = std::max(hi, v);
      }
      if (hi > 0.0) col_scale_[j] = PowerOfTwo(1.0 / std::sqrt(lo * hi));
    }
  }
}

void Simplex::LoadScaled() {
  LinearProgram::Csc csc = lp_.ToCsc();
  ComputeScaling(csc);
  start_ = csc.start;
  index_ = csc.index;
  value_.resize(csc.value.size());
  for (std::size_t j = 0; j < n_; ++j) {
    for (std::size_t p = start_[j]; p < start_[j + 1]; ++p) {
      value_[p] = csc.value[p] * row_scale_[index_[p]] * col_scale_[j];
    }
  }
  lo_.resize(n_ + m_);
  up_.resize(n_ + m_);
  for (std::size_t j = 0; j < n_; ++j) {
    lo_[j] = lp_.lower()[j] / col_scale_[j];
    up_[j] = lp_.upper()[j] / col_scale_[j];
  }
  for (std::size_t i = 0; i < m_; ++i) {
    double b = lp_.rhs()[i] * row_scale_[i];
    switch (lp_.senses()[i]) {
      case RowSense::kLessEqual: lo_[n_ + i] = -kInf; up_[n_ + i] = b; break;
      case RowSense::kGreaterEqual: lo_[n_ + i] = b; up_[n_ + i] = kInf; break;
      case RowSense::kEqual: lo_[n_ + i] = b; up_[n_ + i] = b; break;
    }
  }
}

void Simplex::InitialBasis() {
  x_.assign(n_ + m_, 0.0);
  state_.assign(n_ + m_, VarState::kAtLower);
  for (std::size_t j = 0; j < n_; ++j) {
    if (std::isfinite(lo_[j])) {
      x_[j] = lo_[j];
      state_[j] = VarState::kAtLower;
    } else if (std::isfinite(up_[j])) {
      x_[j] = up_[j];
      state_[j] = VarState::kAtUpper;
    } else {
      x_[j] = 0.0;
      state_[j] = VarState::kFree;
    }
  }
  std::vector<double> act(m_, 0.0);
  for (std::size_t j = 0; j < n_; ++j) {
    if (x_[j] == 0.0) continue;
    for (std::size_t p = start_[j]; p < start_[j + 1]; ++p) act[index_[p]] += value_[p] * x_[j];
  }
  basis_.assign(m_, 0);
  for (std::size_t i = 0; i < m_; ++i) {
    std::size_t r = n_ + i;
    if (act[i] >= lo_[r] - opt_.feas_tol && act[i] <= up_[r] + opt_.feas_tol) {
      x_[r] = act[i];
      state_[r] = VarState::kBasic;
      basis_[i] = r;
      continue;
    }
    // Logical sits at the violated bound; an artificial absorbs the gap.
    bool below = act[i] < lo_[r];
    double bound = below ? lo_[r] : up_[r];
    x_[r] = bound;
    state_[r] = below ? VarState::kAtLower : VarState::kAtUpper;
    // act - bound + sign * a = 0 with a = |bound - act|.
    art_row_.push_back(i);
    art_sign_.push_back(bound > act[i] ? 1.0 : -1.0);
    lo_.push_back(0.0);
    up_.push_back(kInf);
    x_.push_back(std::abs(bound - act[i]));
    state_.push_back(VarState::kBasic);
    basis_[i] = VarCount() - 1;
  }
}

void Simplex::Refactor() {
  std::vector<Eigen::Triplet<double, int>> entries;
  for (std::size_t pos = 0; pos < m_; ++pos) {
    ForEachEntry(basis_[pos], [&](std::size_t i, double v) {
      entries.emplace_back(static_cast<int>(i), static_cast<int>(pos), v);
    });
  }
  SpMat basis(static_cast<Eigen::Index>(m_), static_cast<Eigen::Index>(m_));
  basis.setFromTriplets(entries.begin(), entries.end());
  lu_.analyzePattern(basis);
  lu_.factorize(basis);
  if (lu_.info() != Eigen::Success) {
    Fail(ErrorCode::kSolver, "simplex basis became singular");
  }
  etas_.clear();

  // x_B = -B^{-1} N x_N
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(m_));
  for (std::size_t j = 0; j < VarCount(); ++j) {
    if (state_[j] == VarState::kBasic || x_[j] == 0.0) continue;
    double xj = x_[j];
    ForEachEntry(j, [&](std::size_t i, double v) { rhs[static_cast<Eigen::Index>(i)] -= v * xj; });
  }
  Eigen::VectorXd xb = lu_.solve(rhs);
  for (std::size_t pos = 0; pos < m_; ++pos) x_[basis_[pos]] = xb[static_cast<Eigen::Index>(pos)];
}

Eigen::VectorXd Simplex::Ftran(std::size_t j) const {
  Eigen::VectorXd a = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(m_));
  ForEachEntry(j, [&](std::size_t i, double v) { a[static_cast<Eigen::Index>(i)] += v; });
  Eigen::VectorXd w = lu_.solve(a);
  for (const Eta& eta : etas_) {
    double vp = w[static_cast<Eigen::Index>(eta.pos)] / eta.pivot;
    if (vp != 0.0) {
      for (const auto& [i, wi] : eta.entries) w[static_cast<Eigen::Index>(i)] -= wi * vp;
    }
    w[static_cast<Eigen::Index>(eta.pos)] = vp;
  }
  return w;
}

Eigen::VectorXd Simplex::Btran(const std::vector<double>& cost) const {
  Eigen::VectorXd z(static_cast<Eigen::Index>(m_));
  for (std::size_t pos = 0; pos < m_; ++pos) z[static_cast<Eigen::Index>(pos)] = cost[basis_[pos]];
  for (auto it = etas_.rbegin(); it != etas_.rend(); ++it) {
    double s = z[static_cast<Eigen::Index>(it->pos)];
    for (const auto& [i, wi] : it->entries) s -= wi * z[static_cast<Eigen::Index>(i)];
    z[static_cast<Eigen::Index>(it->pos)] = s / it->pivot;
  }
  return lu_.transpose().solve(z);
}

Simplex::PhaseResult Simplex::RunPhase(const std::vector<double>& cost) {
  std::size_t degenerate_run = 0;
  bool bland = false;
  while (true) {
    if (iterations_ >= max_iters_) return PhaseResult::kIterationLimit;
    if (etas_.size() >= opt_.refactor_interval) Refactor();

    Eigen::VectorXd y = Btran(cost);

    // Pricing.
    std::size_t entering = VarCount();
    double entering_d = 0.0;
    double best_score = 0.0;
    for (std::size_t j = 0; j < VarCount(); ++j) {
      VarState s = state_[j];
      if (s == VarState::kBasic || IsFixed(j)) continue;
      double d = cost[j] - Dot(y, j);
      bool eligible = (s == VarState::kAtLower && d < -opt_.opt_tol) ||
                      (s == VarState::kAtUpper && d > opt_.opt_tol) ||
                      (s == VarState::kFree && std::abs(d) > opt_.opt_tol);
      if (!eligible) continue;
      if (bland) {
        entering = j;
        entering_d = d;
        break;
      }
      if (std::abs(d) > best_score) {
        best_score = std::abs(d);
        entering = j;
        entering_d = d;
      }
    }
    if (entering == VarCount()) return PhaseResult::kOptimal;

    Eigen::VectorXd w = Ftran(entering);
    const double dir = entering_d < 0.0 ? 1.0 : -1.0;

    // Harris pass 1: largest step keeping every basic within tolerance.
    double theta_max = kInf;
    for (std::size_t pos = 0; pos < m_; ++pos) {
      double g = -dir * w[static_cast<Eigen::Index>(pos)];
      if (std::abs(g) <= opt_.pivot_tol) continue;
      std::size_t b = basis_[pos];
      if (g < 0.0 && std::isfinite(lo_[b])) {
        theta_max = std::min(theta_max, (x_[b] - lo_[b] + opt_.feas_tol) / -g);
      } else if (g > 0.0 && std::isfinite(up_[b])) {
        theta_max = std::min(theta_max, (up_[b] - x_[b] + opt_.feas_tol) / g);
      }
    }
    // Pass 2: among blocking rows within theta_max take the largest pivot
    // (or the smallest variable index under Bland's rule).
    std::size_t leave_pos = m_;
    double leave_theta = kInf;
    double leave_abs = 0.0;
    for (std::size_t pos = 0; pos < m_; ++pos) {
      double g = -dir * w[static_cast<Eigen::Index>(pos)];
      if (std::abs(g) <= opt_.pivot_tol) continue;
      std::size_t b = basis_[pos];
      double theta;
      if (g < 0.0 && std::isfinite(lo_[b])) {
        theta = (x_[b] - lo_[b]) / -g;
      } else if (g > 0.0 && std::isfinite(up_[b])) {
        theta = (up_[b] - x_[b]) / g;
      } else {
        continue;
      }
      if (theta > theta_max) continue;
      bool better = bland ? (leave_pos == m_ || b < basis_[leave_pos])
                          : std::abs(g) > leave_abs;
      if (better) {
        leave_pos = pos;
        leave_theta = std::max(theta, 0.0);
        leave_abs = std::abs(g);
      }
    }

    double range = up_[entering] - lo_[entering];
    bool flip = std::isfinite(range) && (leave_pos == m_ || range <= leave_theta);
    if (!flip && leave_pos == m_) return PhaseResult::kUnbounded;

    double step = flip ? range : leave_theta;
    ++iterations_;
    if (step * std::max(1.0, leave_abs) <= kDegenerateStep) {
      ++degenerate_run;
      if (opt_.anti_cycling && degenerate_run >= opt_.bland_after) bland = true;
    } else {
      degenerate_run = 0;
      bland = false;
    }

    if (step != 0.0) {
      x_[entering] += dir * step;
      for (std::size_t pos = 0; pos < m_; ++pos) {
        double g = -dir * w[static_cast<Eigen::Index>(pos)];
        if (g != 0.0) x_[basis_[pos]] += g * step;
      }
    }
    if (flip) {
      state_[entering] = dir > 0.0 ? VarState::kAtUpper : VarState::kAtLower;
      x_[entering] = dir > 0.0 ? up_[entering] : lo_[entering];
      continue;
    }

    std::size_t leaving = basis_[leave_pos];
    double g = -dir * w[static_cast<Eigen::Index>(leave_pos)];
    if (g < 0.0) {
      x_[leaving] = lo_[leaving];
      state_[leaving] = VarState::kAtLower;
    } else {
      x_[leaving] = up_[leaving];
      state_[leaving] = VarState::kAtUpper;
    }
    basis_[leave_pos] = entering;
    state_[entering] = VarState::kBasic;

    Eta eta;
    eta.pos = leave_pos;
    eta.pivot = w[static_cast<Eigen::Index>(leave_pos)];
    for (std::size_t pos = 0; pos < m_; ++pos) {
      double wi = w[static_cast<Eigen::Index>(pos)];
      if (pos != leave_pos && wi != 0.0) eta.entries.emplace_back(pos, wi);
    }
    etas_.push_back(std::move(eta));
  }
}

LpSolution Simplex::Run() {
  LpSolution sol;
  sol.scaled = opt_.scaling;
  LoadScaled();
  InitialBasis();

  if (m_ > 0) Refactor();

  if (!art_row_.empty()) {
    std::vector<double> phase1(VarCount(), 0.0);
    for (std::size_t t = 0; t < art_row_.size(); ++t) phase1[n_ + m_ + t] = 1.0;
    PhaseResult r = RunPhase(phase1);
    sol.phase1_iterations = iterations_;
    if (r == PhaseResult::kIterationLimit) {
      sol.status = SolveStatus::kIterationLimit;
    } else {
      Refactor();
      double worst = 0.0;
      for (std::size_t t = 0; t < art_row_.size(); ++t) worst = std::max(worst, x_[n_ + m_ + t]);
      if (worst > opt_.feas_tol) sol.status = SolveStatus::kInfeasible;
    }
    for (std::size_t t = 0; t < art_row_.size(); ++t) {
      std::size_t j = n_ + m_ + t;
      up_[j] = 0.0;
      if (state_[j] != VarState::kBasic) x_[j] = 0.0;
    }
    if (sol.status == SolveStatus::kInfeasible || r == PhaseResult::kIterationLimit) {
      sol.iterations = iterations_;
      sol.x.assign(n_, 0.0);
      for (std::size_t j = 0; j < n_; ++j) sol.x[j] = x_[j] * col_scale_[j];
      sol.objective = lp_.Objective(sol.x);
      sol.row_duals.assign(m_, 0.0);
      sol.reduced_costs.assign(n_, 0.0);
      sol.row_activity = lp_.Activity(sol.x);
      return sol;
    }
  }

  std::vector<double> phase2(VarCount(), 0.0);
  for (std::size_t j = 0; j < n_; ++j) phase2[j] = lp_.costs()[j] * col_scale_[j];
  PhaseResult r = m_ > 0 ? RunPhase(phase2) : PhaseResult::kOptimal;
  if (m_ == 0) {
    // No rows: each column independently sits at its cheaper bound.
    for (std::size_t j = 0; j < n_; ++j) {
      double c = phase2[j];
      if (c > 0.0) {
        if (!std::isfinite(lo_[j])) r = PhaseResult::kUnbounded;
        else x_[j] = lo_[j];
      } else if (c < 0.0) {
        if (!std::isfinite(up_[j])) r = PhaseResult::kUnbounded;
        else x_[j] = up_[j];
      }
    }
  }
  sol.iterations = iterations_;
  switch (r) {
    case PhaseResult::kOptimal: sol.status = SolveStatus::kOptimal; break;
    case PhaseResult::kUnbounded: sol.status = SolveStatus::kUnbounded; break;
    case PhaseResult::kIterationLimit: sol.status = SolveStatus::kIterationLimit; break;
  }

  Eigen::VectorXd y = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(m_));
  if (m_ > 0) {
    Refactor();
    y = Btran(phase2);
  }
  sol.x.assign(n_, 0.0);
  sol.reduced_costs.assign(n_, 0.0);
  for (std::size_t j = 0; j < n_; ++j) {
    double xj = x_[j];
    if (state_[j] != VarState::kBasic) {
      // Snap nonbasic columns to their exact bound.
      if (state_[j] == VarState::kAtLower && std::isfinite(lo_[j])) xj = lo_[j];
      if (state_[j] == VarState::kAtUpper && std::isfinite(up_[j])) xj = up_[j];
    }
    sol.x[j] = xj * col_scale_[j];
    if (sol.x[j] < lp_.lower()[j]) sol.x[j] = lp_.lower()[j];
    if (sol.x[j] > lp_.upper()[j]) sol.x[j] = lp_.upper()[j];
    double d = phase2[j] - Dot(y, j);
    sol.reduced_costs[j] = state_[j] == VarState::kBasic ? 0.0 : d / col_scale_[j];
  }
  sol.row_duals.assign(m_, 0.0);
  for (std::size_t i = 0; i < m_; ++i) {
    sol.row_duals[i] = y[static_cast<Eigen::Index>(i)] * row_scale_[i];
  }
  sol.objective = lp_.Objective(sol.x);
  sol.row_activity = lp_.Activity(sol.x);
  return sol;
}

}  // namespace

LpSolution Solve(const LinearProgram& lp, const SolveOptions& options) {
  lp.Validate();
  Simplex simplex(lp, options);
  return simplex.Run();
}

}  // namespace rncep
