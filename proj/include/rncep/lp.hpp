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

// Sparse linear programs, a bounded-variable revised simplex solver, an LP
// text writer and a brute-force vertex enumerator used as a test oracle.

#ifndef RNCEP_LP_HPP_
#define RNCEP_LP_HPP_

#include <cstddef>
#include <limits>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "rncep/polyhedron.hpp"

namespace rncep {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

enum class RowSense { kLessEqual, kGreaterEqual, kEqual };

struct Triplet {
  std::size_t row;
  std::size_t col;
  double value;
};

// min c^T x  s.t.  row_i(x) (<=|>=|=) rhs_i,  lower <= x <= upper.
class LinearProgram {
 public:
  using Terms = std::vector<std::pair<std::size_t, double>>;

  std::size_t AddColumn(double cost, double lower = 0.0, double upper = kInf);
  // Exact zeros in `terms` are dropped.
  std::size_t AddRow(RowSense sense, double rhs, const Terms& terms,
                     std::string name = {});
  void AddCoefficient(std::size_t row, std::size_t col, double value);

  void SetBounds(std::size_t col, double lower, double upper);
  void SetCost(std::size_t col, double cost);

  std::size_t num_rows() const { return senses_.size(); }
  std::size_t num_cols() const { return costs_.size(); }

  const std::vector<double>& costs() const { return costs_; }
  const std::vector<double>& lower() const { return lower_; }
  const std::vector<double>& upper() const { return upper_; }
  const std::vector<RowSense>& senses() const { return senses_; }
  const std::vector<double>& rhs() const { return rhs_; }
  const std::vector<Triplet>& triplets() const { return triplets_; }
  // "c<i>" when the row was added without a name.
  std::string RowName(std::size_t row) const;

  // Throws kInvalidArgument on NaN/inf coefficients, infinite rhs,
  // out-of-range triplets or lower > upper.
  void Validate() const;

  // Compressed sparse column form; duplicate entries are summed.
  struct Csc {
    std::vector<std::size_t> start;  // num_cols + 1
    std::vector<std::size_t> index;
    std::vector<double> value;
  };
  Csc ToCsc() const;

  // Row activities A x.
  std::vector<double> Activity(std::span<const double> x) const;
  double Objective(std::span<const double> x) const;

 private:
  std::vector<double> costs_;
  std::vector<double> lower_;
  std::vector<double> upper_;
  std::vector<RowSense> senses_;
  std::vector<double> rhs_;
  std::vector<std::string> row_names_;
  std::vector<Triplet> triplets_;
};

enum class SolveStatus { kOptimal, kInfeasible, kUnbounded, kIterationLimit };

const char* ToString(SolveStatus status);

struct SolveOptions {
  double feas_tol = 1e-7;
  double opt_tol = 1e-7;
  double pivot_tol = 1e-9;
  // 0 means 10 * (rows + cols).
  std::size_t max_iters = 0;
  // Consecutive degenerate pivots before pricing switches to Bland's rule.
  std::size_t bland_after = 500;
  bool anti_cycling = true;
  // Power-of-two row/column equilibration before solving.
  bool scaling = true;
  std::size_t refactor_interval = 64;
};

struct LpSolution {
  SolveStatus status = SolveStatus::kIterationLimit;
  std::vector<double> x;
  double objective = 0.0;
  // Row duals with the usual sign convention for minimization: >= rows have
  // nonnegative duals, <= rows nonpositive.
  std::vector<double> row_duals;
  std::vector<double> reduced_costs;
  std::vector<double> row_activity;
  std::size_t iterations = 0;
  std::size_t phase1_iterations = 0;
  bool scaled = false;
};

LpSolution Solve(const LinearProgram& lp, const SolveOptions& options = {});

// Dual objective b^T y + sum of reduced-cost bound terms. Equals the primal
// objective at an optimal basis.
double DualObjective(const LinearProgram& lp, const LpSolution& solution);

// Largest violation of a row or column bound by the primal values.
double PrimalResidual(const LinearProgram& lp, std::span<const double> x);

// Largest sign violation of duals / reduced costs.
double DualResidual(const LinearProgram& lp, const LpSolution& solution);

// Largest |dual| * slack product over rows and |reduced cost| * distance to
// the implied bound over columns.
double ComplementarityResidual(const LinearProgram& lp,
                               const LpSolution& solution);

// CPLEX-style LP text. Every column needs a non-empty name.
std::string WriteLpFile(const LinearProgram& lp,
                        std::span<const std::string> column_names);

inline constexpr std::size_t kMaxEnumerationDim = 8;

// All basic feasible points of the polyhedron, deduplicated within 1e-9.
// Dimension is capped at kMaxEnumerationDim.
std::vector<std::vector<double>> VertexEnumerate(const Polyhedron& p);

}  // namespace rncep

#endif  // RNCEP_LP_HPP_
