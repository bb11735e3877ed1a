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

// Test-only oracles. Nothing here calls the simplex solver.

#ifndef RNCEP_TESTS_ORACLES_HPP_
#define RNCEP_TESTS_ORACLES_HPP_

#include <algorithm>
#include <cmath>
#include <optional>
#include <vector>

#include "rncep/lp.hpp"
#include "rncep/uncertainty.hpp"

namespace rncep::testing {

// Up to 6 boxed columns and 6 rows of mixed sense. Right-hand sides are
// placed around a random point of the box so most instances are feasible.
inline LinearProgram RandomBoxedLp(Rng& rng) {
  LinearProgram lp;
  std::size_t n = 1 + rng.Next() % 6;
  std::size_t m = 1 + rng.Next() % 6;
  std::vector<double> point(n);
  for (std::size_t j = 0; j < n; ++j) {
    double lo = std::round(rng.Uniform(-3.0, 0.0) * 4.0) / 4.0;
    double hi = lo + std::round(rng.Uniform(0.5, 4.0) * 4.0) / 4.0;
    lp.AddColumn(std::round(rng.Uniform(-3.0, 3.0) * 8.0) / 8.0, lo, hi);
    point[j] = rng.Uniform(lo, hi);
  }
  for (std::size_t i = 0; i < m; ++i) {
    LinearProgram::Terms terms;
    double act = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      if (rng.Uniform01() < 0.25) continue;
      double a = std::round(rng.Uniform(-2.0, 2.0) * 4.0) / 4.0;
      terms.emplace_back(j, a);
      act += a * point[j];
    }
    double slack = rng.Uniform(-0.5, 2.0);
    switch (rng.Next() % 3) {
      case 0: lp.AddRow(RowSense::kLessEqual, act + slack, terms); break;
      case 1: lp.AddRow(RowSense::kGreaterEqual, act - slack, terms); break;
      default: lp.AddRow(RowSense::kEqual, act, terms); break;
    }
  }
  return lp;
}

// Feasible region of a boxed LP as { x : A' x <= b', l <= x <= u }.
inline Polyhedron LpRegion(const LinearProgram& lp) {
  Polyhedron p;
  p.lower = lp.lower();
  p.upper = lp.upper();
  std::vector<std::vector<double>> dense(lp.num_rows(), std::vector<double>(lp.num_cols(), 0.0));
  for (const Triplet& t : lp.triplets()) dense[t.row][t.col] += t.value;
  for (std::size_t i = 0; i < lp.num_rows(); ++i) {
    std::vector<double> neg = dense[i];
    for (double& v : neg) v = -v;
    switch (lp.senses()[i]) {
      case RowSense::kLessEqual:
        p.V.push_back(dense[i]);
        p.b.push_back(lp.rhs()[i]);
        break;
      case RowSense::kGreaterEqual:
        p.V.push_back(neg);
        p.b.push_back(-lp.rhs()[i]);
        break;
      case RowSense::kEqual:
        p.V.push_back(dense[i]);
        p.b.push_back(lp.rhs()[i]);
        p.V.push_back(neg);
        p.b.push_back(-lp.rhs()[i]);
        break;
    }
  }
  return p;
}

// Minimum of the objective over all basic feasible points, or nullopt when
// there are none (infeasible).
inline std::optional<double> BruteForceMinimum(const LinearProgram& lp) {
  std::vector<std::vector<double>> vertices = VertexEnumerate(LpRegion(lp));
  if (vertices.empty()) return std::nullopt;
  double best = kInf;
  for (const auto& v : vertices) best = std::min(best, lp.Objective(v));
  return best;
}

}  // namespace rncep::testing

#endif  // RNCEP_TESTS_ORACLES_HPP_
