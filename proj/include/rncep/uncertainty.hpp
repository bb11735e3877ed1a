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

// Data-driven uncertainty descriptions built from a training scenario matrix:
// the lambda-scaled discrete set, randomly sampled polyhedra and the
// zero-inflated uniform mean. Also commodity truncation and the train/eval
// split.

#ifndef RNCEP_UNCERTAINTY_HPP_
#define RNCEP_UNCERTAINTY_HPP_

#include <cstddef>
#include <cstdint>
#include <random>
#include <span>
#include <vector>

#include "rncep/polyhedron.hpp"
#include "rncep/sndlib_io.hpp"

namespace rncep {

struct TrainEvalSplit {
  ScenarioSet train;
  ScenarioSet eval;
};

// Rows 0, stride, 2*stride, ... go to training, the rest to evaluation.
TrainEvalSplit SplitTrainEval(const ScenarioSet& scenarios, std::size_t stride);

struct TopCommodities {
  ScenarioSet set;
  double coverage = 0.0;              // kept demand mass / total demand mass
  std::vector<std::size_t> kept;      // source columns, in canonical order
};

// Keeps the k commodities with the largest total demand. Ties go to the
// earlier column. The result keeps the input's column order.
TopCommodities SelectTopCommodities(const ScenarioSet& scenarios, std::size_t k);

struct CommodityStats {
  std::size_t positive_count = 0;  // N'
  double average = 0.0;            // sum over all rows / N'
  double min_positive = 0.0;
  double max = 0.0;
  bool degenerate = false;         // N' == 0
};

CommodityStats ComputeCommodityStats(const ScenarioSet& scenarios, std::size_t k);

// Removes commodities whose column is identically zero.
ScenarioSet DropZeroCommodities(const ScenarioSet& scenarios);

struct DiscreteSet {
  std::vector<std::vector<double>> scenarios;
  double lambda = 1.0;
};

DiscreteSet BuildDiscreteSet(const ScenarioSet& scenarios, double lambda);

struct DemandBounds {
  std::vector<double> lower;
  std::vector<double> upper;
};

DemandBounds BuildBounds(const ScenarioSet& scenarios);

// b_i = max_j sum_k v_ik r^{j,k}: the smallest right-hand side keeping every
// scenario feasible.
double TightRhs(const ScenarioSet& scenarios, std::span<const double> row);

// Polyhedron with the given rows, tight right-hand sides and data bounds.
Polyhedron PolyhedronFromRows(const ScenarioSet& scenarios,
                              std::vector<std::vector<double>> rows);

// Row 0 is the sum constraint (v = 1/K); rows 1..m-1 are sampled i.i.d.
// uniform on [0, 1].
Polyhedron SampleHyperplanes(const ScenarioSet& scenarios, std::size_t m,
                             std::uint64_t seed);

struct MeanDemand {
  std::vector<double> mean;
};

MeanDemand ZeroInflatedMean(const ScenarioSet& scenarios);

// Generator behind every random choice in the library. mt19937_64 output is
// fixed by the standard; doubles take the top 53 bits, so streams are
// identical across platforms.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}
  double Uniform01() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  double Uniform(double lo, double hi) { return lo + (hi - lo) * Uniform01(); }
  std::uint64_t Next() { return engine_(); }

 private:
  std::mt19937_64 engine_;
};

}  // namespace rncep

#endif  // RNCEP_UNCERTAINTY_HPP_
