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

#include "rncep/uncertainty.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "rncep/error.hpp"

namespace rncep {

TrainEvalSplit SplitTrainEval(const ScenarioSet& scenarios, std::size_t stride) {
  const std::size_t n = scenarios.scenario_count();
  if (stride == 0) Fail(ErrorCode::kInvalidArgument, "stride must be >= 1");
  if (stride > n) {
    Fail(ErrorCode::kInvalidArgument, "stride " + std::to_string(stride) +
                                          " exceeds scenario count " + std::to_string(n));
  }
  std::vector<std::size_t> train_rows;
  std::vector<std::size_t> eval_rows;
  for (std::size_t i = 0; i < n; ++i) {
    (i % stride == 0 ? train_rows : eval_rows).push_back(i);
  }
  return {scenarios.SelectRows(train_rows), scenarios.SelectRows(eval_rows)};
}

TopCommodities SelectTopCommodities(const ScenarioSet& scenarios, std::size_t k) {
  const std::size_t total_k = scenarios.commodity_count();
  if (k == 0) Fail(ErrorCode::kInvalidArgument, "commodity count must be >= 1");
  if (k > total_k) {
    Fail(ErrorCode::kInvalidArgument, "requested " + std::to_string(k) +
                                          " commodities, only " +
                                          std::to_string(total_k) + " exist");
  }
  std::vector<double> totals(total_k, 0.0);
  for (const auto& row : scenarios.demands) {
    for (std::size_t c = 0; c < total_k; ++c) totals[c] += row[c];
  }
  std::vector<std::size_t> order(total_k);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t x, std::size_t y) { return totals[x] > totals[y]; });
  order.resize(k);
  std::sort(order.begin(), order.end());

  double mass = std::accumulate(totals.begin(), totals.end(), 0.0);
  double kept = 0.0;
  for (std::size_t c : order) kept += totals[c];

  TopCommodities out;
  out.set = scenarios.SelectColumns(order);
  out.coverage = mass > 0.0 ? kept / mass : 1.0;
  out.kept = std::move(order);
  return out;
}

CommodityStats ComputeCommodityStats(const ScenarioSet& scenarios, std::size_t k) {
  std::vector<double> column = scenarios.Column(k);
  CommodityStats stats;
  double sum = 0.0;
  bool first_positive = true;
  for (double r : column) {
    sum += r;
    stats.max = std::max(stats.max, r);
    if (r > 0.0) {
      ++stats.positive_count;
      stats.min_positive = first_positive ? r : std::min(stats.min_positive, r);
      first_positive = false;
    }
  }
  stats.degenerate = stats.positive_count == 0;
  // Divides by N' but sums over every row; zeros add nothing to the sum.
  if (!stats.degenerate) stats.average = sum / static_cast<double>(stats.positive_count);
  return stats;
}

ScenarioSet DropZeroCommodities(const ScenarioSet& scenarios) {
  std::vector<std::size_t> keep;
  for (std::size_t k = 0; k < scenarios.commodity_count(); ++k) {
    bool any = std::any_of(scenarios.demands.begin(), scenarios.demands.end(),
                           [k](const auto& row) { return row[k] > 0.0; });
    if (any) keep.push_back(k);
  }
  return scenarios.SelectColumns(keep);
}

DiscreteSet BuildDiscreteSet(const ScenarioSet& scenarios, double lambda) {
  if (!(lambda >= 0.0 && lambda <= 1.0)) {
    Fail(ErrorCode::kInvalidArgument, "lambda must lie in [0, 1]");
  }
  const std::size_t kk = scenarios.commodity_count();
  std::vector<double> average(kk, 0.0);
  std::vector<bool> degenerate(kk, false);
  for (std::size_t k = 0; k < kk; ++k) {
    CommodityStats stats = ComputeCommodityStats(scenarios, k);
    average[k] = stats.average;
    degenerate[k] = stats.degenerate;
  }
  DiscreteSet set;
  set.lambda = lambda;
  set.scenarios.reserve(scenarios.scenario_count());
  for (const auto& row : scenarios.demands) {
    std::vector<double> blended(kk, 0.0);
    for (std::size_t k = 0; k < kk; ++k) {
      if (degenerate[k]) continue;
      blended[k] = lambda == 1.0 ? row[k] : lambda * row[k] + (1.0 - lambda) * average[k];
    }
    set.scenarios.push_back(std::move(blended));
  }
  return set;
}

DemandBounds BuildBounds(const ScenarioSet& scenarios) {
  if (scenarios.scenario_count() == 0) {
    Fail(ErrorCode::kInvalidArgument, "cannot bound an empty scenario set");
  }
  DemandBounds bounds{scenarios.demands.front(), scenarios.demands.front()};
  for (const auto& row : scenarios.demands) {
    for (std::size_t k = 0; k < row.size(); ++k) {
      bounds.lower[k] = std::min(bounds.lower[k], row[k]);
      bounds.upper[k] = std::max(bounds.upper[k], row[k]);
    }
  }
  return bounds;
}

double TightRhs(const ScenarioSet& scenarios, std::span<const double> row) {
  if (scenarios.scenario_count() == 0) {
    Fail(ErrorCode::kInvalidArgument, "cannot fit a hyperplane to no scenarios");
  }
  if (row.size() != scenarios.commodity_count()) {
    Fail(ErrorCode::kInvalidArgument, "hyperplane dimension mismatch");
  }
  double best = -std::numeric_limits<double>::infinity();
  for (const auto& r : scenarios.demands) {
    double dot = 0.0;
    for (std::size_t k = 0; k < row.size(); ++k) dot += row[k] * r[k];
    best = std::max(best, dot);
  }
  return best;
}

Polyhedron PolyhedronFromRows(const ScenarioSet& scenarios,
                              std::vector<std::vector<double>> rows) {
  DemandBounds bounds = BuildBounds(scenarios);
  Polyhedron p;
  p.lower = std::move(bounds.lower);
  p.upper = std::move(bounds.upper);
  for (const auto& row : rows) p.b.push_back(TightRhs(scenarios, row));
  p.V = std::move(rows);
  return p;
}

Polyhedron SampleHyperplanes(const ScenarioSet& scenarios, std::size_t m,
                             std::uint64_t seed) {
  if (m == 0) Fail(ErrorCode::kInvalidArgument, "need at least the sum-constraint row");
  const std::size_t kk = scenarios.commodity_count();
  if (kk == 0) Fail(ErrorCode::kInvalidArgument, "no commodities");
  std::vector<std::vector<double>> rows;
  rows.emplace_back(kk, 1.0 / static_cast<double>(kk));
  Rng rng(seed);
  for (std::size_t i = 1; i < m; ++i) {
    std::vector<double> row(kk);
    for (double& v : row) v = rng.Uniform01();
    rows.push_back(std::move(row));
  }
  Polyhedron p = PolyhedronFromRows(scenarios, std::move(rows));
  p.seed = seed;
  return p;
}

MeanDemand ZeroInflatedMean(const ScenarioSet& scenarios) {
  const double n = static_cast<double>(scenarios.scenario_count());
  MeanDemand out;
  out.mean.assign(scenarios.commodity_count(), 0.0);
  for (std::size_t k = 0; k < scenarios.commodity_count(); ++k) {
    CommodityStats stats = ComputeCommodityStats(scenarios, k);
    if (stats.degenerate) continue;
    double uniform_mean = 0.5 * (stats.min_positive + stats.max);
    out.mean[k] = uniform_mean * static_cast<double>(stats.positive_count) / n;
  }
  return out;
}

}  // namespace rncep
