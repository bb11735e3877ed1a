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

// Out-of-sample evaluation of a fixed investment and the efficiency frontier
// table.

#ifndef RNCEP_EVALUATE_HPP_
#define RNCEP_EVALUATE_HPP_

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "rncep/lp.hpp"
#include "rncep/sndlib_io.hpp"

namespace rncep {

struct Metrics {
  double mean = 0.0;
  double max = 0.0;
  double cvar = 0.0;  // alpha = 0.1
  double std = 0.0;   // population

  bool operator==(const Metrics&) const = default;
};

struct EvaluationReport {
  double investment_cost = 0.0;
  std::vector<double> outsourced;  // one entry per evaluation scenario
  Metrics metrics;
};

struct EvaluateOptions {
  // Worker threads for the per-scenario LPs; results do not depend on it.
  std::size_t threads = 1;
  SolveOptions solve;
};

// sum_a c_a x_a
double InvestmentCost(const NetworkSpec& net, std::span<const double> x);

EvaluationReport EvaluateInvestment(const NetworkSpec& net, std::span<const double> x,
                                    const ScenarioSet& scenarios,
                                    const EvaluateOptions& options = {});

inline constexpr double kCvarAlpha = 0.1;

// Mean of the ceil(alpha * n) largest values.
double Cvar(std::span<const double> values, double alpha);

Metrics ComputeMetrics(std::span<const double> values);

// Pearson correlation; throws when either vector is constant.
double Correlation(std::span<const double> a, std::span<const double> b);

struct FrontierPoint {
  std::string model;
  double sigma = 0.0;
  std::optional<double> lambda;
  std::optional<std::size_t> hyperplanes;
  double investment_cost = 0.0;
  Metrics metrics;

  bool operator==(const FrontierPoint&) const = default;
};

inline constexpr std::string_view kFrontierHeader =
    "model,sigma,lambda,M,invest_cost,mean,max,cvar10,std";

// Rows sorted by (model, sigma, lambda, M); absent lambda / M are empty cells.
std::string WriteFrontierCsv(std::vector<FrontierPoint> points);
std::vector<FrontierPoint> ParseFrontierCsv(std::string_view text);

}  // namespace rncep

#endif  // RNCEP_EVALUATE_HPP_
