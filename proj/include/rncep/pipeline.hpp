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

// Experiment pipeline: ingest, split, truncate, build sets, solve over the
// (sigma, lambda, M) grids, evaluate and collect the frontier. Every stage
// reads and writes files in a work directory (layout in docs/formats.md), so
// stages can run on their own.

#ifndef RNCEP_PIPELINE_HPP_
#define RNCEP_PIPELINE_HPP_

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "rncep/evaluate.hpp"
#include "rncep/lp.hpp"
#include "rncep/sndlib_io.hpp"

namespace rncep {

enum class ModelTag { kNominal, kDiscrete, kStochastic, kAarc };

const char* ToString(ModelTag tag);
ModelTag ParseModelTag(std::string_view text);

struct ExperimentSpec {
  std::string name;
  ModelTag model = ModelTag::kDiscrete;
  std::size_t commodities = 1;
  std::vector<double> sigmas;
  std::vector<double> lambdas;          // discrete only
  std::vector<std::size_t> hyperplanes;  // aarc only

  // Grid size: |sigma| * |lambda| or |sigma| * |M| or |sigma|.
  std::size_t point_count() const;
};

struct ExperimentConfig {
  std::filesystem::path network;
  std::filesystem::path scenarios;  // directory of demand files or a CSV
  std::filesystem::path output;
  CostRule cost_rule = CostRule::kFirstModuleCost;
  std::size_t stride = 12;
  std::size_t eval_commodities = 0;  // 0 keeps every commodity
  std::uint64_t seed = 1;
  std::size_t threads = 1;
  SolveOptions solver;
  std::vector<ExperimentSpec> experiments;
  std::string source;  // config text, hashed into the manifest

  // Throws kConfig.
  void Validate() const;
};

// "0:24900:11" is 11 evenly spaced values from 0 to 24900; otherwise a comma
// or space separated list.
std::vector<double> ParseGrid(std::string_view text);

// INI text; relative paths are resolved against base_dir.
ExperimentConfig ParseConfig(std::string_view text, const std::filesystem::path& base_dir);
// Reads the file and applies the RNCEP_SEED override.
ExperimentConfig LoadConfig(const std::filesystem::path& path);

// 64-bit FNV-1a, hex encoded.
std::string HashText(std::string_view text);

// --- stages ----------------------------------------------------------------

// network.json and scenarios.csv in the work directory.
void StageParse(const std::filesystem::path& network, const std::filesystem::path& scenarios,
                CostRule cost_rule, const std::filesystem::path& workdir);

NetworkSpec ReadNetworkJson(const std::filesystem::path& path);
std::string WriteNetworkJson(const NetworkSpec& net);

struct SetsRequest {
  std::size_t stride = 12;
  std::size_t eval_commodities = 0;
  std::vector<std::size_t> commodities;
  std::vector<double> lambdas;
  std::vector<std::size_t> hyperplanes;
  std::uint64_t seed = 1;
};

// sets/train.csv, sets/eval.csv and per K: sets/K<k>/{train,mean}.csv,
// discrete_lambda<l>.csv, poly_M<m>.csv and meta.json.
void StageBuildSets(const std::filesystem::path& workdir, const SetsRequest& request);

struct SolveRequest {
  std::string experiment;  // tag used for file names and the frontier
  ModelTag model = ModelTag::kDiscrete;
  double sigma = 0.0;
  std::optional<double> lambda;
  std::optional<std::size_t> hyperplanes;
  std::size_t commodities = 1;
  SolveOptions options;
};

struct SolveRecord {
  std::string experiment;
  ModelTag model = ModelTag::kDiscrete;
  double sigma = 0.0;
  std::optional<double> lambda;
  std::optional<std::size_t> hyperplanes;
  std::size_t commodities = 0;
  double objective = 0.0;
  double investment_cost = 0.0;
  std::optional<double> worst_case_outsourced;  // tau of the discrete model
  std::vector<std::string> arc_ids;
  std::vector<double> x;
  std::size_t iterations = 0;
};

// Base name of the artifacts for one grid point, e.g.
// "disc2_sigma2490_lambda0.5".
std::string PointName(const SolveRequest& request);

// Builds and solves one model; writes solutions/<name>.json and
// solutions/<name>.x.csv. Returns the JSON path.
std::filesystem::path StageSolve(const std::filesystem::path& workdir,
                                 const SolveRequest& request, SolveRecord* record = nullptr);

SolveRecord ReadSolveRecord(const std::filesystem::path& path);

// LP text of the model StageSolve would solve, without solving it.
std::string StageWriteLp(const std::filesystem::path& workdir, const SolveRequest& request);

// Evaluates a solution on sets/eval.csv; writes reports/<name>.json.
std::filesystem::path StageEvaluate(const std::filesystem::path& workdir,
                                    const std::filesystem::path& solution,
                                    const EvaluateOptions& options = {});

// Evaluates an investment CSV (header "arc,x") and writes the report to `out`.
EvaluationReport StageEvaluateInvestment(const std::filesystem::path& workdir,
                                         const std::filesystem::path& investment,
                                         const std::filesystem::path& out,
                                         const EvaluateOptions& options = {});

std::vector<double> ReadInvestmentCsv(const std::filesystem::path& path,
                                      const NetworkSpec& net);
std::string WriteInvestmentCsv(const NetworkSpec& net, const std::vector<double>& x);

// Collects report JSON files into a frontier CSV; returns the CSV text.
std::string StageFrontier(const std::vector<std::filesystem::path>& reports,
                          const std::filesystem::path& out);

FrontierPoint ReadFrontierPoint(const std::filesystem::path& report);

struct RunSummary {
  std::size_t solved = 0;
  std::filesystem::path frontier;
  std::filesystem::path manifest;
};

// All stages for every grid point. On failure writes <output>/FAILED, keeps
// what was produced and rethrows.
RunSummary RunExperiment(const ExperimentConfig& config);

}  // namespace rncep

#endif  // RNCEP_PIPELINE_HPP_
