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

// Network and demand-scenario ingestion: SNDlib native text format and the
// plain scenario-matrix CSV used to hand data between pipeline stages.
// Grammars are documented in docs/formats.md.

#ifndef RNCEP_SNDLIB_IO_HPP_
#define RNCEP_SNDLIB_IO_HPP_

#include <compare>
#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace rncep {

// Directed arc. `capacity` is the base capacity u_a, `cost` the price of one
// additional unit of capacity c_a.
struct Arc {
  std::string id;
  std::size_t tail = 0;
  std::size_t head = 0;
  double capacity = 0.0;
  double cost = 0.0;

  bool operator==(const Arc&) const = default;
};

// Undirected SNDlib link with endpoints resolved to node indices.
struct Link {
  std::string id;
  std::size_t a = 0;
  std::size_t b = 0;
  double capacity = 0.0;
  double cost = 0.0;
};

struct NetworkSpec {
  std::string name;
  std::vector<std::string> nodes;
  std::vector<Arc> arcs;

  std::optional<std::size_t> FindNode(std::string_view id) const;
  // Throws kInvalidArgument for unknown ids.
  std::size_t NodeIndex(std::string_view id) const;

  // delta^+(v) and delta^-(v), indexed by node.
  std::vector<std::vector<std::size_t>> OutArcs() const;
  std::vector<std::vector<std::size_t>> InArcs() const;

  // Checks the invariants: endpoints exist, u_a >= 0, c_a >= 0, unique ids.
  void Validate() const;

  bool operator==(const NetworkSpec&) const = default;
};

struct Commodity {
  std::string source;
  std::string sink;

  auto operator<=>(const Commodity&) const = default;
};

// N x K demand matrix; row i is scenario i, column k is commodity k.
struct ScenarioSet {
  std::vector<Commodity> commodities;
  std::vector<std::vector<double>> demands;
  std::vector<std::string> labels;

  std::size_t scenario_count() const { return demands.size(); }
  std::size_t commodity_count() const { return commodities.size(); }
  std::vector<double> Column(std::size_t k) const;

  // Row subset, preserving commodities.
  ScenarioSet SelectRows(const std::vector<std::size_t>& rows) const;
  // Column subset in the given order.
  ScenarioSet SelectColumns(const std::vector<std::size_t>& cols) const;

  void Validate() const;

  bool operator==(const ScenarioSet&) const = default;
};

// How the per-unit expansion cost c_a is derived from an SNDlib link line.
enum class CostRule {
  // Cost of the first listed capacity module (falls back to routing cost
  // when the module list is empty).
  kFirstModuleCost,
  // Cheapest module cost divided by module capacity.
  kCheapestPerUnit,
};

struct NetworkParseOptions {
  CostRule cost_rule = CostRule::kFirstModuleCost;
};

std::vector<Arc> ExpandUndirected(const std::vector<Link>& links);

NetworkSpec ParseNetwork(std::string_view text,
                         const NetworkParseOptions& options = {});
NetworkSpec ReadNetworkFile(const std::filesystem::path& path,
                            const NetworkParseOptions& options = {});

struct DemandEntry {
  Commodity commodity;
  double value = 0.0;
};

// DEMANDS section of an SNDlib file. Repeated (source, sink) pairs are summed.
std::vector<DemandEntry> ParseDemands(std::string_view text);

// One scenario per regular file in `dir`, ordered by file name. Commodities
// are the union of pairs over all files in lexicographic order; missing pairs
// get demand 0. If `network` is given every endpoint must name one of its
// nodes.
ScenarioSet LoadScenarioDir(const std::filesystem::path& dir,
                            const NetworkSpec* network = nullptr);

ScenarioSet ParseScenarioCsv(std::string_view text);
std::string WriteScenarioCsv(const ScenarioSet& set);

ScenarioSet ReadScenarioCsvFile(const std::filesystem::path& path);
void WriteScenarioCsvFile(const ScenarioSet& set,
                          const std::filesystem::path& path);

// Shared helpers for the text formats.
std::string ReadTextFile(const std::filesystem::path& path);
void WriteTextFile(const std::filesystem::path& path, std::string_view text);
std::string FormatDouble(double value);  // shortest form, 17 significant digits
double ParseDouble(std::string_view token, std::size_t line);

}  // namespace rncep

#endif  // RNCEP_SNDLIB_IO_HPP_
