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

// Small in-memory networks and scenario sets shared by the unit and
// acceptance tests.

#ifndef RNCEP_TESTS_FIXTURES_HPP_
#define RNCEP_TESTS_FIXTURES_HPP_

#include <cmath>
#include <string>
#include <vector>

#include "rncep/sndlib_io.hpp"
#include "rncep/uncertainty.hpp"

namespace rncep::testing {

// s -> t, u = 0, c = 1.
inline NetworkSpec TwoNodeNet() {
  NetworkSpec net;
  net.name = "two";
  net.nodes = {"s", "t"};
  net.arcs.push_back({"st", 0, 1, 0.0, 1.0});
  return net;
}

inline std::vector<Commodity> TwoNodeCommodities() { return {{"s", "t"}}; }

inline ScenarioSet MakeSet(std::vector<Commodity> commodities,
                           std::vector<std::vector<double>> rows) {
  ScenarioSet set;
  set.commodities = std::move(commodities);
  set.demands = std::move(rows);
  for (std::size_t i = 0; i < set.demands.size(); ++i) set.labels.push_back(std::to_string(i));
  return set;
}

// Four nodes on a bidirected ring plus one chord (10 arcs), random base
// capacities in [0, 4] and costs in {1, 2, 3}.
inline NetworkSpec RandomRingNet(Rng& rng) {
  NetworkSpec net;
  net.name = "ring";
  net.nodes = {"n0", "n1", "n2", "n3"};
  const std::size_t ends[5][2] = {{0, 1}, {1, 2}, {2, 3}, {3, 0}, {0, 2}};
  for (const auto& e : ends) {
    for (int dir = 0; dir < 2; ++dir) {
      std::size_t a = dir == 0 ? e[0] : e[1];
      std::size_t b = dir == 0 ? e[1] : e[0];
      double cap = std::round(rng.Uniform(0.0, 4.0));
      double cost = static_cast<double>(1 + rng.Next() % 3);
      net.arcs.push_back({"a" + std::to_string(net.arcs.size()), a, b, cap, cost});
    }
  }
  return net;
}

// k distinct ordered node pairs of the ring.
inline std::vector<Commodity> RandomCommodities(const NetworkSpec& net, Rng& rng,
                                                std::size_t k) {
  std::vector<Commodity> out;
  while (out.size() < k) {
    std::size_t s = rng.Next() % net.nodes.size();
    std::size_t t = rng.Next() % net.nodes.size();
    if (s == t) continue;
    Commodity c{net.nodes[s], net.nodes[t]};
    bool seen = false;
    for (const auto& o : out) seen = seen || o == c;
    if (!seen) out.push_back(c);
  }
  return out;
}

// n scenarios with demands uniform in [1, 6], rounded to quarters.
inline ScenarioSet RandomScenarios(const std::vector<Commodity>& commodities, Rng& rng,
                                   std::size_t n) {
  std::vector<std::vector<double>> rows(n, std::vector<double>(commodities.size()));
  for (auto& row : rows) {
    for (double& v : row) v = std::round(rng.Uniform(1.0, 6.0) * 4.0) / 4.0;
  }
  return MakeSet(commodities, rows);
}

}  // namespace rncep::testing

#endif  // RNCEP_TESTS_FIXTURES_HPP_
