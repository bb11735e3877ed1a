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

#include <algorithm>
#include <numeric>
#include <set>

#include "doctest.h"
#include "fixtures.hpp"
#include "rncep/error.hpp"
#include "rncep/model_build.hpp"

namespace rncep {
namespace {

using testing::MakeSet;
using testing::TwoNodeCommodities;
using testing::TwoNodeNet;

double SolveValue(const LinearProgram& lp) {
  LpSolution sol = Solve(lp);
  REQUIRE(sol.status == SolveStatus::kOptimal);
  return sol.objective;
}

double Dot(std::span<const double> a, std::span<const double> b) {
  return std::inner_product(a.begin(), a.end(), b.begin(), 0.0);
}

double InvestCost(const NetworkSpec& net, std::span<const double> x) {
  double c = 0.0;
  for (std::size_t a = 0; a < net.arcs.size(); ++a) c += net.arcs[a].cost * x[a];
  return c;
}

AffinePolicy RandomPolicy(Rng& rng, std::size_t kk, std::size_t na) {
  AffinePolicy p;
  p.phi.assign(kk, std::vector<double>(na));
  p.Phi.assign(kk, std::vector<std::vector<double>>(kk, std::vector<double>(na)));
  for (auto& row : p.phi)
    for (double& v : row) v = rng.Uniform(-2.0, 2.0);
  for (auto& mat : p.Phi)
    for (auto& row : mat)
      for (double& v : row) v = rng.Uniform(-1.0, 1.0);
  return p;
}

Polyhedron Box(double lo, double hi) {
  Polyhedron p;
  p.V = {{1.0}};
  p.b = {hi};
  p.lower = {lo};
  p.upper = {hi};
  return p;
}

struct RandomInstance {
  NetworkSpec net;
  std::vector<Commodity> commodities;
  ScenarioSet train;
  Polyhedron poly;
};

RandomInstance MakeInstance(std::uint64_t seed, std::size_t k, std::size_t m) {
  Rng rng(seed);
  RandomInstance in;
  in.net = testing::RandomRingNet(rng);
  in.commodities = testing::RandomCommodities(in.net, rng, k);
  in.train = testing::RandomScenarios(in.commodities, rng, 8);
  in.poly = SampleHyperplanes(in.train, m, seed);
  return in;
}

TEST_CASE("catalog is a bijection with stable names") {
  VariableCatalog cat;
  CHECK(cat.Add({VarFamily::kX, 3}) == 0);
  CHECK(cat.Add({VarFamily::kPhi2, 0, 1, 5}) == 1);
  CHECK(cat.Add({VarFamily::kTau}) == 2);
  CHECK(cat.Name(0) == "X_3");
  CHECK(cat.Name(1) == "PHI2_0_1_5");
  CHECK(cat.Name(2) == "TAU");
  CHECK(cat.At({VarFamily::kPhi2, 0, 1, 5}) == 1);
  CHECK_FALSE(cat.Find({VarFamily::kX, 4}).has_value());
  CHECK_THROWS_AS(cat.Add({VarFamily::kX, 3}), Error);
  CHECK_THROWS_AS(cat.At({VarFamily::kX, 9}), Error);
}

TEST_CASE("nominal two-node examples") {
  NetworkSpec net = TwoNodeNet();
  auto com = TwoNodeCommodities();
  std::vector<double> d{5.0};

  Model m = BuildNominal(net, com, d, 2.0);
  LpSolution sol = Solve(m.lp);
  REQUIRE(sol.status == SolveStatus::kOptimal);
  CHECK(sol.objective == doctest::Approx(5.0));
  CHECK(ExtractFirstStage(sol, m.catalog)[0] == doctest::Approx(5.0));

  m = BuildNominal(net, com, d, 0.5);
  sol = Solve(m.lp);
  CHECK(sol.objective == doctest::Approx(2.5));
  CHECK(ExtractFirstStage(sol, m.catalog)[0] == doctest::Approx(0.0));

  std::vector<double> zero{0.0};
  m = BuildNominal(net, com, zero, 2.0);
  sol = Solve(m.lp);
  CHECK(sol.objective == doctest::Approx(0.0));
  CHECK(ExtractFirstStage(sol, m.catalog)[0] == 0.0);
}

TEST_CASE("nominal input errors") {
  NetworkSpec net = TwoNodeNet();
  std::vector<double> d{1.0};
  CHECK_THROWS_AS(BuildNominal(net, {{"s", "s"}}, d, 1.0), Error);
  CHECK_THROWS_AS(BuildNominal(net, {{"s", "x"}}, d, 1.0), Error);
  CHECK_THROWS_AS(BuildNominal(net, TwoNodeCommodities(), d, -1.0), Error);
  std::vector<double> neg{-1.0};
  CHECK_THROWS_AS(BuildNominal(net, TwoNodeCommodities(), neg, 1.0), Error);
  std::vector<double> two{1.0, 2.0};
  CHECK_THROWS_AS(BuildNominal(net, TwoNodeCommodities(), two, 1.0), Error);
}

TEST_CASE("discrete robust examples and collapse") {
  NetworkSpec net = TwoNodeNet();
  auto com = TwoNodeCommodities();
  DiscreteSet u{{{3.0}, {5.0}}, 1.0};
  Model m = BuildDiscreteRobust(net, com, u, 2.0);
  LpSolution sol = Solve(m.lp);
  REQUIRE(sol.status == SolveStatus::kOptimal);
  CHECK(sol.objective == doctest::Approx(5.0));
  CHECK(ExtractFirstStage(sol, m.catalog)[0] == doctest::Approx(5.0));

  DiscreteSet zeros{{{0.0}, {0.0}}, 1.0};
  CHECK(SolveValue(BuildDiscreteRobust(net, com, zeros, 2.0).lp) == doctest::Approx(0.0));
  CHECK_THROWS_AS(BuildDiscreteRobust(net, com, DiscreteSet{}, 1.0), Error);

  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    RandomInstance in = MakeInstance(seed, 3, 2);
    const auto& d = in.train.demands[0];
    double nominal = SolveValue(BuildNominal(in.net, in.commodities, d, 7.0).lp);
    DiscreteSet one{{d}, 1.0};
    CHECK(SolveValue(BuildDiscreteRobust(in.net, in.commodities, one, 7.0).lp) ==
          doctest::Approx(nominal).epsilon(1e-9));
    DiscreteSet same{{d, d, d}, 1.0};
    CHECK(std::abs(SolveValue(BuildDiscreteRobust(in.net, in.commodities, same, 7.0).lp) -
                   nominal) <= 1e-9 * std::max(1.0, nominal));
  }
}

TEST_CASE("variable counts follow the index sets") {
  RandomInstance in = MakeInstance(11, 3, 4);
  const std::size_t na = in.net.arcs.size();
  const std::size_t kk = 3;
  const std::size_t nn = 5;
  DiscreteSet u = BuildDiscreteSet(in.train.SelectRows({0, 1, 2, 3, 4}), 1.0);
  Model d = BuildDiscreteRobust(in.net, in.commodities, u, 1.0);
  CHECK(d.lp.num_cols() == na + nn * kk * na + nn * kk + 1);
  CHECK(d.catalog.size() == d.lp.num_cols());
  CHECK(d.catalog.Count(VarFamily::kF) == nn * kk * na);

  Model a = BuildAarc(in.net, in.commodities, in.poly, 1.0);
  const std::size_t m = in.poly.row_count();
  const std::size_t inner = kk * (in.net.nodes.size() - 2);
  CHECK(a.catalog.size() == a.lp.num_cols());
  CHECK(a.catalog.Count(VarFamily::kX) == na);
  CHECK(a.catalog.Count(VarFamily::kPhi) == kk * na);
  CHECK(a.catalog.Count(VarFamily::kPhi2) == kk * kk * na);
  CHECK(a.catalog.Count(VarFamily::kAlpha) == inner * m);
  CHECK(a.catalog.Count(VarFamily::kBetaUp) == inner * kk);
  CHECK(a.catalog.Count(VarFamily::kPi) == na * m);
  CHECK(a.catalog.Count(VarFamily::kRhoLo) == na * kk);
  CHECK(a.catalog.Count(VarFamily::kXi) == kk * na * m);
  CHECK(a.catalog.Count(VarFamily::kZetaUp) == kk * na * kk);
  CHECK(a.catalog.Count(VarFamily::kQ) == m);
  CHECK(a.catalog.Count(VarFamily::kR) == kk * kk);
  CHECK(a.catalog.Count(VarFamily::kVdual) == kk);
  CHECK(a.catalog.Count(VarFamily::kW) == kk);
  std::set<std::string> names;
  for (const auto& n : a.catalog.Names()) names.insert(n);
  CHECK(names.size() == a.catalog.size());
}

TEST_CASE("aarc two-node examples") {
  NetworkSpec net = TwoNodeNet();
  auto com = TwoNodeCommodities();
  Model m = BuildAarc(net, com, Box(3.0, 5.0), 2.0);
  LpSolution sol = Solve(m.lp);
  REQUIRE(sol.status == SolveStatus::kOptimal);
  CHECK(sol.objective == doctest::Approx(5.0));
  CHECK(ExtractFirstStage(sol, m.catalog)[0] == doctest::Approx(5.0));

  m = BuildAarc(net, com, Box(3.0, 5.0), 0.0);
  sol = Solve(m.lp);
  CHECK(sol.objective == doctest::Approx(0.0));
  CHECK(ExtractFirstStage(sol, m.catalog)[0] == doctest::Approx(0.0));

  Polyhedron two = Box(3.0, 5.0);
  two.lower.push_back(0.0);
  two.upper.push_back(1.0);
  CHECK_THROWS_AS(BuildAarc(net, com, two, 1.0), Error);
}

TEST_CASE("aarc of a point equals the nominal model") {
  for (std::uint64_t seed = 1; seed <= 4; ++seed) {
    RandomInstance in = MakeInstance(seed, 2, 3);
    const auto& d = in.train.demands[seed % in.train.scenario_count()];
    ScenarioSet point = MakeSet(in.commodities, {d});
    Polyhedron p = SampleHyperplanes(point, 3, seed);
    double nominal = SolveValue(BuildNominal(in.net, in.commodities, d, 9.0).lp);
    Model m = BuildAarc(in.net, in.commodities, p, 9.0);
    LpSolution sol = Solve(m.lp);
    REQUIRE(sol.status == SolveStatus::kOptimal);
    CHECK(std::abs(sol.objective - nominal) <= 1e-6 * std::max(1.0, nominal));
    // The policy at d* routes everything the nominal flow routes.
    AffinePolicy pol = ExtractAffinePolicy(sol, m.catalog);
    auto ends = ResolveCommodities(in.net, in.commodities);
    std::vector<double> x = ExtractFirstStage(sol, m.catalog);
    CHECK(InvestCost(in.net, x) + 9.0 * PolicyOutsourcing(in.net, ends, pol, d) ==
          doctest::Approx(nominal).epsilon(1e-6));
  }
}

TEST_CASE("stochastic mean model is the nominal model on the mean") {
  NetworkSpec net = TwoNodeNet();
  auto com = TwoNodeCommodities();
  MeanDemand mean = ZeroInflatedMean(MakeSet(com, {{2.0}, {0.0}, {4.0}}));
  REQUIRE(mean.mean[0] == doctest::Approx(2.0));
  Model s = BuildStochasticMean(net, com, mean, 2.0);
  LpSolution sol = Solve(s.lp);
  CHECK(sol.objective == doctest::Approx(2.0));
  CHECK(ExtractFirstStage(sol, s.catalog)[0] == doctest::Approx(2.0));
  CHECK(SolveValue(BuildStochasticMean(net, com, MeanDemand{{0.0}}, 2.0).lp) == 0.0);

  RandomInstance in = MakeInstance(3, 3, 2);
  MeanDemand m2 = ZeroInflatedMean(in.train);
  Model a = BuildStochasticMean(in.net, in.commodities, m2, 4.0);
  Model b = BuildNominal(in.net, in.commodities, m2.mean, 4.0);
  CHECK(a.lp.costs() == b.lp.costs());
  CHECK(a.lp.rhs() == b.lp.rhs());
  CHECK(a.lp.senses() == b.lp.senses());
  CHECK(a.lp.triplets().size() == b.lp.triplets().size());
  CHECK(a.catalog.Names() == b.catalog.Names());
}

TEST_CASE("evaluation flow examples") {
  NetworkSpec net = TwoNodeNet();
  auto com = TwoNodeCommodities();
  std::vector<double> x{5.0};
  std::vector<double> d3{3.0}, d7{7.0};
  CHECK(SolveValue(BuildEvaluationFlow(net, com, x, d3).lp) == doctest::Approx(0.0));
  CHECK(SolveValue(BuildEvaluationFlow(net, com, x, d7).lp) == doctest::Approx(2.0));
  std::vector<double> none{0.0};
  CHECK(SolveValue(BuildEvaluationFlow(net, com, none, d7).lp) == doctest::Approx(7.0));
  std::vector<double> neg{-1.0};
  CHECK_THROWS_AS(BuildEvaluationFlow(net, com, neg, d7), Error);

  Model m = BuildEvaluationFlow(net, com, x, d7);
  CHECK(m.catalog.Count(VarFamily::kX) == 0);
  CHECK(m.lp.costs() == std::vector<double>{0.0, 1.0});
}

TEST_CASE("extract first stage checks lengths") {
  Model m = BuildNominal(TwoNodeNet(), TwoNodeCommodities(), std::vector<double>{1.0}, 1.0);
  LpSolution sol;
  sol.x = {1.0};
  CHECK_THROWS_AS(ExtractFirstStage(sol, m.catalog), Error);
}

TEST_CASE("outsourcing oracle examples") {
  NetworkSpec net = TwoNodeNet();
  auto ends = ResolveCommodities(net, TwoNodeCommodities());
  AffinePolicy zero{{{0.0}}, {{{0.0}}}};
  CHECK(WorstCaseOutsourcingOracle(net, ends, Box(3.0, 5.0), zero, 2.0) ==
        doctest::Approx(10.0));
  AffinePolicy exact{{{0.0}}, {{{1.0}}}};
  CHECK(WorstCaseOutsourcingOracle(net, ends, Box(3.0, 5.0), exact, 2.0) ==
        doctest::Approx(0.0));

  std::vector<Endpoints> many(13, Endpoints{0, 1});
  Polyhedron big;
  big.V = {std::vector<double>(13, 1.0)};
  big.b = {1.0};
  big.lower.assign(13, 0.0);
  big.upper.assign(13, 1.0);
  AffinePolicy p13;
  p13.phi.assign(13, std::vector<double>(1, 0.0));
  p13.Phi.assign(13, std::vector<std::vector<double>>(13, std::vector<double>(1, 0.0)));
  CHECK_THROWS_AS(WorstCaseOutsourcingOracle(net, many, big, p13, 1.0), Error);
}

TEST_CASE("worst-case duals match direct maximization for all three families") {
  for (std::uint64_t seed = 1; seed <= 6; ++seed) {
    RandomInstance in = MakeInstance(100 + seed, 3, 4);
    Rng rng(seed);
    AffinePolicy pol = RandomPolicy(rng, 3, in.net.arcs.size());
    auto ends = ResolveCommodities(in.net, in.commodities);
    auto vertices = VertexEnumerate(in.poly);
    REQUIRE_FALSE(vertices.empty());

    auto check = [&](const std::vector<double>& g) {
      LpSolution primal = Solve(BuildWorstCasePrimal(in.poly, g));
      LpSolution dual = Solve(BuildWorstCaseDual(in.poly, g));
      REQUIRE(primal.status == SolveStatus::kOptimal);
      REQUIRE(dual.status == SolveStatus::kOptimal);
      double best = -kInf;
      for (const auto& v : vertices) best = std::max(best, Dot(g, v));
      CHECK(std::abs(-primal.objective - dual.objective) <= 1e-6);
      CHECK(std::abs(best - dual.objective) <= 1e-6);
    };
    for (std::size_t k = 0; k < 3; ++k) {
      for (std::size_t v = 0; v < in.net.nodes.size(); ++v) {
        if (v == ends[k].source || v == ends[k].sink) continue;
        check(FlowFamilyCoefficients(in.net, pol, k, v));
      }
    }
    for (std::size_t a = 0; a < in.net.arcs.size(); ++a) {
      check(CapacityFamilyCoefficients(pol, a));
      for (std::size_t k = 0; k < 3; ++k) check(PositivityFamilyCoefficients(pol, k, a));
    }
  }
}

TEST_CASE("oracle equals the vertex maximum and is bounded by the relaxed dual") {
  Rng rng(77);
  for (int trial = 0; trial < 50; ++trial) {
    RandomInstance in = MakeInstance(200 + trial, 1 + trial % 3, 3);
    const std::size_t kk = in.commodities.size();
    AffinePolicy pol = RandomPolicy(rng, kk, in.net.arcs.size());
    auto ends = ResolveCommodities(in.net, in.commodities);
    double sigma = 3.0;
    double oracle = WorstCaseOutsourcingOracle(in.net, ends, in.poly, pol, sigma);
    double vertex_max = 0.0;
    for (const auto& v : VertexEnumerate(in.poly)) {
      vertex_max = std::max(vertex_max, PolicyOutsourcing(in.net, ends, pol, v));
    }
    CHECK(oracle == doctest::Approx(sigma * vertex_max).epsilon(1e-7));
    double relaxed = SolveValue(BuildOutsourcingDual(in.net, ends, in.poly, pol));
    CHECK(oracle <= sigma * relaxed + 1e-6);
  }
}

TEST_CASE("aarc policy is feasible on sampled demands") {
  RandomInstance in = MakeInstance(5, 2, 3);
  const double sigma = 6.0;
  Model m = BuildAarc(in.net, in.commodities, in.poly, sigma);
  LpSolution sol = Solve(m.lp);
  REQUIRE(sol.status == SolveStatus::kOptimal);
  AffinePolicy pol = ExtractAffinePolicy(sol, m.catalog);
  std::vector<double> x = ExtractFirstStage(sol, m.catalog);
  auto ends = ResolveCommodities(in.net, in.commodities);

  Rng rng(9);
  std::size_t accepted = 0;
  double worst = 0.0;
  while (accepted < 1000) {
    std::vector<double> d(in.poly.dimension());
    for (std::size_t l = 0; l < d.size(); ++l) {
      d[l] = rng.Uniform(in.poly.lower[l], in.poly.upper[l]);
    }
    if (!Contains(in.poly, d)) continue;
    ++accepted;
    worst = std::max(worst, MaxPolicyViolation(in.net, ends, pol, x, d));
  }
  CHECK(worst <= 1e-6);
  for (const auto& v : VertexEnumerate(in.poly)) {
    CHECK(MaxPolicyViolation(in.net, ends, pol, x, v) <= 1e-6);
  }
  double oracle = WorstCaseOutsourcingOracle(in.net, ends, in.poly, pol, sigma);
  CHECK(InvestCost(in.net, x) + oracle <= sol.objective + 1e-6);
}

TEST_CASE("discrete over points of the polyhedron lower-bounds the aarc") {
  for (std::uint64_t seed = 1; seed <= 3; ++seed) {
    RandomInstance in = MakeInstance(300 + seed, 2, 3);
    double aarc = SolveValue(BuildAarc(in.net, in.commodities, in.poly, 5.0).lp);
    DiscreteSet train = BuildDiscreteSet(in.train, 1.0);
    DiscreteSet verts{VertexEnumerate(in.poly), 1.0};
    double d1 = SolveValue(BuildDiscreteRobust(in.net, in.commodities, train, 5.0).lp);
    double d2 = SolveValue(BuildDiscreteRobust(in.net, in.commodities, verts, 5.0).lp);
    CHECK(d1 <= aarc + 1e-6);
    CHECK(d2 <= aarc + 1e-6);
    CHECK(d1 <= d2 + 1e-6);
  }
}

TEST_CASE("objectives are non-decreasing in sigma") {
  RandomInstance in = MakeInstance(41, 2, 3);
  DiscreteSet u = BuildDiscreteSet(in.train, 1.0);
  std::vector<double> prev(3, -kInf);
  for (double sigma : {0.0, 0.5, 1.0, 2.0, 4.0, 8.0}) {
    double v[3] = {
        SolveValue(BuildNominal(in.net, in.commodities, in.train.demands[0], sigma).lp),
        SolveValue(BuildDiscreteRobust(in.net, in.commodities, u, sigma).lp),
        SolveValue(BuildAarc(in.net, in.commodities, in.poly, sigma).lp)};
    for (int i = 0; i < 3; ++i) {
      CHECK(v[i] >= prev[i] - 1e-7);
      prev[i] = v[i];
    }
  }
}

}  // namespace
}  // namespace rncep
