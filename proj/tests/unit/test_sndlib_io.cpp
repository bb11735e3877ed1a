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

#include <filesystem>
#include <string>

#include "doctest.h"
#include "fixtures.hpp"
#include "rncep/error.hpp"
#include "rncep/sndlib_io.hpp"
#include "rncep/uncertainty.hpp"

namespace rncep {
namespace {

namespace fs = std::filesystem;

const char* kTwoNode =
    "?SNDlib native format; type: network; version: 1.0\n"
    "# tiny\n"
    "NODES (\n"
    "  a ( 0.0 0.0 )\n"
    "  b ( 1.0 0.0 )\n"
    ")\n"
    "LINKS (\n"
    "  L1 ( a b ) 0.00 0.00 0.00 0.00 ( 1.00 1.00 )\n"
    ")\n";

ErrorCode CodeOf(auto&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("no error thrown");
  return ErrorCode::kInvalidArgument;
}

std::size_t LineOf(auto&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.line();
  }
  return 0;
}

struct TempDir {
  fs::path path;
  explicit TempDir(const std::string& name)
      : path(fs::temp_directory_path() / ("rncep_io_" + name)) {
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

std::string DemandFile(const std::string& body) {
  return "?SNDlib native format; type: demands; version: 1.0\nDEMANDS (\n" + body + ")\n";
}

TEST_CASE("two-node network expands to two arcs") {
  NetworkSpec net = ParseNetwork(kTwoNode);
  REQUIRE(net.nodes.size() == 2);
  REQUIRE(net.arcs.size() == 2);
  CHECK(net.arcs[0].tail == 0);
  CHECK(net.arcs[0].head == 1);
  CHECK(net.arcs[1].tail == 1);
  CHECK(net.arcs[1].head == 0);
  for (const Arc& a : net.arcs) {
    CHECK(a.capacity == 0.0);
    CHECK(a.cost == 1.0);
  }
  CHECK(net.arcs[0].id != net.arcs[1].id);
}

TEST_CASE("empty LINKS section") {
  NetworkSpec net = ParseNetwork("NODES (\n a ( 0 0 )\n)\nLINKS (\n)\n");
  CHECK(net.nodes.size() == 1);
  CHECK(net.arcs.empty());
}

TEST_CASE("expand undirected") {
  CHECK(ExpandUndirected({}).empty());
  std::vector<Arc> arcs = ExpandUndirected({{"l", 0, 1, 3.0, 5.0}});
  REQUIRE(arcs.size() == 2);
  CHECK(arcs[0].tail == 0);
  CHECK(arcs[0].head == 1);
  CHECK(arcs[0].capacity == 3.0);
  CHECK(arcs[0].cost == 5.0);
  CHECK(arcs[1].tail == 1);
  CHECK(arcs[1].head == 0);
  CHECK(arcs[1].capacity == 3.0);
  CHECK(arcs[1].cost == 5.0);

  std::vector<Link> many;
  for (std::size_t i = 0; i < 88; ++i) many.push_back({"l" + std::to_string(i), i % 5, 5, 1, 1});
  CHECK(ExpandUndirected(many).size() == 176);
}

TEST_CASE("cost rules") {
  const char* text =
      "NODES (\n a ( 0 0 )\n b ( 0 0 )\n)\nLINKS (\n"
      "  L ( a b ) 2.00 0.00 7.00 0.00 ( 4.00 20.00 40.00 100.00 )\n)\n";
  CHECK(ParseNetwork(text).arcs[0].cost == 20.0);
  NetworkParseOptions cheap;
  cheap.cost_rule = CostRule::kCheapestPerUnit;
  CHECK(ParseNetwork(text, cheap).arcs[0].cost == doctest::Approx(2.5));
  const char* no_modules =
      "NODES (\n a ( 0 0 )\n b ( 0 0 )\n)\nLINKS (\n  L ( a b ) 2.00 0.00 7.00 0.00 ( )\n)\n";
  CHECK(ParseNetwork(no_modules).arcs[0].cost == 7.0);
  CHECK(ParseNetwork(no_modules).arcs[0].capacity == 2.0);
}

TEST_CASE("network parse errors carry line numbers") {
  CHECK(CodeOf([] { ParseNetwork("LINKS (\n)\n"); }) == ErrorCode::kParse);
  const char* unknown =
      "NODES (\n a ( 0 0 )\n)\nLINKS (\n  L ( a zz ) 0 0 0 0 ( 1 1 )\n)\n";
  CHECK(CodeOf([&] { ParseNetwork(unknown); }) == ErrorCode::kParse);
  CHECK(LineOf([&] { ParseNetwork(unknown); }) == 5);
  const char* negative =
      "NODES (\n a ( 0 0 )\n b ( 0 0 )\n)\nLINKS (\n  L ( a b ) -1 0 0 0 ( 1 1 )\n)\n";
  CHECK(CodeOf([&] { ParseNetwork(negative); }) == ErrorCode::kParse);
  CHECK(LineOf([&] { ParseNetwork(negative); }) == 6);
  const char* negative_cost =
      "NODES (\n a ( 0 0 )\n b ( 0 0 )\n)\nLINKS (\n  L ( a b ) 1 0 0 0 ( 1 -3 )\n)\n";
  CHECK(LineOf([&] { ParseNetwork(negative_cost); }) == 6);
  const char* malformed = "NODES (\n a ( 0 0 )\n b ( 0 0 )\n)\nLINKS (\n  L ( a b ) 1 0\n)\n";
  CHECK(LineOf([&] { ParseNetwork(malformed); }) == 6);
}

TEST_CASE("demand files sum repeated pairs") {
  auto entries = ParseDemands(DemandFile(
      "  D1 ( a b ) 1 2.5 UNLIMITED\n  D2 ( a b ) 1 1.5 UNLIMITED\n  D3 ( b a ) 1 1 UNLIMITED\n"));
  REQUIRE(entries.size() == 2);
  CHECK(entries[0].commodity == Commodity{"a", "b"});
  CHECK(entries[0].value == 4.0);
  CHECK(entries[1].commodity == Commodity{"b", "a"});
}

TEST_CASE("scenario directory: single file") {
  TempDir dir("single");
  WriteTextFile(dir.path / "m0.txt", DemandFile("  D ( a b ) 1 5.0 UNLIMITED\n"));
  ScenarioSet set = LoadScenarioDir(dir.path);
  REQUIRE(set.scenario_count() == 1);
  REQUIRE(set.commodity_count() == 1);
  CHECK(set.demands[0][0] == 5.0);
  CHECK(set.labels[0] == "m0");
}

TEST_CASE("scenario directory: union of pairs with zeros") {
  TempDir dir("union");
  WriteTextFile(dir.path / "m1.txt", DemandFile("  D ( c d ) 1 2 UNLIMITED\n"));
  WriteTextFile(dir.path / "m0.txt", DemandFile("  D ( a b ) 1 1 UNLIMITED\n"));
  ScenarioSet set = LoadScenarioDir(dir.path);
  REQUIRE(set.commodities == std::vector<Commodity>{{"a", "b"}, {"c", "d"}});
  CHECK(set.demands == std::vector<std::vector<double>>{{1, 0}, {0, 2}});
  CHECK(set.labels == std::vector<std::string>{"m0", "m1"});
}

TEST_CASE("scenario directory errors") {
  TempDir dir("errors");
  CHECK(CodeOf([&] { LoadScenarioDir(dir.path); }) == ErrorCode::kInvalidArgument);
  WriteTextFile(dir.path / "m0.txt", DemandFile("  D ( a zz ) 1 1 UNLIMITED\n"));
  NetworkSpec net = ParseNetwork(kTwoNode);
  CHECK(CodeOf([&] { LoadScenarioDir(dir.path, &net); }) == ErrorCode::kInvalidArgument);
  CHECK(CodeOf([&] { LoadScenarioDir(dir.path / "nope"); }) == ErrorCode::kIo);
}

TEST_CASE("desk fixture loads") {
  const fs::path root = fs::path(RNCEP_TEST_DATA_DIR) / "desk";
  NetworkSpec net = ReadNetworkFile(root / "desk.txt");
  CHECK(net.nodes.size() == 6);
  CHECK(net.arcs.size() == 16);
  ScenarioSet set = LoadScenarioDir(root / "scenarios", &net);
  CHECK(set.scenario_count() == 96);
  CHECK(set.commodity_count() == 8);
  CHECK(std::is_sorted(set.commodities.begin(), set.commodities.end()));
}

TEST_CASE("scenario CSV round trip") {
  ScenarioSet one = testing::MakeSet({{"a", "b"}}, {{0.0}});
  std::string text = WriteScenarioCsv(one);
  CHECK(text.substr(text.find('\n') + 1) == "0\n");
  CHECK(ParseScenarioCsv(text) == one);

  Rng rng(11);
  ScenarioSet random = testing::MakeSet({{"a", "b"}, {"b", "c"}, {"c", "a"}}, {});
  for (int i = 0; i < 40; ++i) {
    random.demands.push_back({rng.Uniform(0, 1e6), rng.Uniform01() * 1e-9, 1.0 / 3.0});
    random.labels.push_back("t" + std::to_string(i));
  }
  CHECK(ParseScenarioCsv(WriteScenarioCsv(random)) == random);

  const fs::path root = fs::path(RNCEP_TEST_DATA_DIR) / "desk";
  ScenarioSet desk = LoadScenarioDir(root / "scenarios");
  TrainEvalSplit split = SplitTrainEval(desk, 12);
  CHECK(ParseScenarioCsv(WriteScenarioCsv(split.train)) == split.train);
}

TEST_CASE("scenario CSV errors") {
  CHECK(CodeOf([] { ParseScenarioCsv("a:b\n-1\n"); }) == ErrorCode::kParse);
  CHECK(CodeOf([] { ParseScenarioCsv("a:b,c:d\n1\n"); }) == ErrorCode::kParse);
  CHECK(CodeOf([] { ParseScenarioCsv("a:b\nxyz\n"); }) == ErrorCode::kParse);
  CHECK(CodeOf([] { ParseScenarioCsv(""); }) == ErrorCode::kParse);
}

TEST_CASE("shortest double formatting round trips") {
  for (double v : {0.0, 0.1, 1.0 / 3.0, 24900.0, 1e-300, 123456789.123456789}) {
    CHECK(ParseDouble(FormatDouble(v), 0) == v);
  }
  CHECK(FormatDouble(0.5) == "0.5");
}

}  // namespace
}  // namespace rncep
