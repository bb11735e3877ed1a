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
#include <cstdlib>
#include <filesystem>
#include <string>

#include "doctest.h"
#include "json.hpp"
#include "rncep/error.hpp"
#include "rncep/pipeline.hpp"

namespace rncep {
namespace {

namespace fs = std::filesystem;

const fs::path kDesk = fs::path(RNCEP_TEST_DATA_DIR) / "desk";

struct TempDir {
  fs::path path;
  explicit TempDir(const std::string& name)
      : path(fs::temp_directory_path() / ("rncep_pipe_" + name)) {
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

ErrorCode CodeOf(auto&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("no error thrown");
  return ErrorCode::kInvalidArgument;
}

std::string DeskConfig(const std::string& experiments) {
  return "[data]\nnetwork = " + (kDesk / "desk.txt").string() +
         "\nscenarios = " + (kDesk / "scenarios").string() +
         "\nstride = 12\n[run]\noutput = out\nseed = 5\n" + experiments;
}

std::size_t CountLines(const std::string& text) {
  return static_cast<std::size_t>(std::count(text.begin(), text.end(), '\n'));
}

TEST_CASE("grid syntax") {
  auto g = ParseGrid("0:24900:11");
  REQUIRE(g.size() == 11);
  CHECK(g.front() == 0.0);
  CHECK(g[1] == 2490.0);
  CHECK(g.back() == 24900.0);
  CHECK(ParseGrid("0.5, 1") == std::vector<double>{0.5, 1.0});
  CHECK(ParseGrid("1 2\t3") == std::vector<double>{1, 2, 3});
  CHECK(ParseGrid("7:9:1") == std::vector<double>{7});
  CHECK(ParseGrid("").empty());
  CHECK(CodeOf([] { ParseGrid("1:2"); }) == ErrorCode::kConfig);
  CHECK(CodeOf([] { ParseGrid("1,x"); }) == ErrorCode::kConfig);
}

TEST_CASE("config parsing") {
  ExperimentConfig cfg = ParseConfig(DeskConfig("[experiment.d2]\nmodel = discrete\n"
                                                "commodities = 8\nsigma = 0:100:11\n"
                                                "lambda = 0.5, 1\n"
                                                "[experiment.p]\nmodel = aarc\ncommodities = 3\n"
                                                "sigma = 5\nhyperplanes = 1, 2\n"),
                                     "/base");
  CHECK(cfg.output == fs::path("/base/out"));
  CHECK(cfg.seed == 5);
  REQUIRE(cfg.experiments.size() == 2);
  CHECK(cfg.experiments[0].name == "d2");
  CHECK(cfg.experiments[0].point_count() == 22);
  CHECK(cfg.experiments[1].model == ModelTag::kAarc);
  CHECK(cfg.experiments[1].point_count() == 2);
  CHECK_NOTHROW(cfg.Validate());

  ExperimentConfig plain = ParseConfig(
      DeskConfig("[experiment.d]\nmodel = discrete\ncommodities = 2\nsigma = 1\n"), "/");
  CHECK(plain.experiments[0].lambdas == std::vector<double>{1.0});
}

TEST_CASE("config errors") {
  auto invalid = [](const std::string& exp) {
    return CodeOf([&] { ParseConfig(DeskConfig(exp), "/").Validate(); });
  };
  CHECK(invalid("[experiment.e]\nmodel = nominal\ncommodities = 2\nsigma =\n") ==
        ErrorCode::kConfig);
  CHECK(invalid("[experiment.e]\nmodel = nominal\ncommodities = 2\n") == ErrorCode::kConfig);
  CHECK(invalid("[experiment.e]\nmodel = nominal\ncommodities = 0\nsigma = 1\n") ==
        ErrorCode::kConfig);
  CHECK(invalid("[experiment.e]\nmodel = nominal\ncommodities = 2\nsigma = -1\n") ==
        ErrorCode::kConfig);
  CHECK(invalid("[experiment.e]\nmodel = discrete\ncommodities = 2\nsigma = 1\nlambda = 2\n") ==
        ErrorCode::kConfig);
  CHECK(invalid("[experiment.e]\nmodel = nominal\ncommodities = 2\nsigma = 1\nlambda = 1\n") ==
        ErrorCode::kConfig);
  CHECK(invalid("[experiment.e]\nmodel = magic\ncommodities = 2\nsigma = 1\n") ==
        ErrorCode::kConfig);
  CHECK(invalid("[experiment.e]\nmodel = nominal\ncommodities = 2\nsigma = 1\ncolour = red\n") ==
        ErrorCode::kConfig);
  CHECK(invalid("[bogus]\nx = 1\n") == ErrorCode::kConfig);
  CHECK(invalid("") == ErrorCode::kConfig);
}

TEST_CASE("seed override from the environment") {
  TempDir dir("env");
  WriteTextFile(dir.path / "c.ini",
                DeskConfig("[experiment.e]\nmodel = nominal\ncommodities = 2\nsigma = 1\n"));
  CHECK(LoadConfig(dir.path / "c.ini").seed == 5);
  ::setenv("RNCEP_SEED", "99", 1);
  CHECK(LoadConfig(dir.path / "c.ini").seed == 99);
  ::unsetenv("RNCEP_SEED");
  CHECK(CodeOf([&] { LoadConfig(dir.path / "missing.ini"); }) == ErrorCode::kIo);
}

TEST_CASE("FNV-1a") {
  CHECK(HashText("") == "cbf29ce484222325");
  CHECK(HashText("a") == "af63dc4c8601ec8c");
}

TEST_CASE("stages report missing upstream artifacts") {
  TempDir dir("missing");
  SetsRequest sets;
  sets.commodities = {2};
  CHECK(CodeOf([&] { StageBuildSets(dir.path, sets); }) == ErrorCode::kMissingArtifact);
  SolveRequest req;
  req.model = ModelTag::kNominal;
  req.experiment = "n";
  req.commodities = 2;
  CHECK(CodeOf([&] { StageSolve(dir.path, req); }) == ErrorCode::kMissingArtifact);
  CHECK(CodeOf([&] { StageEvaluate(dir.path, dir.path / "solutions" / "x.json"); }) ==
        ErrorCode::kMissingArtifact);
  CHECK(CodeOf([&] { StageFrontier({dir.path / "r.json"}, {}); }) ==
        ErrorCode::kMissingArtifact);

  StageParse(kDesk / "desk.txt", kDesk / "scenarios", CostRule::kFirstModuleCost, dir.path);
  sets.lambdas = {1.0};
  StageBuildSets(dir.path, sets);
  req.model = ModelTag::kDiscrete;
  req.lambda = 0.5;  // not built
  CHECK(CodeOf([&] { StageSolve(dir.path, req); }) == ErrorCode::kMissingArtifact);
  req.commodities = 3;  // K not built
  req.lambda = 1.0;
  CHECK(CodeOf([&] { StageSolve(dir.path, req); }) == ErrorCode::kMissingArtifact);
  req.commodities = 2;
  CHECK_NOTHROW(StageSolve(dir.path, req));
}

TEST_CASE("point names") {
  SolveRequest req;
  req.experiment = "disc2";
  req.sigma = 2490;
  req.lambda = 0.5;
  CHECK(PointName(req) == "disc2_sigma2490_lambda0.5");
  req.lambda.reset();
  req.hyperplanes = 3;
  CHECK(PointName(req) == "disc2_sigma2490_M3");
}

TEST_CASE("discrete grid on the desk instance") {
  TempDir dir("grid");
  ExperimentConfig cfg = ParseConfig(
      DeskConfig("[experiment.disc2]\nmodel = discrete\ncommodities = 8\n"
                 "sigma = 0:100:11\nlambda = 0.5, 1.0\n"),
      dir.path);
  RunSummary run = RunExperiment(cfg);
  CHECK(run.solved == 22);
  std::string csv = ReadTextFile(run.frontier);
  CHECK(CountLines(csv) == 23);
  CHECK(csv.rfind(kFrontierHeader, 0) == 0);

  auto manifest = nlohmann::json::parse(ReadTextFile(run.manifest));
  CHECK(manifest.at("points").size() == 22);
  CHECK(manifest.at("seed") == 5);

  // re-running one point on its own reproduces its solution file
  const auto& point = manifest.at("points").at(7);
  const fs::path solution = cfg.output / point.at("solution").get<std::string>();
  const std::string before = ReadTextFile(solution);
  SolveRequest req;
  req.experiment = point.at("experiment").get<std::string>();
  req.model = ParseModelTag(point.at("model").get<std::string>());
  req.sigma = point.at("sigma").get<double>();
  req.lambda = point.at("lambda").get<double>();
  req.commodities = point.at("K").get<std::size_t>();
  req.options = cfg.solver;
  CHECK(StageSolve(cfg.output, req) == solution);
  CHECK(ReadTextFile(solution) == before);
}

TEST_CASE("runs are deterministic across thread counts") {
  TempDir dir("threads");
  const std::string exps =
      "[experiment.n]\nmodel = nominal\ncommodities = 4\nsigma = 0:80:4\n"
      "[experiment.s]\nmodel = stochastic\ncommodities = 4\nsigma = 0:80:4\n"
      "[experiment.p]\nmodel = aarc\ncommodities = 3\nsigma = 10, 60\nhyperplanes = 1, 2\n";
  ExperimentConfig one = ParseConfig(DeskConfig(exps), dir.path / "a");
  ExperimentConfig two = ParseConfig(DeskConfig(exps), dir.path / "b");
  two.threads = 3;
  RunSummary a = RunExperiment(one);
  RunSummary b = RunExperiment(two);
  CHECK(a.solved == 12);
  CHECK(ReadTextFile(a.frontier) == ReadTextFile(b.frontier));
}

TEST_CASE("failed runs leave a marker") {
  TempDir dir("failed");
  ExperimentConfig cfg = ParseConfig(
      DeskConfig("[experiment.e]\nmodel = nominal\ncommodities = 9\nsigma = 1\n"), dir.path);
  CHECK_THROWS_AS(RunExperiment(cfg), Error);
  CHECK(fs::exists(cfg.output / "FAILED"));
  CHECK(fs::exists(cfg.output / "network.json"));
}

TEST_CASE("network JSON round trip") {
  NetworkSpec net = ReadNetworkFile(kDesk / "desk.txt");
  TempDir dir("json");
  WriteTextFile(dir.path / "n.json", WriteNetworkJson(net));
  CHECK(ReadNetworkJson(dir.path / "n.json") == net);
}

}  // namespace
}  // namespace rncep
