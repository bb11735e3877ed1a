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

// rncep command line. Every subcommand is one call into librncep; the exit
// code is the returned status.

#include <cstdint>
#include <cstdio>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "rncep/rncep.h"

namespace {

int Report(rncep_status status) {
  if (status != RNCEP_OK) {
    std::fprintf(stderr, "rncep: %s: %s\n", rncep_status_string(status), rncep_last_error());
  }
  return static_cast<int>(status);
}

const std::map<std::string, rncep_cost_rule> kCostRules = {
    {"first_module", RNCEP_COST_FIRST_MODULE},
    {"cheapest_per_unit", RNCEP_COST_CHEAPEST_PER_UNIT}};

struct ParseArgs {
  std::string network, scenarios, workdir;
  rncep_cost_rule rule = RNCEP_COST_FIRST_MODULE;
};

struct SetsArgs {
  std::string workdir;
  std::size_t stride = 12;
  std::size_t eval_commodities = 0;
  std::vector<std::size_t> commodities;
  std::vector<double> lambdas;
  std::vector<std::size_t> hyperplanes;
  std::uint64_t seed = 1;
};

struct SolveArgs {
  std::string workdir, model, tag, write_lp;
  double sigma = 0.0;
  std::optional<double> lambda;
  std::size_t hyperplanes = 0;
  std::size_t commodities = 1;
};

struct EvaluateArgs {
  std::string workdir, solution, investment, out;
  std::size_t threads = 1;
};

struct FrontierArgs {
  std::vector<std::string> reports;
  std::string out;
};

struct RunArgs {
  std::string config, output;
  std::optional<std::uint64_t> seed;
  std::size_t threads = 0;
};

int RunParse(const ParseArgs& a) {
  return Report(rncep_stage_parse(a.network.c_str(), a.scenarios.c_str(), a.rule,
                                  a.workdir.c_str()));
}

int RunBuildSets(const SetsArgs& a) {
  rncep_sets_request req{};
  req.stride = a.stride;
  req.eval_commodities = a.eval_commodities;
  req.commodities = a.commodities.data();
  req.n_commodities = a.commodities.size();
  req.lambdas = a.lambdas.data();
  req.n_lambdas = a.lambdas.size();
  req.hyperplanes = a.hyperplanes.data();
  req.n_hyperplanes = a.hyperplanes.size();
  req.seed = a.seed;
  return Report(rncep_stage_build_sets(a.workdir.c_str(), &req));
}

int RunSolve(const SolveArgs& a) {
  rncep_solve_request req{};
  req.experiment = a.tag.c_str();
  req.model = a.model.c_str();
  req.sigma = a.sigma;
  req.has_lambda = a.lambda.has_value() ? 1 : 0;
  req.lambda = a.lambda.value_or(0.0);
  req.hyperplanes = a.hyperplanes;
  req.commodities = a.commodities;
  if (!a.write_lp.empty()) {
    return Report(rncep_stage_write_lp(a.workdir.c_str(), &req, a.write_lp.c_str()));
  }
  std::vector<char> path(4096);
  double objective = 0.0;
  const rncep_status s =
      rncep_stage_solve(a.workdir.c_str(), &req, path.data(), path.size(), &objective);
  if (s == RNCEP_OK) std::printf("%s objective=%.10g\n", path.data(), objective);
  return Report(s);
}

int RunEvaluate(const EvaluateArgs& a) {
  if (!a.solution.empty()) {
    std::vector<char> path(4096);
    const rncep_status s = rncep_stage_evaluate(a.workdir.c_str(), a.solution.c_str(),
                                                a.threads, path.data(), path.size());
    if (s == RNCEP_OK) std::printf("%s\n", path.data());
    return Report(s);
  }
  double m[4] = {0, 0, 0, 0};
  const rncep_status s = rncep_stage_evaluate_investment(
      a.workdir.c_str(), a.investment.c_str(), a.out.c_str(), a.threads, m);
  if (s == RNCEP_OK) {
    std::printf("mean=%.10g max=%.10g cvar10=%.10g std=%.10g\n", m[0], m[1], m[2], m[3]);
  }
  return Report(s);
}

int RunFrontier(const FrontierArgs& a) {
  std::vector<const char*> paths;
  for (const auto& r : a.reports) paths.push_back(r.c_str());
  return Report(rncep_stage_frontier(paths.data(), paths.size(), a.out.c_str()));
}

int RunConfig(const RunArgs& a) {
  rncep_config* cfg = nullptr;
  rncep_status s = rncep_config_load(a.config.c_str(), &cfg);
  if (s == RNCEP_OK && !a.output.empty()) s = rncep_config_set_output(cfg, a.output.c_str());
  if (s == RNCEP_OK && a.seed) s = rncep_config_set_seed(cfg, *a.seed);
  if (s == RNCEP_OK && a.threads > 0) s = rncep_config_set_threads(cfg, a.threads);
  std::size_t solved = 0;
  if (s == RNCEP_OK) s = rncep_run_experiment(cfg, &solved);
  if (s == RNCEP_OK) std::printf("solved %zu models\n", solved);
  const int code = Report(s);
  rncep_config_free(cfg);
  return code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Robust network capacity expansion"};
  app.set_version_flag("--version", std::string(rncep_version()));
  app.require_subcommand(1);

  ParseArgs parse;
  auto* p = app.add_subcommand("parse", "Read an SNDlib network and demand files");
  p->add_option("--network", parse.network, "SNDlib native network file")->required();
  p->add_option("--scenarios", parse.scenarios, "Demand directory or scenario CSV")->required();
  p->add_option("--workdir", parse.workdir, "Work directory")->required();
  p->add_option("--cost-rule", parse.rule, "first_module or cheapest_per_unit")
      ->transform(CLI::CheckedTransformer(kCostRules, CLI::ignore_case));

  SetsArgs sets;
  auto* b = app.add_subcommand("build-sets", "Split, truncate and build uncertainty sets");
  b->add_option("--workdir", sets.workdir, "Work directory")->required();
  b->add_option("--stride", sets.stride, "Every stride-th scenario trains")
      ->check(CLI::PositiveNumber);
  b->add_option("--eval-commodities", sets.eval_commodities, "Evaluation commodities (0: all)");
  b->add_option("--commodities", sets.commodities, "K values")->required()->delimiter(',');
  b->add_option("--lambda", sets.lambdas, "Discrete set lambdas")->delimiter(',');
  b->add_option("--hyperplanes", sets.hyperplanes, "Polyhedral M values")->delimiter(',');
  b->add_option("--seed", sets.seed, "Hyperplane seed");

  SolveArgs solve;
  auto* s = app.add_subcommand("solve", "Build and solve one model");
  s->add_option("--workdir", solve.workdir, "Work directory")->required();
  s->add_option("--model", solve.model, "nominal, discrete, stochastic or aarc")
      ->required()
      ->check(CLI::IsMember({"nominal", "discrete", "stochastic", "aarc"}));
  s->add_option("--sigma", solve.sigma, "Outsourcing price")->required();
  s->add_option("--lambda", solve.lambda, "Discrete set lambda");
  s->add_option("--hyperplanes", solve.hyperplanes, "Polyhedral M");
  s->add_option("--commodities", solve.commodities, "K")->check(CLI::PositiveNumber);
  s->add_option("--tag", solve.tag, "Experiment name used in file names");
  s->add_option("--write-lp", solve.write_lp, "Write the LP to this file instead of solving");

  EvaluateArgs eval;
  auto* e = app.add_subcommand("evaluate", "Evaluate a solution on the evaluation set");
  e->add_option("--workdir", eval.workdir, "Work directory")->required();
  auto* sol = e->add_option("--solution", eval.solution, "Solution JSON");
  auto* inv = e->add_option("--investment", eval.investment, "Investment CSV (arc,x)");
  e->add_option("--out", eval.out, "Report JSON (with --investment)")->needs(inv);
  e->add_option("--threads", eval.threads, "Worker threads")->check(CLI::PositiveNumber);
  sol->excludes(inv);
  inv->needs(e->get_option("--out"));

  FrontierArgs frontier;
  auto* f = app.add_subcommand("frontier", "Collect reports into a frontier CSV");
  f->add_option("reports", frontier.reports, "Report JSON files")->required();
  f->add_option("--out", frontier.out, "Frontier CSV")->required();

  RunArgs run;
  auto* r = app.add_subcommand("run", "Run every stage from a config file");
  r->alias("run_experiment");
  r->add_option("--config", run.config, "INI config")->required();
  r->add_option("--output", run.output, "Override [run] output");
  r->add_option("--seed", run.seed, "Override [run] seed");
  r->add_option("--threads", run.threads, "Override [run] threads");

  CLI11_PARSE(app, argc, argv);

  if (p->parsed()) return RunParse(parse);
  if (b->parsed()) return RunBuildSets(sets);
  if (s->parsed()) return RunSolve(solve);
  if (e->parsed()) {
    if (eval.solution.empty() && eval.investment.empty()) {
      std::fprintf(stderr, "evaluate: --solution or --investment is required\n");
      return RNCEP_ERR_INVALID_ARGUMENT;
    }
    return RunEvaluate(eval);
  }
  if (f->parsed()) return RunFrontier(frontier);
  return RunConfig(run);
}
