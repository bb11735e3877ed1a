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

#include "rncep/rncep.h"

#include <cstring>
#include <exception>
#include <filesystem>
#include <new>
#include <span>
#include <string>
#include <vector>

#include "rncep/error.hpp"
#include "rncep/evaluate.hpp"
#include "rncep/pipeline.hpp"
#include "rncep/sndlib_io.hpp"

struct rncep_network {
  rncep::NetworkSpec data;
};

struct rncep_scenarios {
  rncep::ScenarioSet set;
};

struct rncep_config {
  rncep::ExperimentConfig config;
};

namespace {

thread_local std::string g_last_error;

rncep_status ToStatus(rncep::ErrorCode code) {
  switch (code) {
    case rncep::ErrorCode::kInvalidArgument: return RNCEP_ERR_INVALID_ARGUMENT;
    case rncep::ErrorCode::kParse: return RNCEP_ERR_PARSE;
    case rncep::ErrorCode::kIo: return RNCEP_ERR_IO;
    case rncep::ErrorCode::kSolver: return RNCEP_ERR_SOLVER;
    case rncep::ErrorCode::kMissingArtifact: return RNCEP_ERR_MISSING_ARTIFACT;
    case rncep::ErrorCode::kConfig: return RNCEP_ERR_CONFIG;
  }
  return RNCEP_ERR_INTERNAL;
}

template <class F>
rncep_status Guard(F&& body) {
  g_last_error.clear();
  try {
    body();
    return RNCEP_OK;
  } catch (const rncep::Error& e) {
    g_last_error = e.what();
    return ToStatus(e.code());
  } catch (const std::bad_alloc&) {
    g_last_error = "out of memory";
  } catch (const std::filesystem::filesystem_error& e) {
    g_last_error = e.what();
    return RNCEP_ERR_IO;
  } catch (const std::exception& e) {
    g_last_error = e.what();
  } catch (...) {
    g_last_error = "unknown exception";
  }
  return RNCEP_ERR_INTERNAL;
}

void Require(bool ok, const char* what) {
  if (!ok) rncep::Fail(rncep::ErrorCode::kInvalidArgument, what);
}

rncep::CostRule ToCostRule(rncep_cost_rule rule) {
  switch (rule) {
    case RNCEP_COST_FIRST_MODULE: return rncep::CostRule::kFirstModuleCost;
    case RNCEP_COST_CHEAPEST_PER_UNIT: return rncep::CostRule::kCheapestPerUnit;
  }
  rncep::Fail(rncep::ErrorCode::kInvalidArgument, "unknown cost rule");
}

void CopyPath(const std::filesystem::path& path, char* out, std::size_t capacity) {
  if (out == nullptr) return;
  const std::string text = path.string();
  Require(text.size() < capacity, "path buffer too small");
  std::memcpy(out, text.c_str(), text.size() + 1);
}

rncep::SolveRequest ToRequest(const rncep_solve_request* r) {
  Require(r != nullptr && r->model != nullptr, "solve request needs a model");
  rncep::SolveRequest req;
  req.model = rncep::ParseModelTag(r->model);
  req.experiment = (r->experiment != nullptr && *r->experiment != '\0')
                       ? std::string(r->experiment)
                       : std::string(r->model);
  req.sigma = r->sigma;
  if (r->has_lambda != 0) req.lambda = r->lambda;
  if (r->hyperplanes != 0) req.hyperplanes = r->hyperplanes;
  req.commodities = r->commodities;
  return req;
}

void CopyMetrics(const rncep::Metrics& m, double out[4]) {
  out[0] = m.mean;
  out[1] = m.max;
  out[2] = m.cvar;
  out[3] = m.std;
}

}  // namespace

extern "C" {

const char* rncep_version(void) { return "0.1.0"; }

const char* rncep_last_error(void) { return g_last_error.c_str(); }

const char* rncep_status_string(rncep_status status) {
  switch (status) {
    case RNCEP_OK: return "ok";
    case RNCEP_ERR_INVALID_ARGUMENT: return "invalid argument";
    case RNCEP_ERR_PARSE: return "parse error";
    case RNCEP_ERR_IO: return "i/o error";
    case RNCEP_ERR_SOLVER: return "solver error";
    case RNCEP_ERR_MISSING_ARTIFACT: return "missing artifact";
    case RNCEP_ERR_CONFIG: return "config error";
    case RNCEP_ERR_INTERNAL: return "internal error";
  }
  return "unknown status";
}

rncep_status rncep_network_read(const char* path, rncep_cost_rule rule, rncep_network** out) {
  return Guard([&] {
    Require(path != nullptr && out != nullptr, "null argument");
    *out = nullptr;
    rncep::NetworkParseOptions options;
    options.cost_rule = ToCostRule(rule);
    *out = new rncep_network{rncep::ReadNetworkFile(path, options)};
  });
}

void rncep_network_free(rncep_network* net) { delete net; }

size_t rncep_network_node_count(const rncep_network* net) {
  return net == nullptr ? 0 : net->data.nodes.size();
}

size_t rncep_network_arc_count(const rncep_network* net) {
  return net == nullptr ? 0 : net->data.arcs.size();
}

rncep_status rncep_scenarios_read(const char* path, const rncep_network* net,
                                  rncep_scenarios** out) {
  return Guard([&] {
    Require(path != nullptr && out != nullptr, "null argument");
    *out = nullptr;
    const std::filesystem::path p(path);
    rncep::ScenarioSet set = std::filesystem::is_directory(p)
                                 ? rncep::LoadScenarioDir(p, net ? &net->data : nullptr)
                                 : rncep::ReadScenarioCsvFile(p);
    *out = new rncep_scenarios{std::move(set)};
  });
}

void rncep_scenarios_free(rncep_scenarios* set) { delete set; }

size_t rncep_scenarios_count(const rncep_scenarios* set) {
  return set == nullptr ? 0 : set->set.scenario_count();
}

size_t rncep_scenarios_commodity_count(const rncep_scenarios* set) {
  return set == nullptr ? 0 : set->set.commodity_count();
}

rncep_status rncep_scenarios_write_csv(const rncep_scenarios* set, const char* path) {
  return Guard([&] {
    Require(set != nullptr && path != nullptr, "null argument");
    rncep::WriteScenarioCsvFile(set->set, path);
  });
}

rncep_status rncep_cvar(const double* values, size_t n, double alpha, double* out) {
  return Guard([&] {
    Require(out != nullptr && (values != nullptr || n == 0), "null argument");
    *out = rncep::Cvar(std::span<const double>(values, n), alpha);
  });
}

rncep_status rncep_metrics(const double* values, size_t n, double out[4]) {
  return Guard([&] {
    Require(out != nullptr && (values != nullptr || n == 0), "null argument");
    CopyMetrics(rncep::ComputeMetrics(std::span<const double>(values, n)), out);
  });
}

rncep_status rncep_correlation(const double* a, const double* b, size_t n, double* out) {
  return Guard([&] {
    Require(out != nullptr && ((a != nullptr && b != nullptr) || n == 0), "null argument");
    *out = rncep::Correlation(std::span<const double>(a, n), std::span<const double>(b, n));
  });
}

rncep_status rncep_config_load(const char* path, rncep_config** out) {
  return Guard([&] {
    Require(path != nullptr && out != nullptr, "null argument");
    *out = nullptr;
    *out = new rncep_config{rncep::LoadConfig(path)};
  });
}

void rncep_config_free(rncep_config* cfg) { delete cfg; }

rncep_status rncep_config_set_output(rncep_config* cfg, const char* dir) {
  return Guard([&] {
    Require(cfg != nullptr && dir != nullptr && *dir != '\0', "null argument");
    cfg->config.output = dir;
  });
}

rncep_status rncep_config_set_seed(rncep_config* cfg, uint64_t seed) {
  return Guard([&] {
    Require(cfg != nullptr, "null argument");
    cfg->config.seed = seed;
  });
}

rncep_status rncep_config_set_threads(rncep_config* cfg, size_t threads) {
  return Guard([&] {
    Require(cfg != nullptr && threads > 0, "threads must be positive");
    cfg->config.threads = threads;
  });
}

size_t rncep_config_point_count(const rncep_config* cfg) {
  if (cfg == nullptr) return 0;
  size_t total = 0;
  for (const auto& e : cfg->config.experiments) total += e.point_count();
  return total;
}

rncep_status rncep_run_experiment(const rncep_config* cfg, size_t* solved) {
  return Guard([&] {
    Require(cfg != nullptr, "null argument");
    const rncep::RunSummary summary = rncep::RunExperiment(cfg->config);
    if (solved != nullptr) *solved = summary.solved;
  });
}

rncep_status rncep_stage_parse(const char* network, const char* scenarios, rncep_cost_rule rule,
                               const char* workdir) {
  return Guard([&] {
    Require(network != nullptr && scenarios != nullptr && workdir != nullptr, "null argument");
    rncep::StageParse(network, scenarios, ToCostRule(rule), workdir);
  });
}

rncep_status rncep_stage_build_sets(const char* workdir, const rncep_sets_request* request) {
  return Guard([&] {
    Require(workdir != nullptr && request != nullptr, "null argument");
    Require(request->commodities != nullptr || request->n_commodities == 0, "null commodities");
    Require(request->lambdas != nullptr || request->n_lambdas == 0, "null lambdas");
    Require(request->hyperplanes != nullptr || request->n_hyperplanes == 0, "null hyperplanes");
    rncep::SetsRequest req;
    req.stride = request->stride;
    req.eval_commodities = request->eval_commodities;
    req.commodities.assign(request->commodities, request->commodities + request->n_commodities);
    req.lambdas.assign(request->lambdas, request->lambdas + request->n_lambdas);
    req.hyperplanes.assign(request->hyperplanes, request->hyperplanes + request->n_hyperplanes);
    req.seed = request->seed;
    rncep::StageBuildSets(workdir, req);
  });
}

rncep_status rncep_stage_solve(const char* workdir, const rncep_solve_request* request,
                               char* path_out, size_t path_capacity, double* objective) {
  return Guard([&] {
    Require(workdir != nullptr, "null argument");
    rncep::SolveRecord record;
    const auto path = rncep::StageSolve(workdir, ToRequest(request), &record);
    CopyPath(path, path_out, path_capacity);
    if (objective != nullptr) *objective = record.objective;
  });
}

rncep_status rncep_stage_write_lp(const char* workdir, const rncep_solve_request* request,
                                  const char* lp_path) {
  return Guard([&] {
    Require(workdir != nullptr && lp_path != nullptr, "null argument");
    rncep::WriteTextFile(lp_path, rncep::StageWriteLp(workdir, ToRequest(request)));
  });
}

rncep_status rncep_stage_evaluate(const char* workdir, const char* solution, size_t threads,
                                  char* path_out, size_t path_capacity) {
  return Guard([&] {
    Require(workdir != nullptr && solution != nullptr, "null argument");
    rncep::EvaluateOptions options;
    options.threads = threads == 0 ? 1 : threads;
    CopyPath(rncep::StageEvaluate(workdir, solution, options), path_out, path_capacity);
  });
}

rncep_status rncep_stage_evaluate_investment(const char* workdir, const char* investment_csv,
                                             const char* report_json, size_t threads,
                                             double out_metrics[4]) {
  return Guard([&] {
    Require(workdir != nullptr && investment_csv != nullptr && report_json != nullptr,
            "null argument");
    rncep::EvaluateOptions options;
    options.threads = threads == 0 ? 1 : threads;
    const auto report =
        rncep::StageEvaluateInvestment(workdir, investment_csv, report_json, options);
    if (out_metrics != nullptr) CopyMetrics(report.metrics, out_metrics);
  });
}

rncep_status rncep_stage_frontier(const char* const* reports, size_t n, const char* out_csv) {
  return Guard([&] {
    Require(reports != nullptr || n == 0, "null argument");
    std::vector<std::filesystem::path> paths;
    for (size_t i = 0; i < n; ++i) {
      Require(reports[i] != nullptr, "null report path");
      paths.emplace_back(reports[i]);
    }
    rncep::StageFrontier(paths, out_csv == nullptr ? std::filesystem::path() : out_csv);
  });
}

}  // extern "C"
