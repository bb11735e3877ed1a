/* Copyright 2026 The rncep Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

/* C interface of librncep.
 *
 * Every fallible call returns an rncep_status. On failure the message is
 * available from rncep_last_error() until the next call on the same thread.
 * Handles are opaque; free them with the matching *_free function (NULL is
 * accepted).
 */

#ifndef RNCEP_RNCEP_H_
#define RNCEP_RNCEP_H_

#include <stddef.h>
#include <stdint.h>

#if defined(RNCEP_BUILDING_LIBRARY)
#define RNCEP_API __attribute__((visibility("default")))
#else
#define RNCEP_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum rncep_status {
  RNCEP_OK = 0,
  RNCEP_ERR_INVALID_ARGUMENT = 1,
  RNCEP_ERR_PARSE = 2,
  RNCEP_ERR_IO = 3,
  RNCEP_ERR_SOLVER = 4,
  RNCEP_ERR_MISSING_ARTIFACT = 5,
  RNCEP_ERR_CONFIG = 6,
  RNCEP_ERR_INTERNAL = 99
} rncep_status;

typedef enum rncep_cost_rule {
  RNCEP_COST_FIRST_MODULE = 0,
  RNCEP_COST_CHEAPEST_PER_UNIT = 1
} rncep_cost_rule;

typedef struct rncep_network rncep_network;
typedef struct rncep_scenarios rncep_scenarios;
typedef struct rncep_config rncep_config;

RNCEP_API const char* rncep_version(void);
RNCEP_API const char* rncep_last_error(void);
RNCEP_API const char* rncep_status_string(rncep_status status);

/* networks */
RNCEP_API rncep_status rncep_network_read(const char* path, rncep_cost_rule rule,
                                          rncep_network** out);
RNCEP_API void rncep_network_free(rncep_network* net);
RNCEP_API size_t rncep_network_node_count(const rncep_network* net);
RNCEP_API size_t rncep_network_arc_count(const rncep_network* net);

/* scenario sets: `path` is a directory of demand files or a scenario CSV;
 * `net` may be NULL */
RNCEP_API rncep_status rncep_scenarios_read(const char* path, const rncep_network* net,
                                            rncep_scenarios** out);
RNCEP_API void rncep_scenarios_free(rncep_scenarios* set);
RNCEP_API size_t rncep_scenarios_count(const rncep_scenarios* set);
RNCEP_API size_t rncep_scenarios_commodity_count(const rncep_scenarios* set);
RNCEP_API rncep_status rncep_scenarios_write_csv(const rncep_scenarios* set, const char* path);

/* metrics */
RNCEP_API rncep_status rncep_cvar(const double* values, size_t n, double alpha, double* out);
/* out[0..3] = mean, max, cvar(0.1), population std */
RNCEP_API rncep_status rncep_metrics(const double* values, size_t n, double out[4]);
RNCEP_API rncep_status rncep_correlation(const double* a, const double* b, size_t n,
                                         double* out);

/* experiment configs */
RNCEP_API rncep_status rncep_config_load(const char* path, rncep_config** out);
RNCEP_API void rncep_config_free(rncep_config* cfg);
RNCEP_API rncep_status rncep_config_set_output(rncep_config* cfg, const char* dir);
RNCEP_API rncep_status rncep_config_set_seed(rncep_config* cfg, uint64_t seed);
RNCEP_API rncep_status rncep_config_set_threads(rncep_config* cfg, size_t threads);
RNCEP_API size_t rncep_config_point_count(const rncep_config* cfg);
/* Runs every stage; `solved` (may be NULL) receives the number of models. */
RNCEP_API rncep_status rncep_run_experiment(const rncep_config* cfg, size_t* solved);

/* stages over a work directory */
RNCEP_API rncep_status rncep_stage_parse(const char* network, const char* scenarios,
                                         rncep_cost_rule rule, const char* workdir);

typedef struct rncep_sets_request {
  size_t stride;
  size_t eval_commodities; /* 0 keeps all */
  const size_t* commodities;
  size_t n_commodities;
  const double* lambdas;
  size_t n_lambdas;
  const size_t* hyperplanes;
  size_t n_hyperplanes;
  uint64_t seed;
} rncep_sets_request;

RNCEP_API rncep_status rncep_stage_build_sets(const char* workdir,
                                              const rncep_sets_request* request);

typedef struct rncep_solve_request {
  const char* experiment; /* NULL or "" uses the model name */
  const char* model;      /* nominal | discrete | stochastic | aarc */
  double sigma;
  int has_lambda;
  double lambda;
  size_t hyperplanes; /* 0: default */
  size_t commodities;
} rncep_solve_request;

/* Writes the solution JSON; its path is copied to path_out (NUL-terminated,
 * truncation is an error) when path_out is not NULL. */
RNCEP_API rncep_status rncep_stage_solve(const char* workdir, const rncep_solve_request* request,
                                         char* path_out, size_t path_capacity,
                                         double* objective);
RNCEP_API rncep_status rncep_stage_write_lp(const char* workdir,
                                            const rncep_solve_request* request,
                                            const char* lp_path);
RNCEP_API rncep_status rncep_stage_evaluate(const char* workdir, const char* solution,
                                            size_t threads, char* path_out,
                                            size_t path_capacity);
/* out_metrics may be NULL; otherwise receives mean, max, cvar, std */
RNCEP_API rncep_status rncep_stage_evaluate_investment(const char* workdir,
                                                       const char* investment_csv,
                                                       const char* report_json, size_t threads,
                                                       double out_metrics[4]);
/* out_csv may be NULL; the CSV text is then only validated */
RNCEP_API rncep_status rncep_stage_frontier(const char* const* reports, size_t n,
                                            const char* out_csv);

#ifdef __cplusplus
}
#endif

#endif /* RNCEP_RNCEP_H_ */
