// Copyright 2026 The QNC Gather Authors.
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

/* C interface to the QNC data-gathering simulator.
 *
 * Objects are opaque handles released with their *_free function. Every
 * fallible call returns a qnc_status; on failure qnc_last_error() holds a
 * message for the calling thread until its next failing call. Strings
 * returned through char** outputs are owned by the caller and released with
 * qnc_string_free. Node and edge indices are 0-based here; text files use
 * 1-based ids. */

#ifndef QNC_QNC_H_
#define QNC_QNC_H_

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define QNC_API __declspec(dllexport)
#else
#define QNC_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum qnc_status {
  QNC_OK = 0,
  QNC_ERR_INVALID_ARGUMENT = 1,
  QNC_ERR_UNREACHABLE = 2,
  QNC_ERR_OVERFLOW = 3,
  QNC_ERR_NOT_CONVERGED = 4,
  QNC_ERR_INFEASIBLE = 5,
  QNC_ERR_BUDGET_EXCEEDED = 6,
  QNC_ERR_IO = 7,
  QNC_ERR_PARSE = 8,
  QNC_ERR_INTERNAL = 9
} qnc_status;

QNC_API const char* qnc_status_name(qnc_status status);
QNC_API const char* qnc_last_error(void);
QNC_API const char* qnc_version(void);
QNC_API void qnc_string_free(char* s);

/* Networks. */
typedef struct qnc_graph qnc_graph;

QNC_API qnc_status qnc_graph_generate(size_t nodes, size_t edges, int capacity, uint64_t seed,
                                      qnc_graph** out);
QNC_API qnc_status qnc_graph_from_text(const char* text, qnc_graph** out);
QNC_API qnc_status qnc_graph_read(const char* path, qnc_graph** out);
QNC_API qnc_status qnc_graph_to_text(const qnc_graph* g, char** text);
QNC_API size_t qnc_graph_node_count(const qnc_graph* g);
QNC_API size_t qnc_graph_edge_count(const qnc_graph* g);
QNC_API size_t qnc_graph_gateway(const qnc_graph* g);
/* Hop distance of every node to the gateway; -1 marks unreachable nodes. */
QNC_API qnc_status qnc_graph_hop_distances(const qnc_graph* g, long long* dist, size_t len);
QNC_API void qnc_graph_free(qnc_graph* g);

/* Sparse message ensembles x = phi s. */
typedef struct qnc_messages qnc_messages;

QNC_API qnc_status qnc_messages_generate(size_t n, size_t k, double q_max, uint64_t seed,
                                         qnc_messages** out);
QNC_API qnc_status qnc_messages_from_text(const char* text, qnc_messages** out);
QNC_API qnc_status qnc_messages_to_text(const qnc_messages* m, char** text);
QNC_API size_t qnc_messages_size(const qnc_messages* m);
QNC_API qnc_status qnc_messages_x(const qnc_messages* m, double* x, size_t len);
QNC_API void qnc_messages_free(qnc_messages* m);

/* QNC runs. */
typedef enum qnc_beta_rule {
  QNC_BETA_AVERAGING = 0,
  QNC_BETA_UNIT_GAIN = 1,
  QNC_BETA_SIGNED_UNIT_GAIN = 2
} qnc_beta_rule;

typedef struct qnc_run qnc_run;

QNC_API qnc_status qnc_run_simulate(const qnc_graph* g, const qnc_messages* m, int block_length,
                                    int t_max, uint64_t coefficient_seed, qnc_beta_rule rule,
                                    qnc_run** out);
QNC_API qnc_status qnc_run_from_text(const char* text, qnc_run** out);
QNC_API qnc_status qnc_run_read(const char* path, qnc_run** out);
QNC_API qnc_status qnc_run_to_text(const qnc_run* run, char** text);
QNC_API int qnc_run_t_max(const qnc_run* run);
QNC_API void qnc_run_free(qnc_run* run);

typedef struct qnc_verify_report {
  int t;
  double max_identity_error;
  double max_replay_error;
  double noise_norm_sq;
  double eps_sq;
  double eps_sq_as_printed;
  size_t overflow_violations;
  size_t magnitude_violations;
  size_t quantizer_violations;
  size_t structural_violations;
  size_t rest_violations;
  double stored_mismatch;
  int passed;
} qnc_verify_report;

/* text may be NULL. */
QNC_API qnc_status qnc_run_verify(const qnc_run* run, int t, qnc_verify_report* report,
                                  char** text);

typedef struct qnc_decode_options {
  double constraint_slack;
  double gap_tolerance;
  int max_iterations;
} qnc_decode_options;

QNC_API qnc_decode_options qnc_decode_options_default(void);

typedef struct qnc_decode_report {
  int t;
  size_t n;
  size_t m;
  double eps_sq;
  double l1_norm;
  double dual_bound;
  double residual_sq;
  int iterations;
  int polished;
  double error_sq;
  double signal_sq;
  double delta_2k; /* NaN when not computed */
  double bound;    /* NaN when delta_2k >= sqrt(2) - 1 or not computed */
  int bound_holds;
} qnc_decode_report;

/* options, x_hat (length n) and text may be NULL. */
QNC_API qnc_status qnc_run_decode(const qnc_run* run, int t, const qnc_decode_options* options,
                                  qnc_decode_report* report, double* x_hat, size_t len,
                                  char** text);

/* Shortest-path packet forwarding baseline. */
typedef struct qnc_forward_report {
  int last_arrival;
  long long total_delay;
  double error_norm;
} qnc_forward_report;

QNC_API qnc_status qnc_forward(const qnc_graph* g, const qnc_messages* m, int block_length,
                               qnc_forward_report* report, double* x_hat, size_t len);

/* Experiments. */
typedef struct qnc_config qnc_config;
typedef void (*qnc_log_fn)(const char* message, void* user);

QNC_API qnc_status qnc_config_from_text(const char* text, qnc_config** out);
QNC_API qnc_status qnc_config_read(const char* path, qnc_config** out);
QNC_API qnc_status qnc_config_to_text(const qnc_config* cfg, char** text);
QNC_API void qnc_config_set_seed(qnc_config* cfg, uint64_t seed);
QNC_API qnc_status qnc_config_set_output(qnc_config* cfg, const char* path);
QNC_API const char* qnc_config_output(const qnc_config* cfg);
QNC_API void qnc_config_free(qnc_config* cfg);

/* Runs the sweep and returns the aggregate CSV. log, attempts and failures
 * may be NULL. */
QNC_API qnc_status qnc_experiment_run(const qnc_config* cfg, qnc_log_fn log, void* user,
                                      char** csv, size_t* attempts, size_t* failures);
/* Block-length optimisation: aggregate CSV in, Pareto frontier CSV out. */
QNC_API qnc_status qnc_frontier(const char* csv, char** frontier_csv);

QNC_API qnc_status qnc_read_file(const char* path, char** text);
QNC_API qnc_status qnc_write_file(const char* path, const char* text);

#ifdef __cplusplus
}
#endif

#endif  /* QNC_QNC_H_ */
