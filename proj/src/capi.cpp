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

#include "qnc/qnc.h"

#include <cmath>
#include <cstdlib>
#include <cstring>
#include <exception>
#include <limits>
#include <new>
#include <string>

#include "qnc/error.hpp"
#include "qnc/forward.hpp"
#include "qnc/graph.hpp"
#include "qnc/harness.hpp"
#include "qnc/run.hpp"
#include "qnc/signal.hpp"
#include "qnc/textio.hpp"

struct qnc_graph {
  qnc::NetworkGraph value;
};
struct qnc_messages {
  qnc::MessageEnsemble value;
};
struct qnc_run {
  qnc::QncRun value;
};
struct qnc_config {
  qnc::ExperimentConfig value;
};

namespace {

thread_local std::string last_error;

qnc_status to_status(qnc::ErrorCode code) {
  switch (code) {
    case qnc::ErrorCode::kInvalidArgument: return QNC_ERR_INVALID_ARGUMENT;
    case qnc::ErrorCode::kUnreachable: return QNC_ERR_UNREACHABLE;
    case qnc::ErrorCode::kOverflow: return QNC_ERR_OVERFLOW;
    case qnc::ErrorCode::kNotConverged: return QNC_ERR_NOT_CONVERGED;
    case qnc::ErrorCode::kInfeasible: return QNC_ERR_INFEASIBLE;
    case qnc::ErrorCode::kBudgetExceeded: return QNC_ERR_BUDGET_EXCEEDED;
    case qnc::ErrorCode::kIo: return QNC_ERR_IO;
    case qnc::ErrorCode::kParse: return QNC_ERR_PARSE;
  }
  return QNC_ERR_INTERNAL;
}

template <typename F>
qnc_status guarded(F&& body) {
  try {
    body();
    return QNC_OK;
  } catch (const qnc::Error& e) {
    last_error = e.what();
    return to_status(e.code());
  } catch (const std::bad_alloc&) {
    last_error = "out of memory";
    return QNC_ERR_INTERNAL;
  } catch (const std::exception& e) {
    last_error = e.what();
    return QNC_ERR_INTERNAL;
  }
}

void check(bool cond, const char* what) {
  if (!cond) qnc::fail(qnc::ErrorCode::kInvalidArgument, what);
}

char* dup_string(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (!out) throw std::bad_alloc();
  std::memcpy(out, s.data(), s.size() + 1);
  return out;
}

void copy_vector(const Eigen::VectorXd& v, double* out, std::size_t len) {
  check(out != nullptr, "output buffer is null");
  check(len == static_cast<std::size_t>(v.size()), "output buffer length mismatch");
  for (Eigen::Index i = 0; i < v.size(); ++i) out[i] = v(i);
}

qnc::BetaRule beta_rule(qnc_beta_rule rule) {
  switch (rule) {
    case QNC_BETA_AVERAGING: return qnc::BetaRule::kAveraging;
    case QNC_BETA_UNIT_GAIN: return qnc::BetaRule::kUnitGain;
    case QNC_BETA_SIGNED_UNIT_GAIN: return qnc::BetaRule::kSignedUnitGain;
  }
  qnc::fail(qnc::ErrorCode::kInvalidArgument, "unknown beta rule");
}

}  // namespace

extern "C" {

const char* qnc_status_name(qnc_status status) {
  switch (status) {
    case QNC_OK: return "ok";
    case QNC_ERR_INVALID_ARGUMENT: return "invalid argument";
    case QNC_ERR_UNREACHABLE: return "unreachable";
    case QNC_ERR_OVERFLOW: return "overflow";
    case QNC_ERR_NOT_CONVERGED: return "not converged";
    case QNC_ERR_INFEASIBLE: return "infeasible";
    case QNC_ERR_BUDGET_EXCEEDED: return "budget exceeded";
    case QNC_ERR_IO: return "i/o error";
    case QNC_ERR_PARSE: return "parse error";
    case QNC_ERR_INTERNAL: return "internal error";
  }
  return "unknown status";
}

const char* qnc_last_error(void) { return last_error.c_str(); }

const char* qnc_version(void) { return "1.0.0"; }

void qnc_string_free(char* s) { std::free(s); }

qnc_status qnc_graph_generate(size_t nodes, size_t edges, int capacity, uint64_t seed,
                              qnc_graph** out) {
  return guarded([&] {
    check(out != nullptr, "out is null");
    *out = new qnc_graph{qnc::generate_random_network(nodes, edges, capacity, seed)};
  });
}

qnc_status qnc_graph_from_text(const char* text, qnc_graph** out) {
  return guarded([&] {
    check(text != nullptr && out != nullptr, "null argument");
    *out = new qnc_graph{qnc::NetworkGraph::from_edge_list(text)};
  });
}

qnc_status qnc_graph_read(const char* path, qnc_graph** out) {
  return guarded([&] {
    check(path != nullptr && out != nullptr, "null argument");
    *out = new qnc_graph{qnc::NetworkGraph::from_edge_list(qnc::textio::read_file(path))};
  });
}

qnc_status qnc_graph_to_text(const qnc_graph* g, char** text) {
  return guarded([&] {
    check(g != nullptr && text != nullptr, "null argument");
    *text = dup_string(g->value.to_edge_list());
  });
}

size_t qnc_graph_node_count(const qnc_graph* g) { return g ? g->value.node_count() : 0; }
size_t qnc_graph_edge_count(const qnc_graph* g) { return g ? g->value.edge_count() : 0; }
size_t qnc_graph_gateway(const qnc_graph* g) { return g ? g->value.gateway() : 0; }

qnc_status qnc_graph_hop_distances(const qnc_graph* g, long long* dist, size_t len) {
  return guarded([&] {
    check(g != nullptr && dist != nullptr, "null argument");
    check(len == g->value.node_count(), "output buffer length mismatch");
    const auto d = qnc::hop_distances_to_gateway(g->value);
    for (std::size_t v = 0; v < len; ++v) dist[v] = d[v] ? static_cast<long long>(*d[v]) : -1;
  });
}

void qnc_graph_free(qnc_graph* g) { delete g; }

qnc_status qnc_messages_generate(size_t n, size_t k, double q_max, uint64_t seed,
                                 qnc_messages** out) {
  return guarded([&] {
    check(out != nullptr, "out is null");
    *out = new qnc_messages{qnc::generate_sparse_messages(n, k, q_max, seed)};
  });
}

qnc_status qnc_messages_from_text(const char* text, qnc_messages** out) {
  return guarded([&] {
    check(text != nullptr && out != nullptr, "null argument");
    *out = new qnc_messages{qnc::MessageEnsemble::from_text(text)};
  });
}

qnc_status qnc_messages_to_text(const qnc_messages* m, char** text) {
  return guarded([&] {
    check(m != nullptr && text != nullptr, "null argument");
    *text = dup_string(m->value.to_text());
  });
}

size_t qnc_messages_size(const qnc_messages* m) { return m ? m->value.size() : 0; }

qnc_status qnc_messages_x(const qnc_messages* m, double* x, size_t len) {
  return guarded([&] {
    check(m != nullptr, "null argument");
    copy_vector(m->value.x, x, len);
  });
}

void qnc_messages_free(qnc_messages* m) { delete m; }

qnc_status qnc_run_simulate(const qnc_graph* g, const qnc_messages* m, int block_length,
                            int t_max, uint64_t coefficient_seed, qnc_beta_rule rule,
                            qnc_run** out) {
  return guarded([&] {
    check(g != nullptr && m != nullptr && out != nullptr, "null argument");
    qnc::CoefficientOptions options;
    options.beta_rule = beta_rule(rule);
    *out = new qnc_run{qnc::simulate_run(g->value, m->value, block_length, t_max,
                                         coefficient_seed, options)};
  });
}

qnc_status qnc_run_from_text(const char* text, qnc_run** out) {
  return guarded([&] {
    check(text != nullptr && out != nullptr, "null argument");
    *out = new qnc_run{qnc::QncRun::from_text(text)};
  });
}

qnc_status qnc_run_read(const char* path, qnc_run** out) {
  return guarded([&] {
    check(path != nullptr && out != nullptr, "null argument");
    *out = new qnc_run{qnc::QncRun::from_text(qnc::textio::read_file(path))};
  });
}

qnc_status qnc_run_to_text(const qnc_run* run, char** text) {
  return guarded([&] {
    check(run != nullptr && text != nullptr, "null argument");
    *text = dup_string(run->value.to_text());
  });
}

int qnc_run_t_max(const qnc_run* run) { return run ? run->value.t_max() : 0; }

void qnc_run_free(qnc_run* run) { delete run; }

qnc_status qnc_run_verify(const qnc_run* run, int t, qnc_verify_report* report, char** text) {
  return guarded([&] {
    check(run != nullptr && report != nullptr, "null argument");
    const qnc::VerifyReport r = qnc::verify_run(run->value, t);
    *report = qnc_verify_report{r.t,
                                r.max_identity_error,
                                r.max_replay_error,
                                r.noise_norm_sq,
                                r.eps_sq,
                                r.eps_sq_as_printed,
                                r.overflow_violations,
                                r.magnitude_violations,
                                r.quantizer_violations,
                                r.structural_violations,
                                r.rest_violations,
                                r.stored_mismatch,
                                r.passed ? 1 : 0};
    if (text) *text = dup_string(r.to_text());
  });
}

qnc_decode_options qnc_decode_options_default(void) {
  const qnc::DecodeOptions d;
  return qnc_decode_options{d.constraint_slack, d.gap_tolerance, d.max_iterations};
}

qnc_status qnc_run_decode(const qnc_run* run, int t, const qnc_decode_options* options,
                          qnc_decode_report* report, double* x_hat, size_t len, char** text) {
  return guarded([&] {
    check(run != nullptr && report != nullptr, "null argument");
    qnc::DecodeOptions opts;
    if (options) {
      opts.constraint_slack = options->constraint_slack;
      opts.gap_tolerance = options->gap_tolerance;
      opts.max_iterations = options->max_iterations;
    }
    const qnc::DecodeReport r = qnc::decode_run(run->value, t, opts);
    const double nan = std::numeric_limits<double>::quiet_NaN();
    *report = qnc_decode_report{r.t,
                                r.n,
                                r.m,
                                r.eps_sq,
                                r.result.l1_norm,
                                r.result.dual_bound,
                                r.result.residual_sq,
                                r.result.iterations,
                                r.result.polished ? 1 : 0,
                                r.error_sq,
                                r.signal_sq,
                                r.delta_2k.value_or(nan),
                                r.bound.value_or(nan),
                                r.bound_holds() ? 1 : 0};
    if (x_hat) copy_vector(r.result.x_hat, x_hat, len);
    if (text) *text = dup_string(r.to_text());
  });
}

qnc_status qnc_forward(const qnc_graph* g, const qnc_messages* m, int block_length,
                       qnc_forward_report* report, double* x_hat, size_t len) {
  return guarded([&] {
    check(g != nullptr && m != nullptr && report != nullptr, "null argument");
    const auto routes = qnc::shortest_paths_to_gateway(g->value);
    const auto run =
        qnc::simulate_forwarding(g->value, routes, m->value.x, block_length, m->value.q_max);
    const Eigen::VectorXd est = run.estimate();
    *report = qnc_forward_report{run.last_arrival, run.total_delay, (m->value.x - est).norm()};
    if (x_hat) copy_vector(est, x_hat, len);
  });
}

qnc_status qnc_config_from_text(const char* text, qnc_config** out) {
  return guarded([&] {
    check(text != nullptr && out != nullptr, "null argument");
    *out = new qnc_config{qnc::ExperimentConfig::from_text(text)};
  });
}

qnc_status qnc_config_read(const char* path, qnc_config** out) {
  return guarded([&] {
    check(path != nullptr && out != nullptr, "null argument");
    *out = new qnc_config{qnc::ExperimentConfig::from_text(qnc::textio::read_file(path))};
  });
}

qnc_status qnc_config_to_text(const qnc_config* cfg, char** text) {
  return guarded([&] {
    check(cfg != nullptr && text != nullptr, "null argument");
    *text = dup_string(cfg->value.to_text());
  });
}

void qnc_config_set_seed(qnc_config* cfg, uint64_t seed) {
  if (cfg) cfg->value.seed = seed;
}

qnc_status qnc_config_set_output(qnc_config* cfg, const char* path) {
  return guarded([&] {
    check(cfg != nullptr && path != nullptr, "null argument");
    cfg->value.output = path;
  });
}

const char* qnc_config_output(const qnc_config* cfg) {
  return cfg ? cfg->value.output.c_str() : "";
}

void qnc_config_free(qnc_config* cfg) { delete cfg; }

qnc_status qnc_experiment_run(const qnc_config* cfg, qnc_log_fn log, void* user, char** csv,
                              size_t* attempts, size_t* failures) {
  return guarded([&] {
    check(cfg != nullptr && csv != nullptr, "null argument");
    qnc::ExperimentOptions options;
    if (log)
      options.log = [log, user](std::string_view msg) { log(std::string(msg).c_str(), user); };
    const qnc::ExperimentResult result = qnc::run_experiment(cfg->value, options);
    *csv = dup_string(qnc::emit_csv(result.rows));
    if (attempts) *attempts = result.decode_attempts;
    if (failures) *failures = result.decode_failures;
  });
}

qnc_status qnc_frontier(const char* csv, char** frontier_csv) {
  return guarded([&] {
    check(csv != nullptr && frontier_csv != nullptr, "null argument");
    const auto rows = qnc::parse_csv(csv);
    *frontier_csv = dup_string(qnc::emit_csv(qnc::optimize_block_length(rows)));
  });
}

qnc_status qnc_read_file(const char* path, char** text) {
  return guarded([&] {
    check(path != nullptr && text != nullptr, "null argument");
    *text = dup_string(qnc::textio::read_file(path));
  });
}

qnc_status qnc_write_file(const char* path, const char* text) {
  return guarded([&] {
    check(path != nullptr && text != nullptr, "null argument");
    qnc::textio::write_file(path, text);
  });
}

}  // extern "C"
