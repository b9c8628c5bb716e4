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

// qncsim: command line front end over the qnc C interface.

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <iostream>
#include <map>
#include <memory>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "qnc/qnc.h"

namespace {

struct Failure {
  qnc_status status;
};

void check(qnc_status s) {
  if (s != QNC_OK) throw Failure{s};
}

// Owns a string handed out by the library.
struct Text {
  char* ptr = nullptr;
  ~Text() { qnc_string_free(ptr); }
  std::string str() const { return ptr ? ptr : ""; }
};

template <typename T, void (*Free)(T*)>
struct Handle {
  T* ptr = nullptr;
  ~Handle() { Free(ptr); }
};
using Graph = Handle<qnc_graph, qnc_graph_free>;
using Messages = Handle<qnc_messages, qnc_messages_free>;
using Run = Handle<qnc_run, qnc_run_free>;
using Config = Handle<qnc_config, qnc_config_free>;

void emit(const std::string& text, const std::string& path) {
  if (path.empty() || path == "-")
    std::cout << text;
  else
    check(qnc_write_file(path.c_str(), text.c_str()));
}

void log_to_stderr(const char* msg, void*) { std::cerr << msg << '\n'; }

int cmd_run(const std::string& config_path, std::optional<std::uint64_t> seed,
            const std::string& out, const std::string& frontier_out, bool quiet) {
  Config cfg;
  check(qnc_config_read(config_path.c_str(), &cfg.ptr));
  if (seed) qnc_config_set_seed(cfg.ptr, *seed);
  if (!out.empty()) check(qnc_config_set_output(cfg.ptr, out.c_str()));
  Text csv;
  std::size_t attempts = 0, failures = 0;
  check(qnc_experiment_run(cfg.ptr, quiet ? nullptr : log_to_stderr, nullptr, &csv.ptr,
                           &attempts, &failures));
  emit(csv.str(), qnc_config_output(cfg.ptr));
  if (!frontier_out.empty()) {
    Text frontier;
    check(qnc_frontier(csv.ptr, &frontier.ptr));
    emit(frontier.str(), frontier_out);
  }
  std::cerr << "decodes: " << attempts << ", excluded failures: " << failures << '\n';
  return 0;
}

int cmd_frontier(const std::string& input, const std::string& out) {
  Text csv, frontier;
  check(qnc_read_file(input.c_str(), &csv.ptr));
  check(qnc_frontier(csv.ptr, &frontier.ptr));
  emit(frontier.str(), out);
  return 0;
}

int cmd_verify(const std::string& path, int t) {
  Run run;
  check(qnc_run_read(path.c_str(), &run.ptr));
  const int last = qnc_run_t_max(run.ptr);
  int failed = 0;
  for (int tp = t > 0 ? t : 2; tp <= (t > 0 ? t : last); ++tp) {
    qnc_verify_report report;
    Text text;
    check(qnc_run_verify(run.ptr, tp, &report, &text.ptr));
    std::cout << text.str() << '\n';
    if (!report.passed) ++failed;
  }
  std::cout << (failed ? "FAIL" : "PASS") << '\n';
  return failed ? 1 : 0;
}

int cmd_simulate(std::size_t nodes, std::size_t edges, int capacity, std::size_t k,
                 double q_max, int block_length, int t_max, std::uint64_t seed,
                 qnc_beta_rule rule, const std::string& out) {
  Graph g;
  Messages m;
  Run run;
  check(qnc_graph_generate(nodes, edges, capacity, seed, &g.ptr));
  check(qnc_messages_generate(nodes, k, q_max, seed + 1, &m.ptr));
  check(qnc_run_simulate(g.ptr, m.ptr, block_length, t_max, seed + 2, rule, &run.ptr));
  Text text;
  check(qnc_run_to_text(run.ptr, &text.ptr));
  emit(text.str(), out);
  return 0;
}

int cmd_decode(const std::string& path, int t, const std::string& out) {
  Run run;
  check(qnc_run_read(path.c_str(), &run.ptr));
  qnc_decode_report report;
  Text text;
  check(qnc_run_decode(run.ptr, t > 0 ? t : qnc_run_t_max(run.ptr), nullptr, &report, nullptr, 0,
                       &text.ptr));
  emit(text.str(), out);
  return report.bound > 0 && !report.bound_holds ? 1 : 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Quantized network coding data-gathering simulator"};
  app.require_subcommand(1);

  auto* run = app.add_subcommand("run", "run an experiment sweep and write the aggregate CSV");
  std::string config_path, run_out, frontier_out;
  std::optional<std::uint64_t> seed;
  bool quiet = false;
  run->add_option("config", config_path, "key = value config file")->required()->check(CLI::ExistingFile);
  run->add_option("--seed", seed, "override the base seed");
  run->add_option("--out", run_out, "CSV path (overrides the config's output key)");
  run->add_option("--frontier", frontier_out, "also write the block-length frontier here");
  run->add_flag("--quiet", quiet, "suppress progress output");

  auto* frontier = app.add_subcommand("frontier", "reduce an aggregate CSV to its SNR/delay frontier");
  std::string frontier_in, frontier_path = "-";
  frontier->add_option("input", frontier_in, "aggregate CSV")->required()->check(CLI::ExistingFile);
  frontier->add_option("--out", frontier_path, "output path, - for stdout");

  auto* verify = app.add_subcommand("verify", "check the invariant suite on a transcript");
  std::string verify_in;
  int verify_t = 0;
  verify->add_option("transcript", verify_in)->required()->check(CLI::ExistingFile);
  verify->add_option("--t", verify_t, "single timestep to check (default: every t)");

  auto* simulate = app.add_subcommand("simulate", "simulate one QNC run and dump its transcript");
  std::size_t nodes = 20, edges = 60, k = 2;
  int capacity = 1, block_length = 4, t_max = 8;
  double q_max = 1.0;
  std::uint64_t sim_seed = 1;
  std::string sim_out = "-";
  const std::map<std::string, qnc_beta_rule> rules{{"averaging", QNC_BETA_AVERAGING},
                                                   {"unit_gain", QNC_BETA_UNIT_GAIN},
                                                   {"signed_unit_gain", QNC_BETA_SIGNED_UNIT_GAIN}};
  qnc_beta_rule rule = QNC_BETA_SIGNED_UNIT_GAIN;
  simulate->add_option("--nodes", nodes)->capture_default_str();
  simulate->add_option("--edges", edges)->capture_default_str();
  simulate->add_option("--capacity", capacity)->capture_default_str();
  simulate->add_option("--k", k, "sparsity of s")->capture_default_str();
  simulate->add_option("--q-max", q_max)->capture_default_str();
  simulate->add_option("--L", block_length, "block length")->capture_default_str();
  simulate->add_option("--t-max", t_max)->capture_default_str();
  simulate->add_option("--seed", sim_seed, "graph seed; messages use seed+1, coefficients seed+2")
      ->capture_default_str();
  simulate->add_option("--beta-rule", rule)
      ->transform(CLI::CheckedTransformer(rules))
      ->default_str("signed_unit_gain");
  simulate->add_option("--out", sim_out, "output path, - for stdout")->capture_default_str();

  auto* decode = app.add_subcommand("decode", "l1-min decode a transcript and report the error");
  std::string decode_in, decode_out = "-";
  int decode_t = 0;
  decode->add_option("transcript", decode_in)->required()->check(CLI::ExistingFile);
  decode->add_option("--t", decode_t, "decoding timestep (default: last)");
  decode->add_option("--out", decode_out, "report path, - for stdout");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run) return cmd_run(config_path, seed, run_out, frontier_out, quiet);
    if (*frontier) return cmd_frontier(frontier_in, frontier_path);
    if (*verify) return cmd_verify(verify_in, verify_t);
    if (*simulate)
      return cmd_simulate(nodes, edges, capacity, k, q_max, block_length, t_max, sim_seed, rule,
                          sim_out);
    if (*decode) return cmd_decode(decode_in, decode_t, decode_out);
  } catch (const Failure& f) {
    std::cerr << "qncsim: " << qnc_status_name(f.status) << ": " << qnc_last_error() << '\n';
    return 2;
  }
  return 0;
}
