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

#include "qnc/run.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "qnc/certify.hpp"
#include "qnc/error.hpp"
#include "qnc/textio.hpp"

namespace qnc {
namespace {

void append_row(std::string& out, std::string_view tag, std::initializer_list<long long> ids,
                const auto& values) {
  out += tag;
  for (long long id : ids) {
    out += ' ';
    out += std::to_string(id);
  }
  for (double v : values) {
    out += ' ';
    textio::append_double(out, v);
  }
  out += '\n';
}

Eigen::VectorXd read_vector(textio::Tokenizer& tok, Eigen::Index n) {
  Eigen::VectorXd v(n);
  for (Eigen::Index i = 0; i < n; ++i) v(i) = tok.next_double();
  return v;
}

void expect_index(textio::Tokenizer& tok, long long want, const char* what) {
  auto got = tok.next_int<long long>();
  if (got != want)
    fail(ErrorCode::kParse, std::string("expected ") + what + " " + std::to_string(want) +
                                ", got " + std::to_string(got));
}

}  // namespace

QncRun simulate_run(NetworkGraph graph, MessageEnsemble messages, int block_length, int t_max,
                    std::uint64_t coefficient_seed, const CoefficientOptions& options) {
  require(messages.size() == graph.node_count(), "one message per node is required");
  CoefficientSchedule sched = generate_coefficients(graph, t_max, coefficient_seed, options);
  auto quantizers = edge_quantizers(graph, block_length, messages.q_max);
  RunTranscript transcript = simulate_qnc(graph, sched, messages.x, quantizers, t_max);
  return QncRun{std::move(graph), std::move(messages),    std::move(sched), block_length,
                std::move(quantizers), std::move(transcript), {}, {}};
}

std::string QncRun::to_text() const {
  const int horizon = t_max();
  std::string out = "qnc-transcript 1\n";
  out += "block_length " + std::to_string(block_length) + '\n';
  out += "t_max " + std::to_string(horizon) + '\n';
  out += "graph\n" + graph.to_edge_list();
  out += "messages\n" + messages.to_text();
  std::vector<double> row(graph.edge_count());
  for (int t = 2; t <= horizon; ++t) {
    for (EdgeIndex e = 0; e < graph.edge_count(); ++e) row[e] = schedule.alpha(e, t);
    append_row(out, "alpha", {t}, row);
  }
  for (int t = 2; t <= horizon; ++t)
    for (EdgeIndex e = 0; e < graph.edge_count(); ++e)
      append_row(out, "beta", {t, static_cast<long long>(e + 1)}, schedule.beta(e, t));
  for (int t = 1; t <= transcript.t_end(); ++t) append_row(out, "y", {t}, transcript.y(t));
  for (int t = 1; t <= transcript.t_end(); ++t) append_row(out, "noise", {t}, transcript.noise(t));
  const SparseMatrix b = gateway_selector(graph);
  for (int t = 2; t <= transcript.t_end(); ++t)
    append_row(out, "z", {t}, Eigen::VectorXd(b * transcript.y(t)));
  const auto psi = psi_sequence(schedule, graph, transcript.t_end());
  for (int t = 2; t <= transcript.t_end(); ++t) {
    const Eigen::MatrixXd& p = psi[static_cast<std::size_t>(t - 2)];
    for (Eigen::Index i = 0; i < p.rows(); ++i)
      append_row(out, "psi", {t, static_cast<long long>(i + 1)},
                 Eigen::VectorXd(p.row(i).transpose()));
  }
  out += "end\n";
  return out;
}

QncRun QncRun::from_text(std::string_view text) {
  textio::Tokenizer tok(text);
  tok.expect("qnc-transcript");
  tok.expect("1");
  tok.expect("block_length");
  const int block_length = tok.next_int<int>();
  tok.expect("t_max");
  const int horizon = tok.next_int<int>();
  if (horizon < 2) fail(ErrorCode::kParse, "t_max must be at least 2");
  tok.expect("graph");
  NetworkGraph graph = NetworkGraph::read_edge_list(tok);
  tok.expect("messages");
  MessageEnsemble messages = MessageEnsemble::read_text(tok);
  if (messages.size() != graph.node_count())
    fail(ErrorCode::kParse, "message count does not match node count");

  const auto m = static_cast<Eigen::Index>(graph.edge_count());
  CoefficientSchedule sched(graph, horizon);
  for (int t = 2; t <= horizon; ++t) {
    tok.expect("alpha");
    expect_index(tok, t, "time");
    for (EdgeIndex e = 0; e < graph.edge_count(); ++e) sched.set_alpha(e, t, tok.next_double());
  }
  for (int t = 2; t <= horizon; ++t) {
    for (EdgeIndex e = 0; e < graph.edge_count(); ++e) {
      tok.expect("beta");
      expect_index(tok, t, "time");
      expect_index(tok, static_cast<long long>(e + 1), "edge");
      for (double& w : sched.beta(e, t)) w = tok.next_double();
    }
  }
  std::vector<EdgeState> states(static_cast<std::size_t>(horizon));
  for (int t = 1; t <= horizon; ++t) {
    tok.expect("y");
    expect_index(tok, t, "time");
    states[static_cast<std::size_t>(t - 1)].y = read_vector(tok, m);
    states[static_cast<std::size_t>(t - 1)].t = t;
  }
  for (int t = 1; t <= horizon; ++t) {
    tok.expect("noise");
    expect_index(tok, t, "time");
    states[static_cast<std::size_t>(t - 1)].quant_err = read_vector(tok, m);
  }
  const auto rows = static_cast<Eigen::Index>(graph.in_edges(graph.gateway()).size());
  const auto n = static_cast<Eigen::Index>(graph.node_count());
  std::vector<Eigen::VectorXd> z;
  for (int t = 2; t <= horizon; ++t) {
    tok.expect("z");
    expect_index(tok, t, "time");
    z.push_back(read_vector(tok, rows));
  }
  std::vector<Eigen::MatrixXd> psi;
  for (int t = 2; t <= horizon; ++t) {
    Eigen::MatrixXd p(rows, n);
    for (Eigen::Index i = 0; i < rows; ++i) {
      tok.expect("psi");
      expect_index(tok, t, "time");
      expect_index(tok, i + 1, "row");
      p.row(i) = read_vector(tok, n).transpose();
    }
    psi.push_back(std::move(p));
  }
  tok.expect("end");
  if (!tok.done()) fail(ErrorCode::kParse, "trailing data after transcript");

  auto quantizers = edge_quantizers(graph, block_length, messages.q_max);
  return QncRun{std::move(graph),      std::move(messages), std::move(sched),
                block_length,          std::move(quantizers),
                RunTranscript(std::move(states)), std::move(z), std::move(psi)};
}

VerifyReport verify_run(const QncRun& run, int t) {
  const NetworkGraph& g = run.graph;
  require(t >= 2 && t <= run.transcript.t_end(), "verification time outside the transcript");
  VerifyReport rep;
  rep.t = t;

  const MeasurementRecord rec =
      assemble_measurements(run.transcript, g, run.schedule, run.quantizers, t);
  rep.max_identity_error =
      (rec.z_tot - rec.psi_tot * run.messages.x - rec.n_eff_tot).cwiseAbs().maxCoeff();
  rep.noise_norm_sq = rec.n_eff_tot.squaredNorm();
  rep.eps_sq = rec.eps_sq;
  rep.eps_sq_as_printed =
      compute_epsilon_sq_as_printed(run.schedule, g, run.quantizers, t);

  for (int tp = 2; tp <= t; ++tp) {
    const TransferMatrices tm = build_transfer_matrices(run.schedule, g, tp);
    const Eigen::VectorXd replay =
        tm.F * run.transcript.y(tp - 1) + tm.A * run.messages.x + run.transcript.noise(tp);
    rep.max_replay_error =
        std::max(rep.max_replay_error, (replay - run.transcript.y(tp)).cwiseAbs().maxCoeff());
  }

  rep.overflow_violations = count_overflow_violations(g, run.schedule);
  const double q_max = run.messages.q_max;
  for (int tp = 1; tp <= t; ++tp) {
    const Eigen::VectorXd& y = run.transcript.y(tp);
    const Eigen::VectorXd& err = run.transcript.noise(tp);
    for (Eigen::Index e = 0; e < y.size(); ++e) {
      if (std::abs(y(e)) > q_max) ++rep.magnitude_violations;
      if (std::abs(err(e)) > 0.5 * run.quantizers[static_cast<std::size_t>(e)].step() * (1 + 1e-12))
        ++rep.quantizer_violations;
      if (tp == 1 && (y(e) != 0.0 || err(e) != 0.0)) ++rep.rest_violations;
    }
  }
  for (int tp = 2; tp <= t; ++tp) {
    const SparseMatrix f = relay_matrix(run.schedule, g, tp);
    for (Eigen::Index r = 0; r < f.outerSize(); ++r)
      for (SparseMatrix::InnerIterator it(f, r); it; ++it)
        if (g.tail(static_cast<EdgeIndex>(it.row())) != g.head(static_cast<EdgeIndex>(it.col())))
          ++rep.structural_violations;
    const SparseMatrix a = injection_matrix(run.schedule, g, tp);
    for (Eigen::Index r = 0; r < a.outerSize(); ++r)
      for (SparseMatrix::InnerIterator it(a, r); it; ++it)
        if (g.tail(static_cast<EdgeIndex>(it.row())) != static_cast<NodeIndex>(it.col()))
          ++rep.structural_violations;
  }

  if (!run.stored_z.empty()) {
    const SparseMatrix b = gateway_selector(g);
    const auto psi = psi_sequence(run.schedule, g, t);
    for (int tp = 2; tp <= t; ++tp) {
      const auto i = static_cast<std::size_t>(tp - 2);
      const Eigen::VectorXd z = b * run.transcript.y(tp);
      rep.stored_mismatch =
          std::max({rep.stored_mismatch, (z - run.stored_z[i]).cwiseAbs().maxCoeff(),
                    (psi[i] - run.stored_psi[i]).cwiseAbs().maxCoeff()});
    }
  }

  rep.passed = rep.max_identity_error < kIdentityTolerance &&
               rep.max_replay_error < kIdentityTolerance && rep.noise_norm_sq <= rep.eps_sq &&
               rep.overflow_violations == 0 && rep.magnitude_violations == 0 &&
               rep.quantizer_violations == 0 && rep.structural_violations == 0 &&
               rep.rest_violations == 0 && rep.stored_mismatch <= 1e-12;
  return rep;
}

std::string VerifyReport::to_text() const {
  std::string out;
  auto line = [&](const char* key, const std::string& v) { out += std::string(key) + ": " + v + '\n'; };
  line("t", std::to_string(t));
  line("identity_max_error", textio::format_double(max_identity_error));
  line("replay_max_error", textio::format_double(max_replay_error));
  line("noise_norm_sq", textio::format_double(noise_norm_sq));
  line("eps_sq", textio::format_double(eps_sq));
  line("eps_sq_as_printed", textio::format_double(eps_sq_as_printed));
  line("noise_within_bound", noise_norm_sq <= eps_sq ? "yes" : "no");
  line("coefficient_budget_violations", std::to_string(overflow_violations));
  line("magnitude_violations", std::to_string(magnitude_violations));
  line("quantizer_violations", std::to_string(quantizer_violations));
  line("structural_violations", std::to_string(structural_violations));
  line("rest_violations", std::to_string(rest_violations));
  line("stored_mismatch", textio::format_double(stored_mismatch));
  line("result", passed ? "PASS" : "FAIL");
  return out;
}

DecodeReport decode_run(const QncRun& run, int t, const DecodeOptions& options) {
  require(t >= 2 && t <= run.transcript.t_end(), "decode time outside the transcript");
  const MeasurementRecord rec =
      assemble_measurements(run.transcript, run.graph, run.schedule, run.quantizers, t);
  DecodeProblem problem{rec.z_tot, rec.psi_tot * run.messages.phi, run.messages.phi,
                        std::sqrt(rec.eps_sq)};
  DecodeReport rep;
  rep.t = t;
  rep.n = run.graph.node_count();
  rep.m = static_cast<std::size_t>(rec.m());
  rep.eps_sq = rec.eps_sq;
  rep.result = l1_min_decode(problem, options);
  rep.error_sq = (run.messages.x - rep.result.x_hat).squaredNorm();
  rep.signal_sq = run.messages.x.squaredNorm();
  const std::size_t order = 2 * run.messages.k;
  if (rep.n <= kRipMaxColumns && order <= kRipMaxOrder && order <= rep.n) {
    rep.delta_2k = rip_constant(problem.theta, order).delta;
    if (*rep.delta_2k < std::sqrt(2.0) - 1.0) rep.bound = error_bound(*rep.delta_2k, problem.eps);
  }
  return rep;
}

std::string DecodeReport::to_text() const {
  std::string out;
  auto line = [&](const char* key, const std::string& v) { out += std::string(key) + ": " + v + '\n'; };
  line("t", std::to_string(t));
  line("n", std::to_string(n));
  line("m", std::to_string(m));
  line("eps_sq", textio::format_double(eps_sq));
  line("l1_norm", textio::format_double(result.l1_norm));
  line("dual_bound", textio::format_double(result.dual_bound));
  line("residual_sq", textio::format_double(result.residual_sq));
  line("iterations", std::to_string(result.iterations));
  line("polished", result.polished ? "yes" : "no");
  line("error_sq", textio::format_double(error_sq));
  line("signal_sq", textio::format_double(signal_sq));
  line("delta_2k", delta_2k ? textio::format_double(*delta_2k) : "not computed");
  if (bound) {
    line("bound", textio::format_double(*bound));
    line("bound_check", bound_holds() ? "holds" : "VIOLATED");
  } else {
    line("bound_check", delta_2k ? "not applicable (delta_2k >= sqrt(2)-1)"
                                 : "skipped (too large to enumerate)");
  }
  std::string xs;
  for (Eigen::Index i = 0; i < result.x_hat.size(); ++i) {
    if (i) xs += ' ';
    textio::append_double(xs, result.x_hat(i));
  }
  line("x_hat", xs);
  return out;
}

}  // namespace qnc
