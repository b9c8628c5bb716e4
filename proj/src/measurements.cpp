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

#include "qnc/measurements.hpp"

#include "qnc/error.hpp"

namespace qnc {
namespace {

std::vector<SparseMatrix> relay_matrices(const CoefficientSchedule& sched,
                                         const NetworkGraph& g, int t_end) {
  std::vector<SparseMatrix> f(static_cast<std::size_t>(t_end) + 1);
  for (int t = 2; t <= t_end; ++t) f[static_cast<std::size_t>(t)] = relay_matrix(sched, g, t);
  return f;
}

Eigen::VectorXd half_steps(std::span<const Quantizer> quantizers) {
  Eigen::VectorXd d(static_cast<Eigen::Index>(quantizers.size()));
  for (std::size_t e = 0; e < quantizers.size(); ++e)
    d(static_cast<Eigen::Index>(e)) = 0.5 * quantizers[e].step();
  return d;
}

// sum_{s=2..s_hi} |B F(top) ... F(s+1)| d, for s_hi <= top.
Eigen::VectorXd noise_gain(const std::vector<SparseMatrix>& f, const Eigen::MatrixXd& b,
                           const Eigen::VectorXd& d, int top, int s_hi) {
  Eigen::MatrixXd r = b;
  Eigen::VectorXd acc = Eigen::VectorXd::Zero(b.rows());
  for (int s = top; s >= 2; --s) {
    if (s <= s_hi) acc += r.cwiseAbs() * d;
    if (s > 2) r = r * f[static_cast<std::size_t>(s)];
  }
  return acc;
}

void check_horizon(const CoefficientSchedule& sched, int t) {
  require(t >= 2, "measurements start at t = 2");
  require(t <= sched.t_max(), "t beyond the coefficient horizon");
}

}  // namespace

std::vector<Eigen::MatrixXd> psi_sequence(const CoefficientSchedule& sched,
                                          const NetworkGraph& g, int t_end) {
  check_horizon(sched, t_end);
  const SparseMatrix b = gateway_selector(g);
  std::vector<Eigen::MatrixXd> out;
  Eigen::MatrixXd p = Eigen::MatrixXd(injection_matrix(sched, g, 2));
  out.push_back(b * p);
  for (int t = 3; t <= t_end; ++t) {
    Eigen::MatrixXd next = relay_matrix(sched, g, t) * p;
    next += Eigen::MatrixXd(injection_matrix(sched, g, t));
    p = std::move(next);
    out.push_back(b * p);
  }
  return out;
}

Eigen::MatrixXd compute_psi(const CoefficientSchedule& sched, const NetworkGraph& g, int t) {
  return psi_sequence(sched, g, t).back();
}

std::vector<Eigen::VectorXd> effective_noise_sequence(const RunTranscript& run,
                                                      const CoefficientSchedule& sched,
                                                      const NetworkGraph& g, int t_end) {
  check_horizon(sched, t_end);
  require(t_end <= run.t_end(), "transcript shorter than requested time");
  const SparseMatrix b = gateway_selector(g);
  std::vector<Eigen::VectorXd> out;
  Eigen::VectorXd acc = run.noise(2);
  out.push_back(b * acc);
  for (int t = 3; t <= t_end; ++t) {
    Eigen::VectorXd next = relay_matrix(sched, g, t) * acc;
    next += run.noise(t);
    acc = std::move(next);
    out.push_back(b * acc);
  }
  return out;
}

std::vector<double> epsilon_sq_terms(const CoefficientSchedule& sched, const NetworkGraph& g,
                                     std::span<const Quantizer> quantizers, int t_end) {
  check_horizon(sched, t_end);
  require(quantizers.size() == g.edge_count(), "need one quantizer per edge");
  const auto f = relay_matrices(sched, g, t_end);
  const Eigen::MatrixXd b = Eigen::MatrixXd(gateway_selector(g));
  const Eigen::VectorXd d = half_steps(quantizers);
  std::vector<double> terms;
  for (int tp = 2; tp <= t_end; ++tp) terms.push_back(noise_gain(f, b, d, tp, tp).squaredNorm());
  return terms;
}

double compute_epsilon_sq(const CoefficientSchedule& sched, const NetworkGraph& g,
                          std::span<const Quantizer> quantizers, int t) {
  double sum = 0.0;
  for (double term : epsilon_sq_terms(sched, g, quantizers, t)) sum += term;
  return sum;
}

double compute_epsilon_sq_as_printed(const CoefficientSchedule& sched, const NetworkGraph& g,
                                     std::span<const Quantizer> quantizers, int t) {
  check_horizon(sched, t);
  require(quantizers.size() == g.edge_count(), "need one quantizer per edge");
  const auto f = relay_matrices(sched, g, t);
  const Eigen::MatrixXd b = Eigen::MatrixXd(gateway_selector(g));
  const Eigen::VectorXd d = half_steps(quantizers);
  double sum = 0.0;
  for (int tp = 2; tp <= t; ++tp)
    sum += noise_gain(f, b, d, t, tp).dot(noise_gain(f, b, d, tp, tp));
  return sum;
}

Eigen::MatrixXd stack_rows(std::span<const Eigen::MatrixXd> blocks, std::size_t count) {
  require(count <= blocks.size() && count > 0, "bad block count");
  Eigen::Index rows = 0;
  for (std::size_t i = 0; i < count; ++i) rows += blocks[i].rows();
  Eigen::MatrixXd out(rows, blocks[0].cols());
  Eigen::Index r = 0;
  for (std::size_t i = 0; i < count; ++i) {
    out.middleRows(r, blocks[i].rows()) = blocks[i];
    r += blocks[i].rows();
  }
  return out;
}

Eigen::VectorXd stack_rows(std::span<const Eigen::VectorXd> blocks, std::size_t count) {
  require(count <= blocks.size() && count > 0, "bad block count");
  Eigen::Index rows = 0;
  for (std::size_t i = 0; i < count; ++i) rows += blocks[i].size();
  Eigen::VectorXd out(rows);
  Eigen::Index r = 0;
  for (std::size_t i = 0; i < count; ++i) {
    out.segment(r, blocks[i].size()) = blocks[i];
    r += blocks[i].size();
  }
  return out;
}

MeasurementRecord assemble_measurements(const RunTranscript& run, const NetworkGraph& g,
                                        const CoefficientSchedule& sched,
                                        std::span<const Quantizer> quantizers, int t) {
  check_horizon(sched, t);
  require(t <= run.t_end(), "transcript shorter than requested time");
  const SparseMatrix b = gateway_selector(g);
  std::vector<Eigen::VectorXd> z;
  for (int tp = 2; tp <= t; ++tp) z.push_back(b * run.y(tp));
  const auto count = static_cast<std::size_t>(t - 1);
  auto psi = psi_sequence(sched, g, t);
  auto neff = effective_noise_sequence(run, sched, g, t);
  return MeasurementRecord{stack_rows(std::span<const Eigen::VectorXd>(z), count),
                           stack_rows(std::span<const Eigen::MatrixXd>(psi), count),
                           stack_rows(std::span<const Eigen::VectorXd>(neff), count),
                           compute_epsilon_sq(sched, g, quantizers, t), t};
}

}  // namespace qnc
