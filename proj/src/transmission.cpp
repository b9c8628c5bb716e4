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

#include "qnc/transmission.hpp"

#include <cmath>
#include <string>

#include "qnc/error.hpp"
#include "qnc/textio.hpp"

namespace qnc {

EdgeState EdgeState::initial_rest(std::size_t edge_count) {
  const auto m = static_cast<Eigen::Index>(edge_count);
  return EdgeState{Eigen::VectorXd::Zero(m), Eigen::VectorXd::Zero(m), 1};
}

std::vector<Quantizer> edge_quantizers(const NetworkGraph& g, int block_length,
                                       double q_max) {
  std::vector<Quantizer> qs;
  qs.reserve(g.edge_count());
  for (const Edge& e : g.edges())
    qs.push_back(Quantizer::for_edge(block_length, e.capacity, q_max));
  return qs;
}

Eigen::VectorXd relay_inputs(const EdgeState& state, const NetworkGraph& g,
                             const CoefficientSchedule& sched, const Eigen::VectorXd& x) {
  require(static_cast<std::size_t>(state.y.size()) == g.edge_count(),
          "edge state does not match the graph");
  require(static_cast<std::size_t>(x.size()) == g.node_count(),
          "message vector does not match the graph");
  const int t = state.t + 1;
  Eigen::VectorXd u(state.y.size());
  for (EdgeIndex e = 0; e < g.edge_count(); ++e) {
    const NodeIndex v = g.tail(e);
    auto in = g.in_edges(v);
    auto beta = sched.beta(e, t);
    double acc = sched.alpha(e, t) * x(static_cast<Eigen::Index>(v));
    for (std::size_t j = 0; j < in.size(); ++j)
      acc += beta[j] * state.y(static_cast<Eigen::Index>(in[j]));
    u(static_cast<Eigen::Index>(e)) = acc;
  }
  return u;
}

EdgeState step_network(const EdgeState& state, const NetworkGraph& g,
                       const CoefficientSchedule& sched, const Eigen::VectorXd& x,
                       std::span<const Quantizer> quantizers) {
  require(quantizers.size() == g.edge_count(), "need one quantizer per edge");
  Eigen::VectorXd u = relay_inputs(state, g, sched, x);
  EdgeState next{Eigen::VectorXd(u.size()), Eigen::VectorXd(u.size()), state.t + 1};
  for (Eigen::Index e = 0; e < u.size(); ++e) {
    const Quantizer& q = quantizers[static_cast<std::size_t>(e)];
    if (!(std::abs(u(e)) <= q.q_max()))
      fail(ErrorCode::kOverflow,
           "edge " + std::to_string(e + 1) + " overflows at t=" + std::to_string(next.t) +
               ": pre-quantization value " + textio::format_double(u(e)));
    next.y(e) = q(u(e));
    next.quant_err(e) = next.y(e) - u(e);
  }
  return next;
}

RunTranscript simulate_qnc(const NetworkGraph& g, const CoefficientSchedule& sched,
                           const Eigen::VectorXd& x, std::span<const Quantizer> quantizers,
                           int t_end) {
  require(t_end >= 1 && t_end <= sched.t_max(), "simulation end outside schedule horizon");
  std::vector<EdgeState> states{EdgeState::initial_rest(g.edge_count())};
  for (int t = 2; t <= t_end; ++t)
    states.push_back(step_network(states.back(), g, sched, x, quantizers));
  return RunTranscript(std::move(states));
}

RunTranscript simulate_unquantized(const NetworkGraph& g, const CoefficientSchedule& sched,
                                   const Eigen::VectorXd& x, int t_end) {
  require(t_end >= 1 && t_end <= sched.t_max(), "simulation end outside schedule horizon");
  std::vector<EdgeState> states{EdgeState::initial_rest(g.edge_count())};
  for (int t = 2; t <= t_end; ++t) {
    const EdgeState& prev = states.back();
    Eigen::VectorXd u = relay_inputs(prev, g, sched, x);
    states.push_back(EdgeState{u, Eigen::VectorXd::Zero(u.size()), t});
  }
  return RunTranscript(std::move(states));
}

}  // namespace qnc
