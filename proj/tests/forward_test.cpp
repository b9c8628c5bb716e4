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

#include <cmath>

#include "qnc/forward.hpp"
#include "qnc/quantizer.hpp"
#include "qnc/signal.hpp"
#include "support.hpp"

using namespace qnc;

namespace {

ForwardingRun forward(const NetworkGraph& g, const Eigen::VectorXd& x, int L) {
  return simulate_forwarding(g, shortest_paths_to_gateway(g), x, L, 1.0);
}

}  // namespace

TEST_CASE("star into the gateway delivers everything in one step") {
  std::vector<Edge> edges;
  for (NodeIndex v = 1; v < 6; ++v) edges.push_back({v, 0, 1});
  const NetworkGraph g(6, edges, 0);
  const ForwardingRun r = forward(g, Eigen::VectorXd::Constant(6, 0.3), 3);
  CHECK(r.last_arrival == 1);
  CHECK(r.total_delay == 3);
  CHECK(r.deliveries[0].arrival == 0);
  CHECK(r.deliveries[0].value == 0.3);
}

TEST_CASE("chain 1 -> 2 -> 3") {
  const NetworkGraph g(3, {{0, 1, 1}, {1, 2, 1}}, 2);
  const ForwardingRun r = forward(g, Eigen::VectorXd::Zero(3), 2);
  CHECK(r.deliveries[0].arrival == 2);
  CHECK(r.deliveries[1].arrival == 1);
  CHECK(r.total_delay == 4);
}

TEST_CASE("two sources sharing the last edge queue") {
  // 1 -> 2 -> 3 and 2 is also a source: node 2 sends its own packet first,
  // node 1's packet waits at node 2 one step.
  const NetworkGraph g(3, {{0, 1, 1}, {1, 2, 1}}, 2);
  const ForwardingRun r = forward(g, Eigen::VectorXd::Zero(3), 5);
  CHECK(r.last_arrival == 2);
  // A funnel: 1 -> 3, 2 -> 3, 3 -> 4 (gateway). Node 3 forwards its own
  // packet at t = 1, then origin 1 at t = 2 and origin 2 at t = 3.
  const NetworkGraph f(4, {{0, 2, 1}, {1, 2, 1}, {2, 3, 1}}, 3);
  const ForwardingRun q = forward(f, Eigen::VectorXd::Zero(4), 2);
  CHECK(q.deliveries[2].arrival == 1);
  CHECK(q.deliveries[0].arrival == 2);
  CHECK(q.deliveries[1].arrival == 3);
  CHECK(q.total_delay == 6);
}

TEST_CASE("delay bounds and source-only quantization error") {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const NetworkGraph g = generate_random_network(30, 90, 1, seed);
    const RoutingTable rt = shortest_paths_to_gateway(g);
    const MessageEnsemble m = generate_sparse_messages(30, 3, 1.0, seed);
    const int L = 2 + static_cast<int>(seed % 4);
    const ForwardingRun r = simulate_forwarding(g, rt, m.x, L, 1.0);
    std::size_t max_dist = 0;
    for (auto d : rt.dist) max_dist = std::max(max_dist, d);
    const std::size_t in = g.in_edges(g.gateway()).size();
    CHECK(r.last_arrival >= static_cast<int>(max_dist));
    CHECK(r.last_arrival >= static_cast<int>((29 + in - 1) / in));
    CHECK(r.total_delay == static_cast<long long>(L) * r.last_arrival);
    const Quantizer q(L, 1.0);
    for (NodeIndex v = 0; v < 30; ++v) {
      const auto i = static_cast<Eigen::Index>(v);
      if (v != g.gateway()) {
        CHECK(r.deliveries[v].value == q(m.x(i)));
        CHECK(r.deliveries[v].arrival >= static_cast<int>(rt.dist[v]));
      }
      CHECK(std::abs(r.deliveries[v].value - m.x(i)) <= q.step() / 2);
    }
  }
}

TEST_CASE("error depends on the messages and L only") {
  const MessageEnsemble m = generate_sparse_messages(20, 2, 1.0, 4);
  const auto a = forward(generate_random_network(20, 60, 1, 1), m.x, 3).estimate();
  const auto b = forward(generate_random_network(20, 70, 1, 2), m.x, 3).estimate();
  // The gateway keeps its own message exactly, everyone else is quantized.
  const Quantizer q(3, 1.0);
  for (Eigen::Index v = 0; v < 20; ++v) {
    CHECK((a(v) == m.x(v) || a(v) == q(m.x(v))));
    CHECK((b(v) == m.x(v) || b(v) == q(m.x(v))));
  }
}

TEST_CASE("invalid routes are rejected") {
  const NetworkGraph g(3, {{0, 1, 1}, {1, 2, 1}}, 2);
  RoutingTable rt = shortest_paths_to_gateway(g);
  rt.next_hop[0] = EdgeIndex{1};
  CHECK_CODE(simulate_forwarding(g, rt, Eigen::VectorXd::Zero(3), 2, 1.0),
             ErrorCode::kInvalidArgument);
  rt.next_hop[0].reset();
  CHECK_CODE(simulate_forwarding(g, rt, Eigen::VectorXd::Zero(3), 2, 1.0),
             ErrorCode::kUnreachable);
}
