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

#include "qnc/forward.hpp"

#include <algorithm>
#include <deque>
#include <string>

#include "qnc/error.hpp"
#include "qnc/quantizer.hpp"

namespace qnc {

Eigen::VectorXd ForwardingRun::estimate() const {
  Eigen::VectorXd out(static_cast<Eigen::Index>(deliveries.size()));
  for (std::size_t v = 0; v < deliveries.size(); ++v)
    out(static_cast<Eigen::Index>(v)) = deliveries[v].value;
  return out;
}

ForwardingRun simulate_forwarding(const NetworkGraph& g, const RoutingTable& routes,
                                  const Eigen::VectorXd& x, int block_length, double q_max) {
  const std::size_t n = g.node_count();
  require(static_cast<std::size_t>(x.size()) == n, "message vector does not match the graph");
  require(routes.next_hop.size() == n && routes.dist.size() == n,
          "routing table does not match the graph");
  const NodeIndex gw = g.gateway();
  for (NodeIndex v = 0; v < n; ++v) {
    if (v == gw) continue;
    const auto& hop = routes.next_hop[v];
    if (!hop)
      fail(ErrorCode::kUnreachable, "node " + std::to_string(v + 1) + " has no route");
    require(*hop < g.edge_count() && g.tail(*hop) == v,
            "next hop of node " + std::to_string(v + 1) + " does not leave that node");
  }
  const Quantizer quantizer(block_length, q_max);

  ForwardingRun run;
  run.block_length = block_length;
  run.deliveries.resize(n);
  run.deliveries[gw] = Delivery{0, x(static_cast<Eigen::Index>(gw))};

  std::vector<std::deque<NodeIndex>> queues(n);
  std::size_t pending = 0;
  for (NodeIndex v = 0; v < n; ++v) {
    if (v == gw) continue;
    queues[v].push_back(v);
    run.deliveries[v].value = quantizer(x(static_cast<Eigen::Index>(v)));
    ++pending;
  }

  std::vector<std::vector<NodeIndex>> arrivals(n);
  // Every packet needs at most n - 1 hops and waits behind at most n - 2
  // others, so (n - 1)^2 steps is a hard ceiling.
  const int step_limit = static_cast<int>(n * n) + 1;
  for (int step = 1; pending > 0; ++step) {
    if (step > step_limit) fail(ErrorCode::kNotConverged, "forwarding did not drain");
    for (NodeIndex v = 0; v < n; ++v) {
      if (v == gw || queues[v].empty()) continue;
      const NodeIndex packet = queues[v].front();
      queues[v].pop_front();
      arrivals[g.head(*routes.next_hop[v])].push_back(packet);
    }
    for (NodeIndex v = 0; v < n; ++v) {
      auto& in = arrivals[v];
      if (in.empty()) continue;
      std::sort(in.begin(), in.end());
      if (v == gw) {
        for (NodeIndex origin : in) run.deliveries[origin].arrival = step;
        pending -= in.size();
        run.last_arrival = step;
      } else {
        queues[v].insert(queues[v].end(), in.begin(), in.end());
      }
      in.clear();
    }
  }
  run.total_delay = static_cast<long long>(block_length) * run.last_arrival;
  return run;
}

}  // namespace qnc
