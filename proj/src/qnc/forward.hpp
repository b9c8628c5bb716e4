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

#pragma once

#include <Eigen/Dense>
#include <vector>

#include "qnc/graph.hpp"

namespace qnc {

struct Delivery {
  int arrival = 0;     // timestep the packet reached the gateway (0 for the gateway itself)
  double value = 0.0;  // reconstructed message
};

struct ForwardingRun {
  std::vector<Delivery> deliveries;  // indexed by origin node
  int last_arrival = 0;
  long long total_delay = 0;  // channel uses: block_length * last_arrival
  int block_length = 0;

  Eigen::VectorXd estimate() const;
};

/// Store-and-forward delivery of every message to the gateway along `routes`.
///
/// Each node quantizes its own message once with a block_length-bit uniform
/// quantizer and queues the packet at t = 1. In every timestep each node sends
/// the head of its FIFO queue over its next-hop edge, so an edge carries at
/// most one packet per step; packets arriving in the same step are queued in
/// origin-id order. Relays never re-quantize. The gateway's own message is
/// available at t = 0 without quantization.
ForwardingRun simulate_forwarding(const NetworkGraph& g, const RoutingTable& routes,
                                  const Eigen::VectorXd& x, int block_length, double q_max);

}  // namespace qnc
