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

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace qnc {
namespace textio {
class Tokenizer;
}

using NodeIndex = std::size_t;
using EdgeIndex = std::size_t;

struct Edge {
  NodeIndex tail = 0;
  NodeIndex head = 0;
  int capacity = 1;  // bits per channel use

  friend bool operator==(const Edge&, const Edge&) = default;
};

/// Directed simple graph with per-edge capacities and a gateway (sink) node.
///
/// Nodes are 0-based indices `0..node_count()-1`; an edge's id is its
/// position in `edges()`. The text form written by `to_edge_list()` is
/// 1-based for both nodes and edges:
///
///     n m gateway
///     edge_id tail head capacity     (m lines)
///
/// Instances are immutable after construction.
class NetworkGraph {
 public:
  NetworkGraph(std::size_t node_count, std::vector<Edge> edges,
               NodeIndex gateway);

  std::size_t node_count() const { return node_count_; }
  std::size_t edge_count() const { return edges_.size(); }
  NodeIndex gateway() const { return gateway_; }

  std::span<const Edge> edges() const { return edges_; }
  const Edge& edge(EdgeIndex e) const { return edges_.at(e); }
  NodeIndex tail(EdgeIndex e) const { return edges_[e].tail; }
  NodeIndex head(EdgeIndex e) const { return edges_[e].head; }

  /// In(v): edges whose head is v, ascending edge id.
  std::span<const EdgeIndex> in_edges(NodeIndex v) const;
  /// Out(v): edges whose tail is v, ascending edge id.
  std::span<const EdgeIndex> out_edges(NodeIndex v) const;

  std::string to_edge_list() const;
  static NetworkGraph from_edge_list(std::string_view text);
  static NetworkGraph read_edge_list(textio::Tokenizer& tok);

  friend bool operator==(const NetworkGraph& a, const NetworkGraph& b) {
    return a.node_count_ == b.node_count_ && a.gateway_ == b.gateway_ &&
           a.edges_ == b.edges_;
  }

 private:
  std::size_t node_count_;
  std::vector<Edge> edges_;
  NodeIndex gateway_;
  // CSR adjacency.
  std::vector<std::size_t> in_offsets_, out_offsets_;
  std::vector<EdgeIndex> in_list_, out_list_;
};

/// Samples `edge_count` distinct ordered pairs uniformly without replacement
/// and a uniform gateway. Graphs where some node cannot reach the gateway are
/// rejected and redrawn, up to `max_attempts` draws.
NetworkGraph generate_random_network(std::size_t node_count,
                                     std::size_t edge_count, int capacity,
                                     std::uint64_t seed, int max_attempts = 100);

/// Hop distance from every node to the gateway; nullopt when unreachable.
std::vector<std::optional<std::size_t>> hop_distances_to_gateway(
    const NetworkGraph& g);

struct RoutingTable {
  std::vector<std::optional<EdgeIndex>> next_hop;  // nullopt at the gateway
  std::vector<std::size_t> dist;                   // hops to gateway
};

/// Minimum-hop routes towards the gateway (unit-weight Dijkstra, run as a
/// breadth-first search on reversed edges). Among equally short next hops the
/// smallest edge id wins. Throws kUnreachable naming the first stranded node.
RoutingTable shortest_paths_to_gateway(const NetworkGraph& g);

}  // namespace qnc
