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

#include "qnc/graph.hpp"

#include <algorithm>
#include <deque>
#include <numeric>
#include <unordered_set>

#include "qnc/error.hpp"
#include "qnc/random.hpp"
#include "qnc/textio.hpp"

namespace qnc {
namespace {

void build_csr(std::size_t n, const std::vector<Edge>& edges, bool by_head,
               std::vector<std::size_t>& offsets, std::vector<EdgeIndex>& list) {
  offsets.assign(n + 1, 0);
  for (const Edge& e : edges) ++offsets[(by_head ? e.head : e.tail) + 1];
  std::partial_sum(offsets.begin(), offsets.end(), offsets.begin());
  list.resize(edges.size());
  std::vector<std::size_t> fill(offsets.begin(), offsets.end() - 1);
  // Edge ids are visited in ascending order, so each bucket stays sorted.
  for (EdgeIndex id = 0; id < edges.size(); ++id) {
    NodeIndex v = by_head ? edges[id].head : edges[id].tail;
    list[fill[v]++] = id;
  }
}

}  // namespace

NetworkGraph::NetworkGraph(std::size_t node_count, std::vector<Edge> edges,
                           NodeIndex gateway)
    : node_count_(node_count), edges_(std::move(edges)), gateway_(gateway) {
  require(node_count_ >= 1, "graph needs at least one node");
  require(gateway_ < node_count_, "gateway index out of range");
  std::unordered_set<std::uint64_t> seen;
  for (EdgeIndex id = 0; id < edges_.size(); ++id) {
    const Edge& e = edges_[id];
    require(e.tail < node_count_ && e.head < node_count_,
            "edge " + std::to_string(id) + " references a missing node");
    require(e.tail != e.head, "edge " + std::to_string(id) + " is a self-loop");
    require(e.capacity >= 1,
            "edge " + std::to_string(id) + " has capacity below 1");
    require(seen.insert(e.tail * node_count_ + e.head).second,
            "edge " + std::to_string(id) + " duplicates an earlier edge");
  }
  build_csr(node_count_, edges_, true, in_offsets_, in_list_);
  build_csr(node_count_, edges_, false, out_offsets_, out_list_);
  require(in_offsets_[gateway_ + 1] > in_offsets_[gateway_],
          "gateway has no incoming edge");
}

std::span<const EdgeIndex> NetworkGraph::in_edges(NodeIndex v) const {
  return std::span<const EdgeIndex>(in_list_).subspan(
      in_offsets_[v], in_offsets_[v + 1] - in_offsets_[v]);
}

std::span<const EdgeIndex> NetworkGraph::out_edges(NodeIndex v) const {
  return std::span<const EdgeIndex>(out_list_).subspan(
      out_offsets_[v], out_offsets_[v + 1] - out_offsets_[v]);
}

std::string NetworkGraph::to_edge_list() const {
  std::string out = std::to_string(node_count_) + ' ' +
                    std::to_string(edges_.size()) + ' ' +
                    std::to_string(gateway_ + 1) + '\n';
  for (EdgeIndex id = 0; id < edges_.size(); ++id) {
    const Edge& e = edges_[id];
    out += std::to_string(id + 1) + ' ' + std::to_string(e.tail + 1) + ' ' +
           std::to_string(e.head + 1) + ' ' + std::to_string(e.capacity) + '\n';
  }
  return out;
}

NetworkGraph NetworkGraph::from_edge_list(std::string_view text) {
  textio::Tokenizer tok(text);
  NetworkGraph g = read_edge_list(tok);
  if (!tok.done()) fail(ErrorCode::kParse, "trailing data after edge list");
  return g;
}

NetworkGraph NetworkGraph::read_edge_list(textio::Tokenizer& tok) {
  auto n = tok.next_int<std::size_t>();
  auto m = tok.next_int<std::size_t>();
  auto gw = tok.next_int<std::size_t>();
  if (gw == 0 || gw > n) fail(ErrorCode::kParse, "gateway id out of range");
  std::vector<Edge> edges(m);
  std::vector<bool> filled(m, false);
  for (std::size_t i = 0; i < m; ++i) {
    auto id = tok.next_int<std::size_t>();
    auto tail = tok.next_int<std::size_t>();
    auto head = tok.next_int<std::size_t>();
    auto cap = tok.next_int<int>();
    if (id == 0 || id > m || filled[id - 1])
      fail(ErrorCode::kParse, "bad or repeated edge id " + std::to_string(id));
    if (tail == 0 || head == 0)
      fail(ErrorCode::kParse, "node ids are 1-based");
    filled[id - 1] = true;
    edges[id - 1] = Edge{tail - 1, head - 1, cap};
  }
  return NetworkGraph(n, std::move(edges), gw - 1);
}

std::vector<std::optional<std::size_t>> hop_distances_to_gateway(
    const NetworkGraph& g) {
  std::vector<std::optional<std::size_t>> dist(g.node_count());
  std::deque<NodeIndex> queue{g.gateway()};
  dist[g.gateway()] = 0;
  while (!queue.empty()) {
    NodeIndex v = queue.front();
    queue.pop_front();
    for (EdgeIndex e : g.in_edges(v)) {
      NodeIndex u = g.tail(e);
      if (!dist[u]) {
        dist[u] = *dist[v] + 1;
        queue.push_back(u);
      }
    }
  }
  return dist;
}

RoutingTable shortest_paths_to_gateway(const NetworkGraph& g) {
  auto dist = hop_distances_to_gateway(g);
  RoutingTable routes;
  routes.next_hop.resize(g.node_count());
  routes.dist.resize(g.node_count());
  for (NodeIndex v = 0; v < g.node_count(); ++v) {
    if (!dist[v])
      fail(ErrorCode::kUnreachable,
           "node " + std::to_string(v + 1) + " has no path to the gateway");
    routes.dist[v] = *dist[v];
    if (v == g.gateway()) continue;
    for (EdgeIndex e : g.out_edges(v)) {  // ascending id: first match wins
      const auto& d = dist[g.head(e)];
      if (d && *d + 1 == *dist[v]) {
        routes.next_hop[v] = e;
        break;
      }
    }
  }
  return routes;
}

NetworkGraph generate_random_network(std::size_t node_count,
                                     std::size_t edge_count, int capacity,
                                     std::uint64_t seed, int max_attempts) {
  require(node_count >= 2, "random network needs at least 2 nodes");
  require(capacity >= 1, "edge capacity must be at least 1");
  const std::size_t max_edges = node_count * (node_count - 1);
  require(edge_count <= max_edges,
          std::to_string(edge_count) + " edges exceed the simple-digraph maximum " +
              std::to_string(max_edges) + " for " + std::to_string(node_count) +
              " nodes");
  require(edge_count >= 1, "random network needs at least one edge");

  Rng rng(seed);
  std::vector<std::size_t> pairs(max_edges);
  for (int attempt = 0; attempt < max_attempts; ++attempt) {
    // Partial Fisher-Yates over all ordered pairs (tail, head), tail != head.
    std::iota(pairs.begin(), pairs.end(), std::size_t{0});
    for (std::size_t i = 0; i < edge_count; ++i) {
      std::uniform_int_distribution<std::size_t> pick(i, max_edges - 1);
      std::swap(pairs[i], pairs[pick(rng)]);
    }
    std::vector<std::size_t> chosen(pairs.begin(), pairs.begin() + edge_count);
    std::sort(chosen.begin(), chosen.end());
    std::vector<Edge> edges;
    edges.reserve(edge_count);
    for (std::size_t p : chosen) {
      NodeIndex tail = p / (node_count - 1);
      NodeIndex head = p % (node_count - 1);
      if (head >= tail) ++head;
      edges.push_back(Edge{tail, head, capacity});
    }
    NodeIndex gateway =
        std::uniform_int_distribution<NodeIndex>(0, node_count - 1)(rng);

    bool gateway_fed = std::any_of(edges.begin(), edges.end(),
                                   [&](const Edge& e) { return e.head == gateway; });
    if (!gateway_fed) continue;
    NetworkGraph g(node_count, std::move(edges), gateway);
    auto dist = hop_distances_to_gateway(g);
    if (std::all_of(dist.begin(), dist.end(), [](const auto& d) { return d.has_value(); }))
      return g;
  }
  fail(ErrorCode::kBudgetExceeded,
       "no connected deployment with " + std::to_string(node_count) + " nodes and " +
           std::to_string(edge_count) + " edges after " + std::to_string(max_attempts) +
           " draws (some node could not reach the gateway)");
}

}  // namespace qnc
