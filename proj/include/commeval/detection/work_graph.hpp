#pragma once

// Compact weighted graph with self-loops, used by the multilevel optimizers
// (Louvain and the map-equation search) for community aggregation.

#include <algorithm>
#include <cstdint>
#include <unordered_map>
#include <vector>

#include "commeval/graph.hpp"

namespace commeval::detail {

struct WorkGraph {
  std::vector<std::vector<Neighbor>> adjacency;  // no self entries
  std::vector<double> self;                      // internal weight of a supernode
  std::vector<double> strength;                  // sum of incident weights + 2 * self
  double total = 0.0;                            // m

  std::size_t size() const { return adjacency.size(); }

  static WorkGraph from(const Graph& g) {
    WorkGraph w;
    const std::size_t n = g.node_count();
    w.adjacency.resize(n);
    w.self.assign(n, 0.0);
    w.strength.assign(n, 0.0);
    for (NodeIndex v = 0; v < n; ++v) {
      auto row = g.neighbors(v);
      w.adjacency[v].assign(row.begin(), row.end());
      w.strength[v] = g.strength(v);
    }
    w.total = g.total_weight();
    return w;
  }

  // Induced subgraph on `nodes` (indices into this graph).
  WorkGraph induced(const std::vector<NodeIndex>& nodes) const {
    std::unordered_map<NodeIndex, NodeIndex> local;
    for (std::size_t i = 0; i < nodes.size(); ++i) local.emplace(nodes[i], static_cast<NodeIndex>(i));
    WorkGraph w;
    w.adjacency.resize(nodes.size());
    w.self.assign(nodes.size(), 0.0);
    w.strength.assign(nodes.size(), 0.0);
    for (std::size_t i = 0; i < nodes.size(); ++i) {
      w.self[i] = self[nodes[i]];
      w.strength[i] = 2.0 * self[nodes[i]];
      w.total += self[nodes[i]];
      for (const auto& nb : adjacency[nodes[i]]) {
        auto it = local.find(nb.node);
        if (it == local.end()) continue;
        w.adjacency[i].push_back({it->second, nb.weight});
        w.strength[i] += nb.weight;
        w.total += 0.5 * nb.weight;
      }
    }
    return w;
  }

  // Collapses each community (labels 0..k-1) into one supernode.
  WorkGraph aggregate(const std::vector<Label>& community, std::size_t k) const {
    WorkGraph w;
    w.adjacency.resize(k);
    w.self.assign(k, 0.0);
    w.strength.assign(k, 0.0);
    w.total = total;
    std::vector<std::unordered_map<Label, double>> links(k);
    std::vector<std::vector<Label>> order(k);
    for (std::size_t v = 0; v < size(); ++v) {
      const Label c = community[v];
      w.self[c] += self[v];
      w.strength[c] += strength[v];
      for (const auto& nb : adjacency[v]) {
        const Label d = community[nb.node];
        if (d == c) {
          // Each intra edge is seen from both ends.
          w.self[c] += 0.5 * nb.weight;
        } else {
          auto [it, inserted] = links[c].try_emplace(d, 0.0);
          if (inserted) order[c].push_back(d);
          it->second += nb.weight;
        }
      }
    }
    for (std::size_t c = 0; c < k; ++c) {
      std::sort(order[c].begin(), order[c].end());
      for (auto d : order[c]) w.adjacency[c].push_back({d, links[c][d]});
    }
    return w;
  }
};

// Renumbers labels to 0..k-1 by first appearance; returns k.
inline std::size_t compact_labels(std::vector<Label>& labels) {
  std::unordered_map<Label, Label> remap;
  for (auto& l : labels) {
    auto [it, inserted] = remap.try_emplace(l, static_cast<Label>(remap.size()));
    l = it->second;
  }
  return remap.size();
}

}  // namespace commeval::detail
