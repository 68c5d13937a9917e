#pragma once

// Divisive clustering by repeated removal of the edge with the highest
// shortest-path betweenness (Girvan & Newman). Distances are hop counts even
// on weighted graphs.

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "commeval/detection/types.hpp"
#include "commeval/structural.hpp"

namespace commeval {

namespace detail {

struct EdgeSlot {
  NodeIndex node;
  std::size_t edge;
};

// Brandes accumulation over the edges marked alive. Each unordered pair of
// endpoints contributes once in total.
inline std::vector<double> betweenness(std::size_t n, const std::vector<std::vector<EdgeSlot>>& adj,
                                       const std::vector<bool>& alive, std::size_t edge_count) {
  std::vector<double> score(edge_count, 0.0);
  std::vector<double> sigma(n), delta(n);
  std::vector<int> dist(n);
  std::vector<NodeIndex> order;
  order.reserve(n);
  std::vector<NodeIndex> queue(n);
  for (NodeIndex s = 0; s < n; ++s) {
    std::fill(sigma.begin(), sigma.end(), 0.0);
    std::fill(delta.begin(), delta.end(), 0.0);
    std::fill(dist.begin(), dist.end(), -1);
    order.clear();
    sigma[s] = 1.0;
    dist[s] = 0;
    std::size_t head = 0, tail = 0;
    queue[tail++] = s;
    while (head < tail) {
      NodeIndex v = queue[head++];
      order.push_back(v);
      for (const auto& slot : adj[v]) {
        if (!alive[slot.edge]) continue;
        NodeIndex w = slot.node;
        if (dist[w] < 0) {
          dist[w] = dist[v] + 1;
          queue[tail++] = w;
        }
        if (dist[w] == dist[v] + 1) sigma[w] += sigma[v];
      }
    }
    for (auto it = order.rbegin(); it != order.rend(); ++it) {
      NodeIndex w = *it;
      for (const auto& slot : adj[w]) {
        if (!alive[slot.edge]) continue;
        NodeIndex v = slot.node;
        if (dist[v] == dist[w] - 1) {
          double c = sigma[v] / sigma[w] * (1.0 + delta[w]);
          score[slot.edge] += c;
          delta[v] += c;
        }
      }
    }
  }
  for (auto& x : score) x *= 0.5;
  return score;
}

inline std::vector<std::vector<EdgeSlot>> edge_slots(const Graph& g) {
  std::vector<std::vector<EdgeSlot>> adj(g.node_count());
  auto edges = g.edges();
  for (std::size_t i = 0; i < edges.size(); ++i) {
    adj[edges[i].u].push_back({edges[i].v, i});
    adj[edges[i].v].push_back({edges[i].u, i});
  }
  return adj;
}

inline std::vector<Label> alive_components(std::size_t n, const std::vector<std::vector<EdgeSlot>>& adj,
                                           const std::vector<bool>& alive) {
  constexpr Label kUnset = static_cast<Label>(-1);
  std::vector<Label> label(n, kUnset);
  std::vector<NodeIndex> stack;
  Label next = 0;
  for (NodeIndex s = 0; s < n; ++s) {
    if (label[s] != kUnset) continue;
    label[s] = next;
    stack.push_back(s);
    while (!stack.empty()) {
      NodeIndex v = stack.back();
      stack.pop_back();
      for (const auto& slot : adj[v]) {
        if (alive[slot.edge] && label[slot.node] == kUnset) {
          label[slot.node] = next;
          stack.push_back(slot.node);
        }
      }
    }
    ++next;
  }
  return label;
}

}  // namespace detail

// Score per edge, aligned with g.edges().
inline std::vector<double> edge_betweenness(const Graph& g) {
  auto adj = detail::edge_slots(g);
  std::vector<bool> alive(g.edge_count(), true);
  return detail::betweenness(g.node_count(), adj, alive, g.edge_count());
}

// Component partitions recorded each time the component count changes,
// starting with the components of the intact graph. Modularity is evaluated
// on the original graph.
inline Dendrogram girvan_newman_dendrogram(const Graph& g) {
  detail::require_edges(g, Algorithm::GN);
  const std::size_t n = g.node_count();
  const std::size_t m = g.edge_count();
  auto adj = detail::edge_slots(g);
  std::vector<bool> alive(m, true);

  Dendrogram d;
  auto labels = detail::alive_components(n, adj, alive);
  Partition current(labels);
  d.levels.push_back({current, modularity(g, current), "start"});

  auto edges = g.edges();
  for (std::size_t removed = 0; removed < m; ++removed) {
    auto score = detail::betweenness(n, adj, alive, m);
    // Edges are sorted by (u, v), so the first maximum is the smallest pair.
    std::size_t pick = m;
    double top = -1.0;
    for (std::size_t i = 0; i < m; ++i) {
      if (!alive[i]) continue;
      if (pick == m || score[i] > top + 1e-9 * std::max(1.0, top)) {
        pick = i;
        top = score[i];
      }
    }
    alive[pick] = false;
    labels = detail::alive_components(n, adj, alive);
    Partition next(labels);
    if (next.community_count() != current.community_count()) {
      current = std::move(next);
      d.levels.push_back({current, modularity(g, current),
                          "remove " + g.name(edges[pick].u) + " " + g.name(edges[pick].v)});
    }
  }
  return d;
}

inline DetectionResult girvan_newman(const Graph& g) {
  auto d = girvan_newman_dendrogram(g);
  DetectionResult r;
  r.algorithm = Algorithm::GN;
  const auto& best = d.levels[d.best_level()];
  r.partition = best.partition;
  r.objective = best.modularity;
  return r;
}

}  // namespace commeval
