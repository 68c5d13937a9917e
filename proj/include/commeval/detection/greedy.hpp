#pragma once

// Agglomerative modularity maximization (Clauset-Newman-Moore): start from
// singletons and repeatedly merge the adjacent pair with the largest gain.

#include <map>
#include <numeric>
#include <string>
#include <vector>

#include "commeval/detection/types.hpp"
#include "commeval/structural.hpp"

namespace commeval {

// Full merge history. Modularity per level is tracked incrementally from the
// merge gains. Merging stops when no two communities are adjacent.
inline Dendrogram greedy_modularity_dendrogram(const Graph& g) {
  detail::require_edges(g, Algorithm::GM);
  const std::size_t n = g.node_count();
  const double m = g.total_weight();

  // between[i][j]: edge weight between communities i and j (i != j).
  std::vector<std::map<Label, double>> between(n);
  std::vector<double> a(n);  // community strength / 2m
  for (const auto& e : g.edges()) {
    between[e.u][e.v] += e.weight;
    between[e.v][e.u] += e.weight;
  }
  for (NodeIndex v = 0; v < n; ++v) a[v] = g.strength(v) / (2.0 * m);

  std::vector<Label> owner(n);
  std::iota(owner.begin(), owner.end(), Label{0});
  std::vector<bool> alive(n, true);

  double q = 0.0;
  for (NodeIndex v = 0; v < n; ++v) q -= a[v] * a[v];

  Dendrogram d;
  d.levels.push_back({Partition(owner), q, "start"});

  while (true) {
    bool found = false;
    Label bi = 0, bj = 0;
    double best = 0.0;
    // Ascending (i, j) scan; strict comparison keeps the smallest pair on ties.
    for (Label i = 0; i < n; ++i) {
      if (!alive[i]) continue;
      for (const auto& [j, w] : between[i]) {
        if (j <= i) continue;
        double dq = w / m - 2.0 * a[i] * a[j];
        if (!found || dq > best) {
          found = true;
          best = dq;
          bi = i;
          bj = j;
        }
      }
    }
    if (!found) break;

    // Merge bj into bi.
    for (const auto& [k, w] : between[bj]) {
      if (k == bi) continue;
      between[bi][k] += w;
      between[k][bi] += w;
      between[k].erase(bj);
    }
    between[bi].erase(bj);
    between[bj].clear();
    a[bi] += a[bj];
    a[bj] = 0.0;
    alive[bj] = false;
    for (auto& o : owner) {
      if (o == bj) o = bi;
    }
    q += best;
    d.levels.push_back({Partition(owner), q, "merge " + std::to_string(bi) + " " + std::to_string(bj)});
  }
  return d;
}

inline DetectionResult greedy_modularity(const Graph& g) {
  auto d = greedy_modularity_dendrogram(g);
  DetectionResult r;
  r.algorithm = Algorithm::GM;
  r.partition = std::move(d.levels[d.best_level()].partition);
  r.objective = modularity(g, r.partition);
  return r;
}

}  // namespace commeval
