#pragma once

// Walktrap (Pons & Latapy): agglomerative clustering under the random-walk
// distance
//   r_ij^2 = sum_k (P^t_ik - P^t_jk)^2 / d_k
// merging the adjacent pair that least increases the within-cluster squared
// distance, delta_sigma = (1/n) |C1||C2| / (|C1|+|C2|) r^2. The returned cut is
// the dendrogram level with maximal modularity.

#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <tuple>
#include <vector>

#include "commeval/detection/types.hpp"
#include "commeval/random.hpp"
#include "commeval/structural.hpp"

namespace commeval {

inline constexpr int kDefaultWalkLength = 4;

namespace detail {

// Row i of P^t for every node, P = D^-1 A.
inline std::vector<std::vector<double>> walk_probabilities(const Graph& g, int steps) {
  const std::size_t n = g.node_count();
  std::vector<std::vector<double>> rows(n, std::vector<double>(n, 0.0));
  std::vector<double> cur(n), nxt(n);
  for (NodeIndex i = 0; i < n; ++i) {
    std::fill(cur.begin(), cur.end(), 0.0);
    cur[i] = 1.0;
    for (int s = 0; s < steps; ++s) {
      std::fill(nxt.begin(), nxt.end(), 0.0);
      for (NodeIndex k = 0; k < n; ++k) {
        if (cur[k] == 0.0 || g.strength(k) == 0.0) continue;
        const double share = cur[k] / g.strength(k);
        for (const auto& nb : g.neighbors(k)) nxt[nb.node] += share * nb.weight;
      }
      cur.swap(nxt);
    }
    rows[i] = cur;
  }
  return rows;
}

}  // namespace detail

// The seed only breaks exact ties between candidate merges.
inline Dendrogram walktrap_dendrogram(const Graph& g, int steps = kDefaultWalkLength,
                                      std::uint64_t seed = 0) {
  detail::require_edges(g, Algorithm::WT);
  if (steps < 1) throw DetectionError("WT", "walk length must be at least 1");
  const std::size_t n = g.node_count();
  Rng rng(seed);

  auto prob = detail::walk_probabilities(g, steps);
  std::vector<double> inv_d(n, 0.0);
  for (NodeIndex k = 0; k < n; ++k) {
    if (g.strength(k) > 0.0) inv_d[k] = 1.0 / g.strength(k);
  }
  std::vector<std::size_t> size(n, 1);
  std::vector<std::set<Label>> adjacent(n);
  for (const auto& e : g.edges()) {
    adjacent[e.u].insert(e.v);
    adjacent[e.v].insert(e.u);
  }

  auto delta_sigma = [&](Label a, Label b) {
    double r2 = 0.0;
    const auto& pa = prob[a];
    const auto& pb = prob[b];
    for (std::size_t k = 0; k < n; ++k) {
      double diff = pa[k] - pb[k];
      r2 += diff * diff * inv_d[k];
    }
    double sa = static_cast<double>(size[a]);
    double sb = static_cast<double>(size[b]);
    return sa * sb / (sa + sb) * r2 / static_cast<double>(n);
  };

  using Candidate = std::tuple<double, Label, Label>;
  std::set<Candidate> queue;
  std::map<std::pair<Label, Label>, double> cost;
  auto push = [&](Label a, Label b) {
    if (a > b) std::swap(a, b);
    double ds = delta_sigma(a, b);
    cost[{a, b}] = ds;
    queue.insert({ds, a, b});
  };
  auto drop = [&](Label a, Label b) {
    if (a > b) std::swap(a, b);
    auto it = cost.find({a, b});
    if (it == cost.end()) return;
    queue.erase({it->second, a, b});
    cost.erase(it);
  };
  for (const auto& e : g.edges()) push(e.u, e.v);

  std::vector<Label> owner(n);
  for (std::size_t v = 0; v < n; ++v) owner[v] = static_cast<Label>(v);
  Dendrogram d;
  d.levels.push_back({Partition(owner), modularity(g, Partition(owner)), "start"});

  std::vector<Candidate> tied;
  while (!queue.empty()) {
    const double low = std::get<0>(*queue.begin());
    tied.clear();
    for (auto it = queue.begin(); it != queue.end(); ++it) {
      if (std::get<0>(*it) > low + 1e-12 * std::max(1e-300, low)) break;
      tied.push_back(*it);
    }
    auto [ds, a, b] = tied.size() == 1 ? tied.front() : tied[uniform_index(rng, tied.size())];
    (void)ds;

    // b merges into a.
    std::vector<Label> neighbors_of_new;
    for (auto c : adjacent[a]) {
      if (c != b) neighbors_of_new.push_back(c);
    }
    for (auto c : adjacent[b]) {
      if (c != a) neighbors_of_new.push_back(c);
    }
    for (auto c : adjacent[a]) drop(a, c);
    for (auto c : adjacent[b]) drop(b, c);
    for (auto c : adjacent[a]) adjacent[c].erase(a);
    for (auto c : adjacent[b]) adjacent[c].erase(b);
    adjacent[a].clear();
    adjacent[b].clear();

    const double sa = static_cast<double>(size[a]);
    const double sb = static_cast<double>(size[b]);
    for (std::size_t k = 0; k < n; ++k) prob[a][k] = (sa * prob[a][k] + sb * prob[b][k]) / (sa + sb);
    prob[b].clear();
    prob[b].shrink_to_fit();
    size[a] += size[b];
    size[b] = 0;

    for (auto c : neighbors_of_new) {
      adjacent[a].insert(c);
      adjacent[c].insert(a);
    }
    for (auto c : adjacent[a]) push(a, c);
    for (auto& o : owner) {
      if (o == b) o = a;
    }
    Partition p(owner);
    double q = modularity(g, p);
    d.levels.push_back({std::move(p), q, "merge " + std::to_string(a) + " " + std::to_string(b)});
  }
  return d;
}

inline DetectionResult walktrap(const Graph& g, int steps = kDefaultWalkLength, std::uint64_t seed = 0) {
  auto d = walktrap_dendrogram(g, steps, seed);
  DetectionResult r;
  r.algorithm = Algorithm::WT;
  r.seed = seed;
  const auto& best = d.levels[d.best_level()];
  r.partition = best.partition;
  r.objective = best.modularity;
  return r;
}

}  // namespace commeval
