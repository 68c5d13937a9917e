#pragma once

// Multilevel modularity optimization by local node moves and community
// aggregation (Blondel et al.).

#include <cstdint>
#include <unordered_map>
#include <vector>

#include "commeval/detection/types.hpp"
#include "commeval/detection/work_graph.hpp"
#include "commeval/random.hpp"
#include "commeval/structural.hpp"

namespace commeval {

// Node visit order for LM when the caller does not pick one.
inline constexpr std::uint64_t kDefaultLouvainSeed = 0;

namespace detail {

// One local-moving phase. Returns true if any node changed community.
inline bool louvain_local_moves(const WorkGraph& w, std::vector<Label>& comm, Rng& rng) {
  const std::size_t n = w.size();
  const double m2 = 2.0 * w.total;
  std::vector<double> tot(n, 0.0);
  for (std::size_t v = 0; v < n; ++v) tot[comm[v]] += w.strength[v];

  auto order = random_permutation(n, rng);
  std::vector<double> link(n, 0.0);
  std::vector<Label> touched;
  bool moved_any = false;
  bool improved = true;
  while (improved) {
    improved = false;
    for (auto v : order) {
      const Label own = comm[v];
      const double k = w.strength[v];
      touched.clear();
      for (const auto& nb : w.adjacency[v]) {
        const Label c = comm[nb.node];
        if (link[c] == 0.0) touched.push_back(c);
        link[c] += nb.weight;
      }
      tot[own] -= k;
      // Gain of inserting v into c, up to a positive factor: k_{v,c} - tot_c k_v / 2m.
      Label best = own;
      double best_gain = link[own] - tot[own] * k / m2;
      for (auto c : touched) {
        double gain = link[c] - tot[c] * k / m2;
        if (gain > best_gain + 1e-12) {
          best_gain = gain;
          best = c;
        }
      }
      tot[best] += k;
      for (auto c : touched) link[c] = 0.0;
      link[own] = 0.0;
      if (best != own) {
        comm[v] = best;
        improved = true;
        moved_any = true;
      }
    }
  }
  return moved_any;
}

}  // namespace detail

// `phase_modularity`, when given, receives the modularity of the induced
// partition of the input graph after every local-moving phase.
inline DetectionResult louvain(const Graph& g, std::uint64_t seed = kDefaultLouvainSeed,
                               std::vector<double>* phase_modularity = nullptr) {
  detail::require_edges(g, Algorithm::LM);
  Rng rng(seed);
  auto w = detail::WorkGraph::from(g);
  std::vector<Label> membership(g.node_count());
  for (std::size_t v = 0; v < membership.size(); ++v) membership[v] = static_cast<Label>(v);

  while (true) {
    std::vector<Label> comm(w.size());
    for (std::size_t v = 0; v < comm.size(); ++v) comm[v] = static_cast<Label>(v);
    bool moved = detail::louvain_local_moves(w, comm, rng);
    std::size_t k = detail::compact_labels(comm);
    for (auto& m : membership) m = comm[m];
    if (phase_modularity) phase_modularity->push_back(modularity(g, Partition(membership)));
    if (!moved || k == w.size()) break;
    w = w.aggregate(comm, k);
  }

  DetectionResult r;
  r.algorithm = Algorithm::LM;
  r.seed = seed;
  r.partition = Partition(membership);
  r.objective = modularity(g, r.partition);
  return r;
}

}  // namespace commeval
