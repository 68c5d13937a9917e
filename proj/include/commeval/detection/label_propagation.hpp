#pragma once

// Asynchronous label propagation (Raghavan et al.) with a seeded visit order
// and seeded tie-breaking.

#include <cstdint>
#include <vector>

#include "commeval/detection/types.hpp"
#include "commeval/random.hpp"

namespace commeval {

inline constexpr int kLabelPropagationSweepCap = 1000;

inline DetectionResult label_propagation(const Graph& g, std::uint64_t seed,
                                         int max_sweeps = kLabelPropagationSweepCap) {
  detail::require_edges(g, Algorithm::LP);
  const std::size_t n = g.node_count();
  Rng rng(seed);
  std::vector<Label> label(n);
  for (std::size_t v = 0; v < n; ++v) label[v] = static_cast<Label>(v);

  std::vector<double> score(n, 0.0);
  std::vector<Label> touched;
  std::vector<Label> best;

  // Fills `best` with the labels of maximal neighbor weight around v.
  auto majority = [&](NodeIndex v) {
    touched.clear();
    for (const auto& nb : g.neighbors(v)) {
      Label l = label[nb.node];
      if (score[l] == 0.0) touched.push_back(l);
      score[l] += nb.weight;
    }
    double top = 0.0;
    for (auto l : touched) top = std::max(top, score[l]);
    best.clear();
    for (auto l : touched) {
      if (score[l] >= top - 1e-12 * top) best.push_back(l);
    }
    for (auto l : touched) score[l] = 0.0;
    std::sort(best.begin(), best.end());
  };

  auto order = random_permutation(n, rng);
  for (int sweep = 0; sweep < max_sweeps; ++sweep) {
    shuffle(order, rng);
    for (auto v : order) {
      if (g.degree(v) == 0) continue;
      majority(v);
      // A node already holding a majority label keeps it.
      if (std::binary_search(best.begin(), best.end(), label[v])) continue;
      label[v] = best[uniform_index(rng, best.size())];
    }
    bool stable = true;
    for (NodeIndex v = 0; v < n && stable; ++v) {
      if (g.degree(v) == 0) continue;
      majority(v);
      stable = std::binary_search(best.begin(), best.end(), label[v]);
    }
    if (stable) {
      DetectionResult r;
      r.algorithm = Algorithm::LP;
      r.seed = seed;
      r.partition = Partition(label);
      return r;
    }
  }
  throw DetectionError("LP", "no convergence within " + std::to_string(max_sweeps) + " sweeps");
}

}  // namespace commeval
