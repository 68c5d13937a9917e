#pragma once

// Planted-partition benchmark graphs with known communities, and sporadic
// cross-community noise that a recurrence filter can remove again.

#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "commeval/error.hpp"
#include "commeval/graph.hpp"
#include "commeval/random.hpp"

namespace commeval {

struct PlantedConfig {
  std::vector<std::size_t> sizes{32, 32, 32, 32};
  double p_in = 0.3;
  double p_out = 0.01;
  int w_in = 2;  // weight of every generated edge
  std::uint64_t seed = 1;

  void validate() const {
    std::size_t n = 0;
    for (auto s : sizes) {
      if (s == 0) throw InvalidInput("community sizes must be positive");
      n += s;
    }
    if (n < 2) throw InvalidInput("planted partition needs at least 2 nodes");
    if (p_in < 0.0 || p_in > 1.0 || p_out < 0.0 || p_out > 1.0) {
      throw InvalidInput("edge probabilities must lie in [0, 1]");
    }
    if (w_in < 1) throw InvalidInput("w_in must be at least 1");
  }

  // p_in <= p_out is legal but yields no community structure.
  bool has_structure() const { return p_in > p_out; }
};

struct LabeledGraph {
  Graph graph;
  Partition truth;
};

// Nodes are named "0".."n-1" block by block. Pairs are visited in (i, j)
// order with one uniform draw each.
inline LabeledGraph planted_partition(const PlantedConfig& cfg) {
  cfg.validate();
  std::vector<Label> block;
  for (std::size_t c = 0; c < cfg.sizes.size(); ++c) {
    for (std::size_t k = 0; k < cfg.sizes[c]; ++k) block.push_back(static_cast<Label>(c));
  }
  const std::size_t n = block.size();
  Graph::Builder b;
  for (std::size_t v = 0; v < n; ++v) b.add_node(std::to_string(v));
  Rng rng(cfg.seed);
  for (NodeIndex i = 0; i < n; ++i) {
    for (NodeIndex j = i + 1; j < n; ++j) {
      const double p = block[i] == block[j] ? cfg.p_in : cfg.p_out;
      if (uniform_unit(rng) < p) b.add_edge(i, j, static_cast<double>(cfg.w_in));
    }
  }
  return {std::move(b).build(), Partition(block)};
}

struct NoisyGraph {
  Graph graph;            // original edges plus noise edges of weight 1
  TemporalStream stream;  // genuine edges repeated weight-many times, noise once
  std::size_t added = 0;
};

// Adds ceil(rate * |E|) weight-1 edges between distinct communities on pairs
// that are not yet adjacent, sampled uniformly without replacement. Genuine
// edges must carry integer weights; with weights >= 2 a recurrence filter
// with k = 2 recovers the original graph exactly.
inline NoisyGraph inject_sporadic_noise(const Graph& g, const Partition& truth, double rate,
                                        std::uint64_t seed) {
  if (truth.size() != g.node_count()) throw InvalidInput("ground truth does not cover the graph");
  if (truth.community_count() < 2) throw InvalidInput("noise injection needs at least 2 communities");
  if (!(rate >= 0.0)) throw InvalidInput("noise rate must be non-negative");
  const auto need = static_cast<std::size_t>(std::ceil(rate * static_cast<double>(g.edge_count())));

  std::vector<std::pair<NodeIndex, NodeIndex>> candidates;
  const std::size_t n = g.node_count();
  for (NodeIndex i = 0; i < n; ++i) {
    for (NodeIndex j = i + 1; j < n; ++j) {
      if (truth[i] != truth[j] && g.weight(i, j) == 0.0) candidates.emplace_back(i, j);
    }
  }
  if (candidates.size() < need) {
    throw InvalidInput("only " + std::to_string(candidates.size()) +
                       " cross-community pairs available, " + std::to_string(need) + " needed");
  }
  Rng rng(seed);
  for (std::size_t k = 0; k < need; ++k) {
    std::size_t pick = k + uniform_index(rng, candidates.size() - k);
    std::swap(candidates[k], candidates[pick]);
  }
  candidates.resize(need);

  Graph::Builder b;
  for (NodeIndex v = 0; v < n; ++v) b.add_node(g.name(v));
  std::vector<Interaction> events;
  std::int64_t max_weight = 1;
  for (const auto& e : g.edges()) {
    double rounded = std::round(e.weight);
    if (rounded != e.weight) throw InvalidInput("edge weights must be integers for noise injection");
    max_weight = std::max(max_weight, static_cast<std::int64_t>(rounded));
  }
  const auto period = static_cast<std::int64_t>(g.edge_count() + need);
  auto edges = g.edges();
  for (std::size_t i = 0; i < edges.size(); ++i) {
    b.add_edge(edges[i].u, edges[i].v, edges[i].weight);
    for (std::int64_t k = 0; k < static_cast<std::int64_t>(edges[i].weight); ++k) {
      events.push_back({g.name(edges[i].u), g.name(edges[i].v), k * period + static_cast<std::int64_t>(i)});
    }
  }
  const auto horizon = static_cast<std::uint64_t>(max_weight * period);
  for (const auto& [u, v] : candidates) {
    b.add_edge(u, v, 1.0);
    events.push_back({g.name(u), g.name(v), static_cast<std::int64_t>(uniform_index(rng, horizon))});
  }
  return {std::move(b).build(), TemporalStream(std::move(events)), need};
}

}  // namespace commeval
