#pragma once

// Connectivity-based quality of a partition: modularity, conductance,
// internal density and community size statistics.

#include <algorithm>
#include <cstddef>
#include <limits>
#include <vector>

#include "commeval/error.hpp"
#include "commeval/graph.hpp"

namespace commeval {

namespace detail {

inline void require_cover(const Graph& g, const Partition& p) {
  if (p.size() != g.node_count()) {
    throw InvalidInput("partition covers " + std::to_string(p.size()) + " nodes, graph has " +
                       std::to_string(g.node_count()));
  }
}

}  // namespace detail

// Q = sum_c [ W_c / m - (S_c / 2m)^2 ], W_c intra-community weight, S_c
// community strength, m total edge weight.
inline double modularity(const Graph& g, const Partition& p) {
  detail::require_cover(g, p);
  const double m = g.total_weight();
  if (!(m > 0.0)) throw InvalidInput("modularity is undefined for a graph without edges");
  std::vector<double> internal(p.community_count(), 0.0);
  std::vector<double> strength(p.community_count(), 0.0);
  for (const auto& e : g.edges()) {
    if (p[e.u] == p[e.v]) internal[p[e.u]] += e.weight;
  }
  for (NodeIndex v = 0; v < g.node_count(); ++v) strength[p[v]] += g.strength(v);
  double q = 0.0;
  for (std::size_t c = 0; c < internal.size(); ++c) {
    double a = strength[c] / (2.0 * m);
    q += internal[c] / m - a * a;
  }
  return q;
}

struct ConductanceProfile {
  std::vector<double> per_community;
  double mean = 0.0;
  double min = 0.0;
  double max = 0.0;
};

// phi(S) = cut(S) / min(vol(S), 2m - vol(S)); 0 when the denominator is 0.
inline ConductanceProfile conductance_profile(const Graph& g, const Partition& p) {
  detail::require_cover(g, p);
  const std::size_t k = p.community_count();
  std::vector<double> cut(k, 0.0);
  std::vector<double> volume(k, 0.0);
  for (const auto& e : g.edges()) {
    if (p[e.u] != p[e.v]) {
      cut[p[e.u]] += e.weight;
      cut[p[e.v]] += e.weight;
    }
  }
  for (NodeIndex v = 0; v < g.node_count(); ++v) volume[p[v]] += g.strength(v);
  const double total = 2.0 * g.total_weight();

  ConductanceProfile out;
  out.per_community.resize(k);
  for (std::size_t c = 0; c < k; ++c) {
    double denom = std::min(volume[c], total - volume[c]);
    out.per_community[c] = denom > 0.0 ? std::clamp(cut[c] / denom, 0.0, 1.0) : 0.0;
  }
  if (k > 0) {
    double sum = 0.0;
    for (double x : out.per_community) sum += x;
    out.mean = sum / static_cast<double>(k);
    auto [lo, hi] = std::minmax_element(out.per_community.begin(), out.per_community.end());
    out.min = *lo;
    out.max = *hi;
  }
  return out;
}

struct DensityProfile {
  std::vector<double> per_community;
  std::vector<bool> singleton;  // density defaulted to 1
  double mean = 0.0;
  std::size_t singleton_count = 0;
};

// Unweighted: 2 * (intra edge count) / (n_c (n_c - 1)). Singletons get 1.
inline DensityProfile internal_density(const Graph& g, const Partition& p) {
  detail::require_cover(g, p);
  const std::size_t k = p.community_count();
  std::vector<double> intra(k, 0.0);
  for (const auto& e : g.edges()) {
    if (p[e.u] == p[e.v]) intra[p[e.u]] += 1.0;
  }
  auto sizes = p.community_sizes();
  DensityProfile out;
  out.per_community.resize(k);
  out.singleton.resize(k, false);
  double sum = 0.0;
  for (std::size_t c = 0; c < k; ++c) {
    auto n = static_cast<double>(sizes[c]);
    if (sizes[c] < 2) {
      out.per_community[c] = 1.0;
      out.singleton[c] = true;
      ++out.singleton_count;
    } else {
      out.per_community[c] = 2.0 * intra[c] / (n * (n - 1.0));
    }
    sum += out.per_community[c];
  }
  if (k > 0) out.mean = sum / static_cast<double>(k);
  return out;
}

struct PartitionStats {
  std::size_t community_count = 0;
  std::size_t min_size = 0;
  std::size_t max_size = 0;
  double mean_size = 0.0;
  double size_variance = 0.0;  // population variance
  std::size_t multicomponent_count = 0;

  bool operator==(const PartitionStats&) const = default;
};

// Number of communities whose induced subgraph is disconnected.
inline std::size_t multicomponent_community_count(const Graph& g, const Partition& p) {
  detail::require_cover(g, p);
  constexpr Label kUnset = static_cast<Label>(-1);
  std::vector<Label> seen(g.node_count(), kUnset);
  std::vector<std::size_t> pieces(p.community_count(), 0);
  std::vector<NodeIndex> stack;
  for (NodeIndex s = 0; s < g.node_count(); ++s) {
    if (seen[s] != kUnset) continue;
    const Label c = p[s];
    ++pieces[c];
    seen[s] = c;
    stack.push_back(s);
    while (!stack.empty()) {
      NodeIndex v = stack.back();
      stack.pop_back();
      for (const auto& nb : g.neighbors(v)) {
        if (p[nb.node] == c && seen[nb.node] == kUnset) {
          seen[nb.node] = c;
          stack.push_back(nb.node);
        }
      }
    }
  }
  return static_cast<std::size_t>(
      std::count_if(pieces.begin(), pieces.end(), [](std::size_t n) { return n > 1; }));
}

inline PartitionStats partition_stats(const Graph& g, const Partition& p) {
  detail::require_cover(g, p);
  PartitionStats s;
  auto sizes = p.community_sizes();
  s.community_count = sizes.size();
  if (!sizes.empty()) {
    auto [lo, hi] = std::minmax_element(sizes.begin(), sizes.end());
    s.min_size = *lo;
    s.max_size = *hi;
    const auto k = static_cast<double>(sizes.size());
    double sum = 0.0;
    for (auto n : sizes) sum += static_cast<double>(n);
    s.mean_size = sum / k;
    double acc = 0.0;
    for (auto n : sizes) acc += (static_cast<double>(n) - s.mean_size) * (static_cast<double>(n) - s.mean_size);
    s.size_variance = acc / k;
  }
  s.multicomponent_count = multicomponent_community_count(g, p);
  return s;
}

struct StructuralEvidence {
  double modularity = 0.0;
  double conductance_mean = 0.0;
  double conductance_min = 0.0;
  double conductance_max = 0.0;
  double density_mean = 0.0;
  std::size_t singleton_count = 0;
  PartitionStats stats;

  bool operator==(const StructuralEvidence&) const = default;
};

inline StructuralEvidence structural_evidence(const Graph& g, const Partition& p) {
  StructuralEvidence ev;
  ev.modularity = modularity(g, p);
  auto phi = conductance_profile(g, p);
  ev.conductance_mean = phi.mean;
  ev.conductance_min = phi.min;
  ev.conductance_max = phi.max;
  auto dens = internal_density(g, p);
  ev.density_mean = dens.mean;
  ev.singleton_count = dens.singleton_count;
  ev.stats = partition_stats(g, p);
  return ev;
}

}  // namespace commeval
