#pragma once

// Two-level map equation for undirected graphs and its minimization by
// seeded local moves with module aggregation.
//
// With node visit rates p_a = s_a / 2m and module exit rates q_i = cut_i / 2m:
//   L(M) = plogp(sum q_i) - 2 sum plogp(q_i) - sum_a plogp(p_a)
//          + sum plogp(q_i + p_i)
// where plogp(x) = x log2 x and p_i is the total visit rate of module i.

#include <cmath>
#include <cstdint>
#include <vector>

#include "commeval/detection/types.hpp"
#include "commeval/detection/work_graph.hpp"
#include "commeval/random.hpp"

namespace commeval {

namespace detail {

inline double plogp(double x) { return x > 0.0 ? x * std::log2(x) : 0.0; }

// Module bookkeeping over a WorkGraph whose flows are normalized by `m2`
// (twice the edge weight of the graph being encoded).
class MapEquationState {
 public:
  MapEquationState(const WorkGraph& w, std::vector<Label> module, double m2, double node_term)
      : w_(w), module_(std::move(module)), m2_(m2), node_term_(node_term) {
    const std::size_t k = w.size();
    exit_.assign(k, 0.0);
    flow_.assign(k, 0.0);
    for (std::size_t v = 0; v < w.size(); ++v) {
      flow_[module_[v]] += w.strength[v] / m2_;
      for (const auto& nb : w.adjacency[v]) {
        if (module_[nb.node] != module_[v]) exit_[module_[v]] += nb.weight / m2_;
      }
    }
    for (std::size_t i = 0; i < k; ++i) {
      total_exit_ += exit_[i];
      sum_exit_ += plogp(exit_[i]);
      sum_exit_flow_ += plogp(exit_[i] + flow_[i]);
    }
  }

  double codelength() const {
    return plogp(total_exit_) - 2.0 * sum_exit_ - node_term_ + sum_exit_flow_;
  }

  // Codelength change if node v (with link weights to_old / to_new into its
  // current module and `target`) moved to `target`.
  double delta(NodeIndex v, Label target, double to_old, double to_new) const {
    const Label from = module_[v];
    const double out = external(v) / m2_;
    const double p = w_.strength[v] / m2_;
    const double exit_from = exit_[from] - out + 2.0 * to_old / m2_;
    const double exit_to = exit_[target] + out - 2.0 * to_new / m2_;
    const double flow_from = flow_[from] - p;
    const double flow_to = flow_[target] + p;

    double total = total_exit_ - exit_[from] - exit_[target] + exit_from + exit_to;
    double se = sum_exit_ - plogp(exit_[from]) - plogp(exit_[target]) + plogp(exit_from) + plogp(exit_to);
    double sef = sum_exit_flow_ - plogp(exit_[from] + flow_[from]) - plogp(exit_[target] + flow_[target]) +
                 plogp(exit_from + flow_from) + plogp(exit_to + flow_to);
    double after = plogp(total) - 2.0 * se - node_term_ + sef;
    return after - codelength();
  }

  void move(NodeIndex v, Label target, double to_old, double to_new) {
    const Label from = module_[v];
    const double out = external(v) / m2_;
    const double p = w_.strength[v] / m2_;
    remove_terms(from);
    remove_terms(target);
    exit_[from] += -out + 2.0 * to_old / m2_;
    exit_[target] += out - 2.0 * to_new / m2_;
    flow_[from] -= p;
    flow_[target] += p;
    // Clean up rounding residue on emptied modules.
    if (flow_[from] <= 1e-15) {
      flow_[from] = 0.0;
      exit_[from] = 0.0;
    }
    exit_[from] = std::max(0.0, exit_[from]);
    exit_[target] = std::max(0.0, exit_[target]);
    add_terms(from);
    add_terms(target);
    module_[v] = target;
  }

  const std::vector<Label>& modules() const { return module_; }

 private:
  double external(NodeIndex v) const { return w_.strength[v] - 2.0 * w_.self[v]; }

  void remove_terms(Label i) {
    total_exit_ -= exit_[i];
    sum_exit_ -= plogp(exit_[i]);
    sum_exit_flow_ -= plogp(exit_[i] + flow_[i]);
  }
  void add_terms(Label i) {
    total_exit_ += exit_[i];
    sum_exit_ += plogp(exit_[i]);
    sum_exit_flow_ += plogp(exit_[i] + flow_[i]);
  }

  const WorkGraph& w_;
  std::vector<Label> module_;
  double m2_;
  double node_term_;
  std::vector<double> exit_;
  std::vector<double> flow_;
  double total_exit_ = 0.0;
  double sum_exit_ = 0.0;
  double sum_exit_flow_ = 0.0;
};

// Local moves on one connected component; returns the module of each node
// of `w`.
inline std::vector<Label> minimize_map_equation(WorkGraph w, Rng& rng) {
  const double m2 = 2.0 * w.total;
  double node_term = 0.0;
  for (double s : w.strength) node_term += plogp(s / m2);

  std::vector<Label> membership(w.size());
  for (std::size_t v = 0; v < membership.size(); ++v) membership[v] = static_cast<Label>(v);

  std::vector<double> link(w.size(), 0.0);
  std::vector<Label> touched;
  while (true) {
    std::vector<Label> start(w.size());
    for (std::size_t v = 0; v < start.size(); ++v) start[v] = static_cast<Label>(v);
    MapEquationState state(w, start, m2, node_term);
    auto order = random_permutation(w.size(), rng);
    bool moved_any = false;
    bool improved = true;
    int passes = 0;
    while (improved && passes++ < 1000) {
      improved = false;
      for (auto v : order) {
        const Label own = state.modules()[v];
        touched.clear();
        for (const auto& nb : w.adjacency[v]) {
          Label c = state.modules()[nb.node];
          if (link[c] == 0.0) touched.push_back(c);
          link[c] += nb.weight;
        }
        Label best = own;
        double best_delta = -1e-12;
        for (auto c : touched) {
          if (c == own) continue;
          double dl = state.delta(v, c, link[own], link[c]);
          if (dl < best_delta) {
            best_delta = dl;
            best = c;
          }
        }
        if (best != own) {
          state.move(v, best, link[own], link[best]);
          improved = true;
          moved_any = true;
        }
        for (auto c : touched) link[c] = 0.0;
        link[own] = 0.0;
      }
    }
    std::vector<Label> comm = state.modules();
    std::size_t k = compact_labels(comm);
    for (auto& m : membership) m = comm[m];
    if (!moved_any || k == w.size()) break;
    w = w.aggregate(comm, k);
  }

  return membership;
}

}  // namespace detail

// Codelength in bits of `p` on g. Isolated nodes carry no flow.
inline double map_equation(const Graph& g, const Partition& p) {
  if (p.size() != g.node_count()) throw InvalidInput("partition does not cover the graph");
  const double m2 = 2.0 * g.total_weight();
  if (!(m2 > 0.0)) throw InvalidInput("map equation is undefined for a graph without edges");
  std::vector<double> exit(p.community_count(), 0.0);
  std::vector<double> flow(p.community_count(), 0.0);
  double node_term = 0.0;
  for (NodeIndex v = 0; v < g.node_count(); ++v) {
    double pv = g.strength(v) / m2;
    flow[p[v]] += pv;
    node_term += detail::plogp(pv);
  }
  for (const auto& e : g.edges()) {
    if (p[e.u] != p[e.v]) {
      exit[p[e.u]] += e.weight / m2;
      exit[p[e.v]] += e.weight / m2;
    }
  }
  double total = 0.0, se = 0.0, sef = 0.0;
  for (std::size_t i = 0; i < exit.size(); ++i) {
    total += exit[i];
    se += detail::plogp(exit[i]);
    sef += detail::plogp(exit[i] + flow[i]);
  }
  return detail::plogp(total) - 2.0 * se - node_term + sef;
}

// Components are optimized independently and their modules merged; the
// reported objective is the codelength of the merged partition on g.
inline DetectionResult infomap(const Graph& g, std::uint64_t seed) {
  detail::require_edges(g, Algorithm::IM);
  Rng rng(seed);
  const auto base = detail::WorkGraph::from(g);
  auto components = connected_components(g).communities();

  std::vector<Label> labels(g.node_count(), 0);
  Label next = 0;
  for (const auto& nodes : components) {
    if (nodes.size() == 1 || base.strength[nodes[0]] == 0.0) {
      for (auto v : nodes) labels[v] = next;
      ++next;
      continue;
    }
    auto sub = base.induced(nodes);
    auto local = detail::minimize_map_equation(sub, rng);
    std::size_t k = detail::compact_labels(local);

    // Keep the one-module code for this component when it is not longer.
    const double m2 = 2.0 * sub.total;
    double node_term = 0.0;
    for (double s : sub.strength) node_term += detail::plogp(s / m2);
    detail::MapEquationState found(sub, local, m2, node_term);
    detail::MapEquationState single(sub, std::vector<Label>(sub.size(), 0), m2, node_term);
    if (single.codelength() <= found.codelength() + 1e-12) {
      std::fill(local.begin(), local.end(), 0);
      k = 1;
    }
    for (std::size_t i = 0; i < nodes.size(); ++i) labels[nodes[i]] = next + local[i];
    next += static_cast<Label>(k);
  }

  DetectionResult r;
  r.algorithm = Algorithm::IM;
  r.seed = seed;
  r.partition = Partition(labels);
  r.objective = map_equation(g, r.partition);
  return r;
}

}  // namespace commeval
