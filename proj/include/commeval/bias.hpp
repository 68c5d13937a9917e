#pragma once

// Recurrence filtering of interaction streams, the raw-vs-filtered control
// experiment, and a rule table attributing disagreement to data, ground
// truth, method or metric bias.

#include <algorithm>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "commeval/consensus.hpp"
#include "commeval/detection/suite.hpp"
#include "commeval/error.hpp"
#include "commeval/graph.hpp"

namespace commeval {

inline constexpr const char* kFilterNote =
    "recurrence-count filter: keeps pairs that interact at least min_recurrence times; "
    "an approximation of recurrence/regularity based relationship classification";

struct FilterConfig {
  int min_recurrence = 2;
  bool drop_isolated = true;

  void validate() const {
    if (min_recurrence < 1) throw InvalidInput("min_recurrence must be at least 1");
  }

  bool operator==(const FilterConfig&) const = default;
};

struct FilterOutcome {
  Graph graph;
  std::size_t pairs_kept = 0;
  std::size_t pairs_dropped = 0;
  std::size_t nodes_dropped = 0;
  bool empty = false;  // every edge was removed
};

// Pair (u, v) survives iff it interacts at least k times; its weight is the
// interaction count. Node order follows first appearance in the stream.
inline FilterOutcome recurrence_filter(const TemporalStream& stream, const FilterConfig& cfg = {}) {
  cfg.validate();
  const Graph all = aggregate_temporal(stream);
  const auto k = static_cast<double>(cfg.min_recurrence);
  FilterOutcome out;
  std::vector<char> touched(all.node_count(), 0);
  for (const auto& e : all.edges()) {
    if (e.weight >= k) {
      ++out.pairs_kept;
      touched[e.u] = touched[e.v] = 1;
    } else {
      ++out.pairs_dropped;
    }
  }
  Graph::Builder b;
  for (NodeIndex v = 0; v < all.node_count(); ++v) {
    if (touched[v] || !cfg.drop_isolated) {
      b.add_node(all.name(v));
    } else {
      ++out.nodes_dropped;
    }
  }
  for (const auto& e : all.edges()) {
    if (e.weight >= k) b.add_edge(all.name(e.u), all.name(e.v), e.weight);
  }
  out.graph = std::move(b).build();
  out.empty = out.pairs_kept == 0;
  return out;
}

// ---------------------------------------------------------------------------
// Control experiment

struct AlgorithmControl {
  Algorithm algorithm = Algorithm::LM;
  FunctionalScores raw;       // mean over replications, vs ground truth
  FunctionalScores filtered;  // vs ground truth restricted to the filtered nodes
  FunctionalScores delta;     // filtered - raw
  double delta_modularity = 0.0;
  double delta_conductance = 0.0;
  double delta_density = 0.0;
  double delta_community_count = 0.0;

  bool operator==(const AlgorithmControl&) const = default;
};

struct TruthRestriction {
  std::size_t nodes_before = 0;
  std::size_t nodes_after = 0;
  std::size_t communities_before = 0;
  std::size_t communities_after = 0;

  bool operator==(const TruthRestriction&) const = default;
};

struct ControlRecord {
  std::vector<AlgorithmControl> algorithms;
  TruthRestriction restriction;
  std::size_t raw_edges = 0;
  std::size_t filtered_edges = 0;
  double mean_raw_nmi = 0.0;
  double mean_filtered_nmi = 0.0;
  double improvement = 0.0;
  double improvement_threshold = 0.1;
  bool convergence_improved = false;

  bool operator==(const ControlRecord&) const = default;
};

namespace detail {

struct AlgorithmMeans {
  FunctionalScores scores;
  double modularity = 0.0;
  double conductance = 0.0;
  double density = 0.0;
  double community_count = 0.0;
};

inline std::map<Algorithm, AlgorithmMeans> means_by_algorithm(const Graph& g,
                                                              const std::vector<DetectionResult>& runs,
                                                              const Partition& truth) {
  std::map<Algorithm, AlgorithmMeans> acc;
  std::map<Algorithm, std::size_t> counts;
  for (const auto& rec : collect_evidence(g, runs, &truth)) {
    auto& m = acc[rec.algorithm];
    for (auto f : kAllFunctionalMetrics) m.scores[f] += (*rec.versus_truth)[f];
    m.modularity += rec.structural.modularity;
    m.conductance += rec.structural.conductance_mean;
    m.density += rec.structural.density_mean;
    m.community_count += static_cast<double>(rec.structural.stats.community_count);
    ++counts[rec.algorithm];
  }
  for (auto& [a, m] : acc) {
    const auto c = static_cast<double>(counts[a]);
    for (auto f : kAllFunctionalMetrics) m.scores[f] /= c;
    m.modularity /= c;
    m.conductance /= c;
    m.density /= c;
    m.community_count /= c;
  }
  return acc;
}

}  // namespace detail

// Runs the suite on both graphs and compares them against the ground truth.
// The filtered side is scored against the truth restricted (by node name) to
// the filtered node set. Precomputed raw runs may be passed in.
inline ControlRecord bias_control_experiment(const Graph& raw, const Graph& filtered, const Partition& truth,
                                             const DetectionConfig& cfg, double improvement_threshold = 0.1,
                                             const std::vector<DetectionResult>* raw_runs = nullptr) {
  if (truth.size() != raw.node_count()) throw InvalidInput("ground truth does not cover the raw graph");
  if (filtered.edge_count() == 0) throw InvalidInput("filtered graph has no edges");
  for (NodeIndex v = 0; v < filtered.node_count(); ++v) {
    if (!raw.find(filtered.name(v))) {
      throw InvalidInput("filtered node '" + filtered.name(v) + "' is not in the raw graph");
    }
  }
  const Partition restricted = transfer_partition(raw, truth, filtered);

  std::vector<DetectionResult> own_raw;
  if (!raw_runs) {
    own_raw = run_suite(raw, cfg);
    raw_runs = &own_raw;
  }
  const auto filtered_runs = run_suite(filtered, cfg);
  const auto before = detail::means_by_algorithm(raw, *raw_runs, truth);
  const auto after = detail::means_by_algorithm(filtered, filtered_runs, restricted);

  ControlRecord rec;
  rec.restriction = {truth.size(), restricted.size(), truth.community_count(), restricted.community_count()};
  rec.raw_edges = raw.edge_count();
  rec.filtered_edges = filtered.edge_count();
  rec.improvement_threshold = improvement_threshold;
  for (const auto& [a, b] : before) {
    const auto& f = after.at(a);
    AlgorithmControl c;
    c.algorithm = a;
    c.raw = b.scores;
    c.filtered = f.scores;
    for (auto m : kAllFunctionalMetrics) c.delta[m] = f.scores[m] - b.scores[m];
    c.delta_modularity = f.modularity - b.modularity;
    c.delta_conductance = f.conductance - b.conductance;
    c.delta_density = f.density - b.density;
    c.delta_community_count = f.community_count - b.community_count;
    rec.mean_raw_nmi += b.scores[FunctionalMetric::NMI];
    rec.mean_filtered_nmi += f.scores[FunctionalMetric::NMI];
    rec.algorithms.push_back(c);
  }
  const auto k = static_cast<double>(rec.algorithms.size());
  rec.mean_raw_nmi /= k;
  rec.mean_filtered_nmi /= k;
  rec.improvement = rec.mean_filtered_nmi - rec.mean_raw_nmi;
  rec.convergence_improved = rec.improvement >= improvement_threshold;
  return rec;
}

// ---------------------------------------------------------------------------
// Diagnosis

struct BiasThresholds {
  double consensus = 0.7;    // mean pairwise inter-algorithm NMI
  double functional = 0.5;   // mean NMI to ground truth
  double improvement = 0.1;  // mean NMI gain from filtering

  bool operator==(const BiasThresholds&) const = default;
};

enum class BiasStatus { Absent, Suspected, Confirmed };

inline std::string to_string(BiasStatus s) {
  switch (s) {
    case BiasStatus::Absent: return "absent";
    case BiasStatus::Suspected: return "suspected";
    case BiasStatus::Confirmed: return "confirmed";
  }
  return "absent";
}

struct BiasFinding {
  BiasStatus status = BiasStatus::Absent;
  std::map<std::string, double> evidence;

  bool operator==(const BiasFinding&) const = default;
};

struct MetricBiasNote {
  std::string metric;
  Algorithm winner = Algorithm::LM;
  Algorithm majority = Algorithm::LM;

  bool operator==(const MetricBiasNote&) const = default;
};

struct BiasReport {
  BiasFinding data;
  BiasFinding ground_truth;
  BiasFinding method;  // Suspected means method bias dominates
  std::vector<MetricBiasNote> metric_notes;
  std::vector<std::string> rules_fired;
  BiasThresholds thresholds;
  std::string filter_note = kFilterNote;

  bool operator==(const BiasReport&) const = default;
};

// R1  consensus high and truth agreement low: data or ground-truth bias.
// R2  a control run whose filtering lifts truth agreement confirms data bias;
//     R1 without such a lift points at the ground truth.
// R3  consensus low: method bias dominates.
// R4  a metric whose winner differs from the most common winner.
inline BiasReport diagnose(const ConsensusReport& consensus, const ControlRecord* control,
                           const BiasThresholds& t = {}) {
  BiasReport rep;
  rep.thresholds = t;
  const double pairwise = consensus.mean_pairwise_nmi;

  rep.method.evidence = {{"mean_pairwise_nmi", pairwise},
                         {"pairwise_nmi_dispersion", consensus.pairwise_nmi_dispersion}};
  rep.data.evidence["mean_pairwise_nmi"] = pairwise;
  rep.ground_truth.evidence["mean_pairwise_nmi"] = pairwise;
  if (consensus.mean_truth_nmi) {
    rep.data.evidence["mean_truth_nmi"] = *consensus.mean_truth_nmi;
    rep.ground_truth.evidence["mean_truth_nmi"] = *consensus.mean_truth_nmi;
  }

  const bool r1 = consensus.mean_truth_nmi && pairwise >= t.consensus && *consensus.mean_truth_nmi <= t.functional;
  if (r1) rep.rules_fired.push_back("R1");

  if (control) {
    rep.data.evidence["mean_raw_nmi"] = control->mean_raw_nmi;
    rep.data.evidence["mean_filtered_nmi"] = control->mean_filtered_nmi;
    rep.data.evidence["improvement"] = control->improvement;
    if (control->convergence_improved) {
      rep.rules_fired.push_back("R2");
      rep.data.status = BiasStatus::Confirmed;
    } else if (r1) {
      rep.rules_fired.push_back("R2");
      rep.ground_truth.status = BiasStatus::Suspected;
    }
  } else if (r1) {
    rep.data.status = BiasStatus::Suspected;
    rep.ground_truth.status = BiasStatus::Suspected;
  }

  if (pairwise < t.consensus) {
    rep.rules_fired.push_back("R3");
    rep.method.status = BiasStatus::Suspected;
  }

  std::map<Algorithm, std::size_t> votes;
  for (const auto& [metric, a] : consensus.winners) ++votes[a];
  if (!votes.empty()) {
    Algorithm majority = votes.begin()->first;
    std::size_t best = 0;
    for (const auto& [a, n] : votes) {
      if (n > best || (n == best && to_string(a) < to_string(majority))) {
        majority = a;
        best = n;
      }
    }
    for (const auto& [metric, a] : consensus.winners) {
      if (a != majority) rep.metric_notes.push_back({metric, a, majority});
    }
    if (!rep.metric_notes.empty()) rep.rules_fired.push_back("R4");
  }
  return rep;
}

}  // namespace commeval
