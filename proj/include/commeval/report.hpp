#pragma once

// Report bundle and its JSON form. Objects serialize with sorted keys, so a
// bundle always dumps to the same bytes.

#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "commeval/bias.hpp"
#include "commeval/consensus.hpp"
#include "commeval/graph.hpp"
#include "commeval/structural.hpp"

namespace nlohmann {

template <typename T>
struct adl_serializer<std::optional<T>> {
  static void to_json(json& j, const std::optional<T>& v) {
    if (v) {
      j = *v;
    } else {
      j = nullptr;
    }
  }
  static void from_json(const json& j, std::optional<T>& v) {
    if (j.is_null()) {
      v.reset();
    } else {
      v = j.get<T>();
    }
  }
};

}  // namespace nlohmann

namespace commeval {

using Json = nlohmann::json;

inline constexpr int kSchemaVersion = 1;

struct PipelineThresholds {
  double consensus = 0.7;
  double functional = 0.5;
  double improvement = 0.1;
  double divergence = 0.0;

  bool operator==(const PipelineThresholds&) const = default;
};

struct ReportMetadata {
  int schema_version = kSchemaVersion;
  std::string command;
  std::string input_kind;  // "graph" or "temporal"
  std::vector<Algorithm> algorithms;
  std::vector<FunctionalMetric> metrics;
  int replications = 0;
  std::uint64_t base_seed = 0;
  std::uint64_t louvain_seed = 0;
  int walk_length = 0;
  bool binarized = false;
  PipelineThresholds thresholds;
  std::string nmi_variant = "arithmetic: 2I/(H1+H2)";
  std::string entropy_unit = "nats";
  std::string quantile_method = "linear interpolation (type 7)";
  std::string verdict_rule =
      "CONSENSUS iff no modularity-vs-functional ranking has Kendall tau below the divergence threshold "
      "and the mean pairwise inter-algorithm NMI reaches the consensus threshold";
  std::string ari_note = "permutation-model adjusted Rand index";

  bool operator==(const ReportMetadata&) const = default;
};

struct RunRecord {
  std::string id;
  Algorithm algorithm = Algorithm::LM;
  std::uint64_t seed = 0;
  std::size_t community_count = 0;
  double modularity = 0.0;
  double conductance_mean = 0.0;
  double density_mean = 0.0;
  std::optional<double> objective;
  std::string partition_file;
  std::vector<Label> labels;  // aligned with ReportBundle::nodes

  bool operator==(const RunRecord&) const = default;
};

struct FiveNumber {
  double min = 0.0;
  double q1 = 0.0;
  double median = 0.0;
  double q3 = 0.0;
  double max = 0.0;

  bool operator==(const FiveNumber&) const = default;
};

struct PlotRow {
  Algorithm algorithm = Algorithm::LM;
  std::string quantity;  // "modularity" or "community_count"
  std::size_t runs = 0;
  FiveNumber summary;
  double variance = 0.0;
  std::optional<double> truth;

  bool operator==(const PlotRow&) const = default;
};

struct TruthSummary {
  PartitionStats stats;
  double modularity = 0.0;

  bool operator==(const TruthSummary&) const = default;
};

struct FilterSummary {
  FilterConfig config;
  std::size_t pairs_kept = 0;
  std::size_t pairs_dropped = 0;
  std::size_t nodes_dropped = 0;
  std::string note = kFilterNote;

  bool operator==(const FilterSummary&) const = default;
};

struct ReportBundle {
  ReportMetadata metadata;
  NetworkStats network;
  std::vector<std::string> nodes;
  std::optional<TruthSummary> truth;
  std::vector<RunRecord> runs;
  std::optional<ConsensusReport> consensus;
  std::optional<FilterSummary> filter;
  std::optional<ControlRecord> control;
  std::optional<BiasReport> bias;
  std::vector<PlotRow> plot;
  std::vector<std::string> files;  // relative to the output directory

  bool operator==(const ReportBundle&) const = default;
};

// ---------------------------------------------------------------------------
// Enums

inline void to_json(Json& j, Algorithm a) { j = to_string(a); }
inline void from_json(const Json& j, Algorithm& a) { a = parse_algorithm(j.get<std::string>()); }
inline void to_json(Json& j, FunctionalMetric m) { j = to_string(m); }
inline void from_json(const Json& j, FunctionalMetric& m) { m = parse_functional_metric(j.get<std::string>()); }
inline void to_json(Json& j, Verdict v) { j = to_string(v); }

inline void from_json(const Json& j, Verdict& v) {
  const auto s = j.get<std::string>();
  if (s == "CONSENSUS") {
    v = Verdict::Consensus;
  } else if (s == "DIVERGENT") {
    v = Verdict::Divergent;
  } else {
    throw InvalidInput("unknown verdict '" + s + "'");
  }
}

inline void to_json(Json& j, BiasStatus s) { j = to_string(s); }

inline void from_json(const Json& j, BiasStatus& s) {
  const auto t = j.get<std::string>();
  for (auto c : {BiasStatus::Absent, BiasStatus::Suspected, BiasStatus::Confirmed}) {
    if (to_string(c) == t) {
      s = c;
      return;
    }
  }
  throw InvalidInput("unknown bias status '" + t + "'");
}

inline void to_json(Json& j, const FunctionalScores& s) {
  j = Json::object();
  for (auto m : kAllFunctionalMetrics) j[to_string(m)] = s[m];
}

inline void from_json(const Json& j, FunctionalScores& s) {
  for (auto m : kAllFunctionalMetrics) s[m] = j.at(to_string(m)).get<double>();
}

// ---------------------------------------------------------------------------
// Records

NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE(PartitionStats, community_count, min_size, max_size, mean_size, size_variance,
                                   multicomponent_count)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE(NetworkStats, node_count, edge_count, max_degree, min_degree, density, clustering,
                                   component_count, total_weight)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE(EvidenceMatrix, metric, values)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE(GroundTruthTable, metrics, rows)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE(MetricAgreement, distance, agreement)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE(MetricRanking, metric, higher_is_better, order, scores, ties)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE(Divergence, structural_metric, functional_metric, tau, flagged)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE(ConsensusThresholds, consensus, divergence)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE(SampleSummary, count, mean, variance, min, max)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE(ReplicationSummary, algorithm, modularity, community_count)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE(ModularityGap, algorithm, detected, truth, agreement)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE(ConsensusReport, run_ids, metrics, matrices, ground_truth, rankings, winners,
                                   divergences, replication, modularity_gaps, mean_pairwise_nmi,
                                   pairwise_nmi_dispersion, mean_truth_nmi, thresholds, verdict, reasons)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE(FilterConfig, min_recurrence, drop_isolated)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE(AlgorithmControl, algorithm, raw, filtered, delta, delta_modularity,
                                   delta_conductance, delta_density, delta_community_count)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE(TruthRestriction, nodes_before, nodes_after, communities_before,
                                   communities_after)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE(ControlRecord, algorithms, restriction, raw_edges, filtered_edges, mean_raw_nmi,
                                   mean_filtered_nmi, improvement, improvement_threshold, convergence_improved)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE(BiasThresholds, consensus, functional, improvement)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE(BiasFinding, status, evidence)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE(MetricBiasNote, metric, winner, majority)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE(BiasReport, data, ground_truth, method, metric_notes, rules_fired, thresholds,
                                   filter_note)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE(PipelineThresholds, consensus, functional, improvement, divergence)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE(ReportMetadata, schema_version, command, input_kind, algorithms, metrics,
                                   replications, base_seed, louvain_seed, walk_length, binarized, thresholds,
                                   nmi_variant, entropy_unit, quantile_method, verdict_rule, ari_note)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE(RunRecord, id, algorithm, seed, community_count, modularity, conductance_mean,
                                   density_mean, objective, partition_file, labels)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE(FiveNumber, min, q1, median, q3, max)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE(PlotRow, algorithm, quantity, runs, summary, variance, truth)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE(TruthSummary, stats, modularity)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE(FilterSummary, config, pairs_kept, pairs_dropped, nodes_dropped, note)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE(ReportBundle, metadata, network, nodes, truth, runs, consensus, filter, control,
                                   bias, plot, files)

inline std::string serialize(const ReportBundle& b) { return Json(b).dump(2) + "\n"; }

inline ReportBundle parse_report(std::string_view text) {
  try {
    auto j = Json::parse(text);
    const int version = j.at("metadata").at("schema_version").get<int>();
    if (version != kSchemaVersion) {
      throw InvalidInput("unsupported report schema version " + std::to_string(version));
    }
    return j.get<ReportBundle>();
  } catch (const Json::exception& e) {
    throw InvalidInput(std::string("malformed report: ") + e.what());
  }
}

// ---------------------------------------------------------------------------
// Plot data

// Linear interpolation between order statistics (type 7).
inline double quantile(std::vector<double> xs, double p) {
  if (xs.empty()) throw InvalidInput("quantile of an empty sample");
  std::sort(xs.begin(), xs.end());
  const double h = (static_cast<double>(xs.size()) - 1.0) * p;
  const auto lo = static_cast<std::size_t>(std::floor(h));
  if (lo + 1 >= xs.size()) return xs.back();
  return xs[lo] + (h - static_cast<double>(lo)) * (xs[lo + 1] - xs[lo]);
}

inline FiveNumber five_number(const std::vector<double>& xs) {
  return {quantile(xs, 0.0), quantile(xs, 0.25), quantile(xs, 0.5), quantile(xs, 0.75), quantile(xs, 1.0)};
}

// Per algorithm: modularity and community count across its runs, with the
// ground-truth value alongside when known.
inline std::vector<PlotRow> plot_rows(const std::vector<RunRecord>& runs, const std::optional<TruthSummary>& truth) {
  std::map<Algorithm, std::vector<double>> q, k;
  for (const auto& r : runs) {
    q[r.algorithm].push_back(r.modularity);
    k[r.algorithm].push_back(static_cast<double>(r.community_count));
  }
  std::vector<PlotRow> rows;
  for (const auto& [a, qs] : q) {
    PlotRow mod{a, "modularity", qs.size(), five_number(qs), summarize(qs).variance, std::nullopt};
    PlotRow cnt{a, "community_count", k[a].size(), five_number(k[a]), summarize(k[a]).variance, std::nullopt};
    if (truth) {
      mod.truth = truth->modularity;
      cnt.truth = static_cast<double>(truth->stats.community_count);
    }
    rows.push_back(mod);
    rows.push_back(cnt);
  }
  return rows;
}

}  // namespace commeval
