#pragma once

// Cross-checking of detection runs: pairwise similarity matrices, similarity
// to a ground truth, per-metric algorithm rankings, rank-correlation between
// structural and functional rankings, and the resulting consensus verdict.

#include <algorithm>
#include <array>
#include <cmath>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "commeval/detection/types.hpp"
#include "commeval/error.hpp"
#include "commeval/functional.hpp"
#include "commeval/structural.hpp"

namespace commeval {

struct FunctionalScores {
  std::array<double, 5> values{};
  double& operator[](FunctionalMetric m) { return values[static_cast<std::size_t>(m)]; }
  double operator[](FunctionalMetric m) const { return values[static_cast<std::size_t>(m)]; }

  bool operator==(const FunctionalScores&) const = default;
};

struct EvidenceRecord {
  Algorithm algorithm = Algorithm::LM;
  std::uint64_t seed = 0;
  StructuralEvidence structural;
  std::optional<FunctionalScores> versus_truth;
};

inline std::vector<EvidenceRecord> collect_evidence(const Graph& g, const std::vector<DetectionResult>& runs,
                                                    const Partition* truth) {
  std::vector<EvidenceRecord> out;
  out.reserve(runs.size());
  for (const auto& r : runs) {
    EvidenceRecord rec;
    rec.algorithm = r.algorithm;
    rec.seed = r.seed;
    rec.structural = structural_evidence(g, r.partition);
    if (truth) {
      FunctionalScores s;
      for (auto m : kAllFunctionalMetrics) s[m] = similarity(m, r.partition, *truth);
      rec.versus_truth = s;
    }
    out.push_back(rec);
  }
  return out;
}

inline std::string run_id(const DetectionResult& r) {
  return to_string(r.algorithm) + "#" + std::to_string(r.seed);
}

// ---------------------------------------------------------------------------
// Similarity matrices

struct EvidenceMatrix {
  FunctionalMetric metric = FunctionalMetric::NMI;
  std::vector<std::vector<double>> values;

  bool operator==(const EvidenceMatrix&) const = default;
};

namespace detail {

inline void require_same_nodes(const std::vector<DetectionResult>& runs, std::size_t n) {
  for (const auto& r : runs) {
    if (r.partition.size() != n) {
      throw InvalidInput("run " + run_id(r) + " covers " + std::to_string(r.partition.size()) +
                         " nodes, expected " + std::to_string(n));
    }
  }
}

}  // namespace detail

// One symmetric matrix per metric, on the similarity scale (VI*, SJD*).
inline std::vector<EvidenceMatrix> pairwise_similarity_matrices(const std::vector<DetectionResult>& runs,
                                                                const std::vector<FunctionalMetric>& metrics) {
  if (runs.size() < 2) throw InvalidInput("pairwise comparison needs at least 2 runs");
  detail::require_same_nodes(runs, runs.front().partition.size());
  const std::size_t k = runs.size();
  std::vector<EvidenceMatrix> out;
  for (auto m : metrics) {
    EvidenceMatrix mat;
    mat.metric = m;
    mat.values.assign(k, std::vector<double>(k, 1.0));
    for (std::size_t i = 0; i < k; ++i) {
      for (std::size_t j = i + 1; j < k; ++j) {
        double s = similarity(m, runs[i].partition, runs[j].partition);
        mat.values[i][j] = s;
        mat.values[j][i] = s;
      }
    }
    out.push_back(std::move(mat));
  }
  return out;
}

struct GroundTruthTable {
  std::vector<FunctionalMetric> metrics;
  std::vector<std::vector<double>> rows;  // run x metric

  bool operator==(const GroundTruthTable&) const = default;
};

inline GroundTruthTable ground_truth_similarity(const std::vector<DetectionResult>& runs, const Partition& truth,
                                                const std::vector<FunctionalMetric>& metrics) {
  detail::require_same_nodes(runs, truth.size());
  GroundTruthTable t;
  t.metrics = metrics;
  for (const auto& r : runs) {
    std::vector<double> row;
    for (auto m : metrics) row.push_back(similarity(m, r.partition, truth));
    t.rows.push_back(std::move(row));
  }
  return t;
}

// ---------------------------------------------------------------------------
// Agreement between two values of one metric

struct TaggedScore {
  std::string metric;
  double value = 0.0;
};

struct MetricAgreement {
  double distance = 0.0;
  double agreement = 1.0;  // 1 - distance, meaningful on [0, 1] scales

  bool operator==(const MetricAgreement&) const = default;
};

inline MetricAgreement metric_agreement(double x, double y) {
  MetricAgreement a;
  a.distance = std::abs(x - y);
  a.agreement = 1.0 - a.distance;
  return a;
}

inline MetricAgreement metric_agreement(const TaggedScore& x, const TaggedScore& y) {
  if (x.metric != y.metric) {
    throw InvalidInput("cannot compare '" + x.metric + "' with '" + y.metric + "'");
  }
  return metric_agreement(x.value, y.value);
}

// ---------------------------------------------------------------------------
// Rankings

struct MetricRanking {
  std::string metric;
  bool higher_is_better = true;
  std::vector<Algorithm> order;  // best first
  std::vector<double> scores;    // mean score, aligned with order
  std::vector<std::pair<Algorithm, Algorithm>> ties;  // adjacent equal scores

  bool operator==(const MetricRanking&) const = default;
};

inline constexpr double kTieTolerance = 1e-12;

// Sorted best first; equal means (within kTieTolerance, chained) are ordered
// by algorithm id and flagged.
inline MetricRanking rank_by(std::string metric, const std::map<Algorithm, double>& means,
                             bool higher_is_better = true) {
  std::vector<std::pair<Algorithm, double>> items(means.begin(), means.end());
  std::sort(items.begin(), items.end(), [&](const auto& a, const auto& b) {
    if (a.second != b.second) return higher_is_better ? a.second > b.second : a.second < b.second;
    return to_string(a.first) < to_string(b.first);
  });
  MetricRanking r;
  r.metric = std::move(metric);
  r.higher_is_better = higher_is_better;
  for (std::size_t i = 0; i < items.size();) {
    std::size_t j = i + 1;
    while (j < items.size() && std::abs(items[j].second - items[j - 1].second) <= kTieTolerance) ++j;
    std::sort(items.begin() + static_cast<std::ptrdiff_t>(i), items.begin() + static_cast<std::ptrdiff_t>(j),
              [](const auto& a, const auto& b) { return to_string(a.first) < to_string(b.first); });
    for (std::size_t t = i + 1; t < j; ++t) r.ties.emplace_back(items[t - 1].first, items[t].first);
    i = j;
  }
  for (const auto& [a, s] : items) {
    r.order.push_back(a);
    r.scores.push_back(s);
  }
  return r;
}

inline constexpr const char* kModularity = "modularity";
inline constexpr const char* kConductance = "conductance";
inline constexpr const char* kDensity = "density";

// Non-deterministic algorithms enter with their mean across replications.
// Structural rankings always; functional ones when truth scores exist.
inline std::vector<MetricRanking> rank_algorithms(const std::vector<EvidenceRecord>& records,
                                                  const std::vector<FunctionalMetric>& metrics) {
  std::map<Algorithm, std::vector<const EvidenceRecord*>> by_alg;
  for (const auto& r : records) by_alg[r.algorithm].push_back(&r);
  if (by_alg.size() < 2) throw InvalidInput("ranking needs at least 2 algorithms");

  auto mean_of = [&](auto&& get) {
    std::map<Algorithm, double> means;
    for (const auto& [a, recs] : by_alg) {
      double s = 0.0;
      for (const auto* r : recs) s += get(*r);
      means[a] = s / static_cast<double>(recs.size());
    }
    return means;
  };

  std::vector<MetricRanking> out;
  out.push_back(rank_by(kModularity, mean_of([](const EvidenceRecord& r) { return r.structural.modularity; })));
  out.push_back(rank_by(kConductance,
                        mean_of([](const EvidenceRecord& r) { return r.structural.conductance_mean; }), false));
  out.push_back(rank_by(kDensity, mean_of([](const EvidenceRecord& r) { return r.structural.density_mean; })));
  const bool have_truth = std::all_of(records.begin(), records.end(),
                                      [](const EvidenceRecord& r) { return r.versus_truth.has_value(); });
  if (have_truth) {
    for (auto m : metrics) {
      out.push_back(rank_by(to_string(m), mean_of([m](const EvidenceRecord& r) { return (*r.versus_truth)[m]; })));
    }
  }
  return out;
}

// Metric -> winning algorithm.
inline std::map<std::string, Algorithm> winners(const std::vector<MetricRanking>& rankings) {
  std::map<std::string, Algorithm> w;
  for (const auto& r : rankings) {
    if (!r.order.empty()) w[r.metric] = r.order.front();
  }
  return w;
}

// Kendall rank correlation between two orderings of the same algorithms.
inline double kendall_tau(const std::vector<Algorithm>& a, const std::vector<Algorithm>& b) {
  if (a.size() < 2) throw InvalidInput("rank correlation needs at least 2 algorithms");
  if (a.size() != b.size()) throw InvalidInput("rankings cover different algorithm sets");
  std::map<Algorithm, std::size_t> pos_b;
  for (std::size_t i = 0; i < b.size(); ++i) pos_b[b[i]] = i;
  if (pos_b.size() != b.size()) throw InvalidInput("ranking repeats an algorithm");
  for (auto x : a) {
    if (!pos_b.count(x)) throw InvalidInput("rankings cover different algorithm sets");
  }
  long long concordant = 0, discordant = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    for (std::size_t j = i + 1; j < a.size(); ++j) {
      // a ranks a[i] above a[j]
      if (pos_b[a[i]] < pos_b[a[j]]) {
        ++concordant;
      } else {
        ++discordant;
      }
    }
  }
  const auto pairs = static_cast<double>(concordant + discordant);
  return static_cast<double>(concordant - discordant) / pairs;
}

struct Divergence {
  std::string structural_metric;
  std::string functional_metric;
  double tau = 1.0;
  bool flagged = false;

  bool operator==(const Divergence&) const = default;
};

inline Divergence divergence_score(const MetricRanking& structural, const MetricRanking& functional,
                                   double tau_threshold = 0.0) {
  Divergence d;
  d.structural_metric = structural.metric;
  d.functional_metric = functional.metric;
  d.tau = kendall_tau(structural.order, functional.order);
  d.flagged = d.tau < tau_threshold;
  return d;
}

// ---------------------------------------------------------------------------
// Verdict

struct ConsensusThresholds {
  double consensus = 0.7;   // minimum mean pairwise inter-algorithm NMI
  double divergence = 0.0;  // Kendall tau below this raises a flag

  bool operator==(const ConsensusThresholds&) const = default;
};

struct SampleSummary {
  std::size_t count = 0;
  double mean = 0.0;
  double variance = 0.0;  // population variance; exactly 0 for one sample
  double min = 0.0;
  double max = 0.0;

  bool operator==(const SampleSummary&) const = default;
};

inline SampleSummary summarize(const std::vector<double>& xs) {
  SampleSummary s;
  s.count = xs.size();
  if (xs.empty()) return s;
  // Deviations from the first sample, so identical samples give exactly
  // their value as mean and 0 as variance.
  const double x0 = xs.front();
  const auto n = static_cast<double>(xs.size());
  double shift = 0.0;
  for (double x : xs) shift += x - x0;
  shift /= n;
  s.mean = x0 + shift;
  double acc = 0.0;
  for (double x : xs) acc += (x - x0 - shift) * (x - x0 - shift);
  s.variance = acc / n;
  auto [lo, hi] = std::minmax_element(xs.begin(), xs.end());
  s.min = *lo;
  s.max = *hi;
  return s;
}

struct ReplicationSummary {
  Algorithm algorithm = Algorithm::LM;
  SampleSummary modularity;
  SampleSummary community_count;

  bool operator==(const ReplicationSummary&) const = default;
};

struct ModularityGap {
  Algorithm algorithm = Algorithm::LM;
  double detected = 0.0;  // mean over replications
  double truth = 0.0;
  MetricAgreement agreement;

  bool operator==(const ModularityGap&) const = default;
};

enum class Verdict { Consensus, Divergent };

inline std::string to_string(Verdict v) { return v == Verdict::Consensus ? "CONSENSUS" : "DIVERGENT"; }

struct ConsensusReport {
  std::vector<std::string> run_ids;
  std::vector<FunctionalMetric> metrics;
  std::vector<EvidenceMatrix> matrices;
  std::optional<GroundTruthTable> ground_truth;
  std::vector<MetricRanking> rankings;
  std::map<std::string, Algorithm> winners;
  std::vector<Divergence> divergences;
  std::vector<ReplicationSummary> replication;
  std::vector<ModularityGap> modularity_gaps;
  double mean_pairwise_nmi = 0.0;
  double pairwise_nmi_dispersion = 0.0;  // std deviation over algorithm pairs
  std::optional<double> mean_truth_nmi;  // mean over algorithms
  ConsensusThresholds thresholds;
  Verdict verdict = Verdict::Divergent;
  std::vector<std::string> reasons;

  bool operator==(const ConsensusReport&) const = default;
};

// Mean NMI between distinct algorithms: runs are averaged per algorithm pair
// first so replicated algorithms do not dominate.
inline std::pair<double, double> inter_algorithm_nmi(const std::vector<DetectionResult>& runs) {
  std::map<std::pair<Algorithm, Algorithm>, std::vector<double>> per_pair;
  for (std::size_t i = 0; i < runs.size(); ++i) {
    for (std::size_t j = i + 1; j < runs.size(); ++j) {
      auto a = runs[i].algorithm, b = runs[j].algorithm;
      if (a == b) continue;
      if (b < a) std::swap(a, b);
      per_pair[{a, b}].push_back(nmi(runs[i].partition, runs[j].partition));
    }
  }
  if (per_pair.empty()) throw InvalidInput("inter-algorithm agreement needs at least 2 algorithms");
  std::vector<double> means;
  for (const auto& [k, v] : per_pair) means.push_back(summarize(v).mean);
  auto s = summarize(means);
  return {s.mean, std::sqrt(s.variance)};
}

// CONSENSUS iff no structural-vs-functional flag is raised and the mean
// pairwise inter-algorithm NMI reaches thresholds.consensus.
inline ConsensusReport consensus_verdict(const Graph& g, const std::vector<DetectionResult>& runs,
                                         const Partition* truth, const std::vector<FunctionalMetric>& metrics,
                                         const ConsensusThresholds& thresholds = {}) {
  ConsensusReport rep;
  rep.thresholds = thresholds;
  rep.metrics = metrics;
  for (const auto& r : runs) rep.run_ids.push_back(run_id(r));
  rep.matrices = pairwise_similarity_matrices(runs, metrics);
  if (truth) rep.ground_truth = ground_truth_similarity(runs, *truth, metrics);

  auto records = collect_evidence(g, runs, truth);
  rep.rankings = rank_algorithms(records, metrics);
  rep.winners = winners(rep.rankings);

  std::map<Algorithm, std::vector<double>> q, count, truth_nmi;
  for (const auto& rec : records) {
    q[rec.algorithm].push_back(rec.structural.modularity);
    count[rec.algorithm].push_back(static_cast<double>(rec.structural.stats.community_count));
    if (rec.versus_truth) truth_nmi[rec.algorithm].push_back((*rec.versus_truth)[FunctionalMetric::NMI]);
  }
  for (const auto& [a, qs] : q) rep.replication.push_back({a, summarize(qs), summarize(count[a])});

  if (truth) {
    const double q_truth = modularity(g, *truth);
    for (const auto& [a, qs] : q) {
      double mean = summarize(qs).mean;
      rep.modularity_gaps.push_back({a, mean, q_truth, metric_agreement(mean, q_truth)});
    }
    std::vector<double> per_alg;
    for (const auto& [a, v] : truth_nmi) per_alg.push_back(summarize(v).mean);
    rep.mean_truth_nmi = summarize(per_alg).mean;

    const auto& structural = rep.rankings.front();
    for (const auto& r : rep.rankings) {
      if (r.metric == kModularity || r.metric == kConductance || r.metric == kDensity) continue;
      rep.divergences.push_back(divergence_score(structural, r, thresholds.divergence));
    }
  }

  std::tie(rep.mean_pairwise_nmi, rep.pairwise_nmi_dispersion) = inter_algorithm_nmi(runs);

  for (const auto& d : rep.divergences) {
    if (d.flagged) {
      rep.reasons.push_back(d.structural_metric + " ranking contradicts " + d.functional_metric +
                            " ranking (tau " + detail::format_double(d.tau) + ")");
    }
  }
  if (rep.mean_pairwise_nmi < thresholds.consensus) {
    rep.reasons.push_back("mean pairwise inter-algorithm NMI " + detail::format_double(rep.mean_pairwise_nmi) +
                          " below " + detail::format_double(thresholds.consensus));
  }
  rep.verdict = rep.reasons.empty() ? Verdict::Consensus : Verdict::Divergent;
  return rep;
}

}  // namespace commeval
