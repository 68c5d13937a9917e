#include <gtest/gtest.h>

#include "commeval/bias.hpp"
#include "commeval/synth.hpp"
#include "oracles.hpp"

using namespace commeval;

namespace {

TemporalStream repeated(const std::vector<std::tuple<std::string, std::string, int>>& pairs) {
  std::vector<Interaction> ev;
  std::int64_t t = 0;
  for (const auto& [u, v, times] : pairs) {
    for (int i = 0; i < times; ++i) ev.push_back({u, v, t++});
  }
  return TemporalStream(ev);
}

ConsensusReport consensus_fixture(double pairwise, std::optional<double> truth_nmi) {
  ConsensusReport c;
  c.mean_pairwise_nmi = pairwise;
  c.pairwise_nmi_dispersion = 0.05;
  c.mean_truth_nmi = truth_nmi;
  c.winners = {{"modularity", Algorithm::LM}, {"NMI", Algorithm::LM}, {"RI", Algorithm::LM}};
  return c;
}

ControlRecord control_fixture(double raw, double filtered) {
  ControlRecord r;
  r.mean_raw_nmi = raw;
  r.mean_filtered_nmi = filtered;
  r.improvement = filtered - raw;
  r.improvement_threshold = 0.1;
  r.convergence_improved = r.improvement >= 0.1;
  return r;
}

DetectionConfig small_suite() {
  DetectionConfig cfg;
  cfg.replications = 2;
  return cfg;
}

}  // namespace

TEST(RecurrenceFilter, Examples) {
  auto s = repeated({{"a", "b", 3}, {"b", "c", 1}, {"c", "d", 2}, {"e", "a", 1}});
  auto out = recurrence_filter(s, {2, true});
  EXPECT_EQ(out.graph.edge_count(), 2u);
  EXPECT_EQ(out.graph.weight(*out.graph.find("a"), *out.graph.find("b")), 3.0);
  EXPECT_FALSE(out.graph.find("b") && out.graph.find("c") &&
               out.graph.weight(*out.graph.find("b"), *out.graph.find("c")) > 0.0);
  EXPECT_FALSE(out.graph.find("e").has_value());
  EXPECT_EQ(out.pairs_kept, 2u);
  EXPECT_EQ(out.pairs_dropped, 2u);
  EXPECT_EQ(out.nodes_dropped, 1u);
  EXPECT_FALSE(out.empty);

  auto keep = recurrence_filter(s, {2, false});
  EXPECT_TRUE(keep.graph.find("e").has_value());
  EXPECT_EQ(keep.graph.degree(*keep.graph.find("e")), 0u);
}

TEST(RecurrenceFilter, IdentityAtOne) {
  auto s = repeated({{"a", "b", 3}, {"b", "c", 1}});
  EXPECT_TRUE(equivalent(recurrence_filter(s, {1, true}).graph, aggregate_temporal(s)));
}

TEST(RecurrenceFilter, Errors) {
  EXPECT_THROW(recurrence_filter(TemporalStream{}), InvalidInput);
  EXPECT_THROW(recurrence_filter(repeated({{"a", "b", 1}}), {0, true}), InvalidInput);
  auto out = recurrence_filter(repeated({{"a", "b", 1}}), {2, true});
  EXPECT_TRUE(out.empty);
  EXPECT_EQ(out.graph.edge_count(), 0u);
}

TEST(RecurrenceFilter, Idempotent) {
  Rng rng(1);
  for (int trial = 0; trial < 30; ++trial) {
    std::vector<Interaction> ev;
    for (int i = 0; i < 80; ++i) {
      auto u = uniform_index(rng, 10), v = uniform_index(rng, 10);
      if (u != v) ev.push_back({std::to_string(u), std::to_string(v), i});
    }
    const int k = 1 + static_cast<int>(uniform_index(rng, 3));
    auto once = recurrence_filter(TemporalStream(ev), {k, true});
    if (once.empty) continue;
    auto twice = recurrence_filter(expand_to_stream(once.graph), {k, true});
    EXPECT_TRUE(equivalent(once.graph, twice.graph));
    EXPECT_EQ(twice.pairs_dropped, 0u);
  }
}

TEST(RecurrenceFilter, MonotoneInK) {
  Rng rng(2);
  for (int trial = 0; trial < 30; ++trial) {
    std::vector<Interaction> ev;
    for (int i = 0; i < 100; ++i) {
      auto u = uniform_index(rng, 8), v = uniform_index(rng, 8);
      if (u != v) ev.push_back({std::to_string(u), std::to_string(v), i});
    }
    TemporalStream s(ev);
    for (int k = 1; k < 5; ++k) {
      auto lo = recurrence_filter(s, {k, true}).graph, hi = recurrence_filter(s, {k + 1, true}).graph;
      for (const auto& e : hi.edges()) {
        auto u = lo.find(hi.name(e.u)), v = lo.find(hi.name(e.v));
        ASSERT_TRUE(u && v);
        EXPECT_GT(lo.weight(*u, *v), 0.0);
      }
      EXPECT_LE(hi.edge_count(), lo.edge_count());
    }
  }
}

TEST(ControlExperiment, IdentityFilterGivesZeroDeltas) {
  auto pp = planted_partition({{10, 10, 10}, 0.6, 0.05, 1, 3});
  auto stream = expand_to_stream(pp.graph);
  auto raw = aggregate_temporal(stream);
  auto truth = transfer_partition(pp.graph, pp.truth, raw);
  auto filtered = recurrence_filter(stream, {1, true}).graph;
  auto rec = bias_control_experiment(raw, filtered, truth, small_suite());
  EXPECT_EQ(rec.algorithms.size(), 7u);
  for (const auto& c : rec.algorithms) {
    for (auto m : kAllFunctionalMetrics) EXPECT_EQ(c.delta[m], 0.0) << to_string(c.algorithm);
    EXPECT_EQ(c.delta_modularity, 0.0);
    EXPECT_EQ(c.delta_conductance, 0.0);
    EXPECT_EQ(c.delta_density, 0.0);
    EXPECT_EQ(c.delta_community_count, 0.0);
  }
  EXPECT_EQ(rec.improvement, 0.0);
  EXPECT_FALSE(rec.convergence_improved);
  EXPECT_EQ(rec.restriction.nodes_before, rec.restriction.nodes_after);
}

TEST(ControlExperiment, RemovedCommunityIsRecorded) {
  // Two recurrent triangles and one sporadic one.
  auto stream = repeated({{"a", "b", 2}, {"b", "c", 2}, {"a", "c", 2}, {"d", "e", 2}, {"e", "f", 2}, {"d", "f", 2},
                          {"g", "h", 1}, {"h", "i", 1}, {"g", "i", 1}, {"c", "d", 2}, {"f", "g", 1}});
  auto raw = aggregate_temporal(stream);
  auto truth = load_partition("a 0\nb 0\nc 0\nd 1\ne 1\nf 1\ng 2\nh 2\ni 2", raw);
  auto filtered = recurrence_filter(stream, {2, true}).graph;
  DetectionConfig cfg = small_suite();
  cfg.algorithms = {Algorithm::LM, Algorithm::GM};
  auto rec = bias_control_experiment(raw, filtered, truth, cfg);
  EXPECT_EQ(rec.restriction.nodes_before, 9u);
  EXPECT_EQ(rec.restriction.nodes_after, 6u);
  EXPECT_EQ(rec.restriction.communities_before, 3u);
  EXPECT_EQ(rec.restriction.communities_after, 2u);
  EXPECT_EQ(rec.raw_edges, 11u);
  EXPECT_EQ(rec.filtered_edges, 7u);
}

TEST(ControlExperiment, Errors) {
  auto raw = oracle::two_triangle_bridge();
  auto truth = Partition(std::vector<Label>{0, 0, 0, 1, 1, 1});
  EXPECT_THROW(bias_control_experiment(raw, load_edge_list("v0\nv1"), truth, small_suite()), InvalidInput);
  EXPECT_THROW(bias_control_experiment(raw, load_edge_list("v0 zz"), truth, small_suite()), InvalidInput);
  EXPECT_THROW(bias_control_experiment(raw, raw, Partition::whole(4), small_suite()), InvalidInput);
}

TEST(Diagnose, DataBiasConfirmed) {
  auto control = control_fixture(0.2, 0.9);
  auto rep = diagnose(consensus_fixture(0.95, 0.2), &control);
  EXPECT_EQ(rep.data.status, BiasStatus::Confirmed);
  EXPECT_EQ(rep.ground_truth.status, BiasStatus::Absent);
  EXPECT_EQ(rep.method.status, BiasStatus::Absent);
  EXPECT_EQ(rep.rules_fired, (std::vector<std::string>{"R1", "R2"}));
  EXPECT_NEAR(rep.data.evidence.at("improvement"), 0.7, 1e-12);
  EXPECT_EQ(rep.data.evidence.at("mean_truth_nmi"), 0.2);
}

TEST(Diagnose, NoLiftPointsAtGroundTruth) {
  auto control = control_fixture(0.2, 0.25);
  auto rep = diagnose(consensus_fixture(0.95, 0.2), &control);
  EXPECT_EQ(rep.data.status, BiasStatus::Absent);
  EXPECT_EQ(rep.ground_truth.status, BiasStatus::Suspected);
}

TEST(Diagnose, WithoutControlBothAreSuspected) {
  auto rep = diagnose(consensus_fixture(0.95, 0.2), nullptr);
  EXPECT_EQ(rep.data.status, BiasStatus::Suspected);
  EXPECT_EQ(rep.ground_truth.status, BiasStatus::Suspected);
  EXPECT_EQ(rep.rules_fired, (std::vector<std::string>{"R1"}));
}

TEST(Diagnose, MethodBiasDominant) {
  auto rep = diagnose(consensus_fixture(0.3, 0.6), nullptr);
  EXPECT_EQ(rep.method.status, BiasStatus::Suspected);
  EXPECT_EQ(rep.method.evidence.at("mean_pairwise_nmi"), 0.3);
  EXPECT_EQ(rep.method.evidence.at("pairwise_nmi_dispersion"), 0.05);
  EXPECT_EQ(rep.data.status, BiasStatus::Absent);
  EXPECT_EQ(rep.rules_fired, (std::vector<std::string>{"R3"}));
}

TEST(Diagnose, MethodBiasFromSeededLabelPropagation) {
  // Sparse random graph without structure: LP seeds disagree with each other
  // and with a modularity optimizer.
  Rng rng(5);
  auto g = oracle::random_connected_graph(60, 0.04, rng);
  DetectionConfig cfg;
  cfg.algorithms = {Algorithm::LP, Algorithm::LM, Algorithm::WT};
  cfg.replications = 5;
  auto c = consensus_verdict(g, run_suite(g, cfg), nullptr, {FunctionalMetric::NMI});
  auto rep = diagnose(c, nullptr);
  RecordProperty("mean_pairwise_nmi", std::to_string(c.mean_pairwise_nmi));
  EXPECT_LT(c.mean_pairwise_nmi, 0.7);
  EXPECT_EQ(rep.method.status, BiasStatus::Suspected);
}

TEST(Diagnose, AllHighIsAbsent) {
  auto rep = diagnose(consensus_fixture(0.95, 0.9), nullptr);
  EXPECT_EQ(rep.data.status, BiasStatus::Absent);
  EXPECT_EQ(rep.ground_truth.status, BiasStatus::Absent);
  EXPECT_EQ(rep.method.status, BiasStatus::Absent);
  EXPECT_TRUE(rep.metric_notes.empty());
  EXPECT_TRUE(rep.rules_fired.empty());
  EXPECT_FALSE(rep.data.evidence.empty());
  EXPECT_FALSE(rep.method.evidence.empty());
}

TEST(Diagnose, MetricNotes) {
  auto c = consensus_fixture(0.95, 0.9);
  c.winners["RI"] = Algorithm::WT;
  c.winners["VI*"] = Algorithm::WT;
  c.winners["SJD*"] = Algorithm::IM;
  auto rep = diagnose(c, nullptr);
  // LM and WT both win two metrics; the alphabetical tie-break picks LM.
  ASSERT_EQ(rep.metric_notes.size(), 3u);
  for (const auto& n : rep.metric_notes) EXPECT_EQ(n.majority, Algorithm::LM);
  EXPECT_EQ(rep.rules_fired, (std::vector<std::string>{"R4"}));
}

TEST(Diagnose, ThresholdsEchoed) {
  BiasThresholds t{0.8, 0.4, 0.2};
  auto rep = diagnose(consensus_fixture(0.95, 0.2), nullptr, t);
  EXPECT_EQ(rep.thresholds, t);
  EXPECT_FALSE(rep.filter_note.empty());
}

TEST(Diagnose, PureFunctionOfInputs) {
  Rng rng(3);
  for (int trial = 0; trial < 100; ++trial) {
    auto c = consensus_fixture(uniform_unit(rng), uniform_unit(rng));
    auto control = control_fixture(uniform_unit(rng), uniform_unit(rng));
    const ControlRecord* ctl = trial % 2 ? &control : nullptr;
    auto copy = c;
    EXPECT_EQ(diagnose(c, ctl), diagnose(copy, ctl));
    EXPECT_EQ(c, copy);
  }
}
