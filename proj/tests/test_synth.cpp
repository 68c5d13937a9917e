#include <gtest/gtest.h>

#include <cmath>
#include <set>

#include "commeval/bias.hpp"
#include "commeval/synth.hpp"

using namespace commeval;

namespace {

using EdgeSet = std::set<std::tuple<std::string, std::string, double>>;

EdgeSet edge_set(const Graph& g) {
  EdgeSet out;
  for (const auto& e : g.edges()) {
    auto a = g.name(e.u), b = g.name(e.v);
    if (b < a) std::swap(a, b);
    out.emplace(a, b, e.weight);
  }
  return out;
}

std::size_t intra_edges(const LabeledGraph& lg) {
  std::size_t k = 0;
  for (const auto& e : lg.graph.edges()) k += lg.truth[e.u] == lg.truth[e.v];
  return k;
}

}  // namespace

TEST(PlantedPartition, CliquesWhenDense) {
  auto lg = planted_partition({{3, 4, 5}, 1.0, 0.0, 2, 9});
  EXPECT_EQ(lg.graph.edge_count(), 3u + 6u + 10u);
  EXPECT_EQ(connected_components(lg.graph), lg.truth);
  for (const auto& e : lg.graph.edges()) EXPECT_EQ(e.weight, 2.0);
  EXPECT_EQ(lg.truth.community_sizes(), (std::vector<std::size_t>{3, 4, 5}));
}

TEST(PlantedPartition, NoInterEdgesWithoutPOut) {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    auto lg = planted_partition({{20, 20, 20}, 0.4, 0.0, 2, seed});
    EXPECT_EQ(intra_edges(lg), lg.graph.edge_count());
  }
}

TEST(PlantedPartition, IntraEdgeCountMatchesBinomial) {
  const double pairs = 4.0 * 32.0 * 31.0 / 2.0;
  const double mean = pairs * 0.3, sd = std::sqrt(pairs * 0.3 * 0.7);
  double total = 0.0;
  for (std::uint64_t seed = 1; seed <= 200; ++seed) {
    total += static_cast<double>(intra_edges(planted_partition({{32, 32, 32, 32}, 0.3, 0.01, 2, seed})));
  }
  EXPECT_DOUBLE_EQ(mean, 595.2);
  EXPECT_LE(std::abs(total / 200.0 - mean), 3.0 * sd / std::sqrt(200.0));
}

TEST(PlantedPartition, SameSeedSameGraph) {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    PlantedConfig cfg;
    cfg.seed = seed;
    auto a = planted_partition(cfg), b = planted_partition(cfg);
    EXPECT_EQ(save_edge_list(a.graph), save_edge_list(b.graph));
    EXPECT_EQ(a.truth, b.truth);
  }
  PlantedConfig other;
  other.seed = 2;
  EXPECT_NE(save_edge_list(planted_partition({}).graph), save_edge_list(planted_partition(other).graph));
}

TEST(PlantedPartition, Errors) {
  EXPECT_THROW(planted_partition({{1}, 0.5, 0.1, 2, 1}), InvalidInput);
  EXPECT_THROW(planted_partition({{3, 0}, 0.5, 0.1, 2, 1}), InvalidInput);
  EXPECT_THROW(planted_partition({{3, 3}, 1.5, 0.1, 2, 1}), InvalidInput);
  EXPECT_THROW(planted_partition({{3, 3}, 0.5, 0.1, 0, 1}), InvalidInput);
  EXPECT_FALSE((PlantedConfig{{3, 3}, 0.1, 0.5, 2, 1}.has_structure()));
  EXPECT_NO_THROW(planted_partition({{3, 3}, 0.1, 0.5, 2, 1}));
}

TEST(SporadicNoise, ZeroRateLeavesGraphUnchanged) {
  auto lg = planted_partition({});
  auto noisy = inject_sporadic_noise(lg.graph, lg.truth, 0.0, 1);
  EXPECT_EQ(noisy.added, 0u);
  EXPECT_EQ(save_edge_list(noisy.graph), save_edge_list(lg.graph));
}

TEST(SporadicNoise, ExactCount) {
  auto lg = planted_partition({});
  auto noisy = inject_sporadic_noise(lg.graph, lg.truth, 2.0, 1);
  EXPECT_EQ(noisy.added, 2 * lg.graph.edge_count());
  EXPECT_EQ(noisy.graph.edge_count(), 3 * lg.graph.edge_count());
  auto odd = inject_sporadic_noise(lg.graph, lg.truth, 0.001, 1);
  EXPECT_EQ(odd.added, static_cast<std::size_t>(std::ceil(0.001 * static_cast<double>(lg.graph.edge_count()))));
  for (const auto& e : noisy.graph.edges()) {
    if (lg.graph.weight(e.u, e.v) == 0.0) {
      EXPECT_EQ(e.weight, 1.0);
      EXPECT_NE(lg.truth[e.u], lg.truth[e.v]);
    }
  }
}

TEST(SporadicNoise, FilterInvertsInjection) {
  for (std::uint64_t seed = 1; seed <= 50; ++seed) {
    auto lg = planted_partition({{32, 32, 32, 32}, 0.3, 0.01, 2, seed});
    auto noisy = inject_sporadic_noise(lg.graph, lg.truth, 2.0, seed);
    EXPECT_TRUE(equivalent(aggregate_temporal(noisy.stream), noisy.graph));
    auto filtered = recurrence_filter(noisy.stream, {2, true});
    EXPECT_EQ(edge_set(filtered.graph), edge_set(lg.graph)) << "seed " << seed;
    EXPECT_EQ(filtered.pairs_dropped, noisy.added);
  }
}

TEST(SporadicNoise, Errors) {
  auto lg = planted_partition({{4, 4}, 1.0, 0.0, 2, 1});
  EXPECT_THROW(inject_sporadic_noise(lg.graph, Partition::whole(8), 1.0, 1), InvalidInput);
  EXPECT_THROW(inject_sporadic_noise(lg.graph, lg.truth, 2.0, 1), InvalidInput);  // 16 pairs, 24 needed
  EXPECT_THROW(inject_sporadic_noise(lg.graph, lg.truth, -1.0, 1), InvalidInput);
  EXPECT_THROW(inject_sporadic_noise(lg.graph, Partition::whole(3), 1.0, 1), InvalidInput);
  EXPECT_THROW(inject_sporadic_noise(load_edge_list("a b 1.5\nc d 1"), Partition(std::vector<Label>{0, 0, 1, 1}),
                                     0.5, 1),
               InvalidInput);
}
