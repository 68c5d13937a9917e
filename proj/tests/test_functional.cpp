#include <gtest/gtest.h>

#include <cmath>

#include "commeval/functional.hpp"
#include "oracles.hpp"

using namespace commeval;

namespace {

// {{1,2},{3,4}} and {{1,2,3},{4}}
const Partition kP1(std::vector<Label>{0, 0, 1, 1});
const Partition kP2(std::vector<Label>{0, 0, 0, 1});

Partition relabeled(const Partition& p, Rng& rng) {
  auto perm = random_permutation(p.community_count(), rng);
  std::vector<Label> out(p.size());
  for (std::size_t i = 0; i < p.size(); ++i) out[i] = perm[p[static_cast<NodeIndex>(i)]] + 5;
  return Partition(out);
}

}  // namespace

TEST(Contingency, Examples) {
  auto same = contingency(kP1, kP1);
  EXPECT_EQ(same.at(0, 0), 2u);
  EXPECT_EQ(same.at(0, 1), 0u);
  EXPECT_EQ(same.at(1, 1), 2u);

  auto t = contingency(kP1, kP2);
  EXPECT_EQ(t.at(0, 0), 2u);
  EXPECT_EQ(t.at(0, 1), 0u);
  EXPECT_EQ(t.at(1, 0), 1u);
  EXPECT_EQ(t.at(1, 1), 1u);
  EXPECT_EQ(t.total(), 4u);
  EXPECT_EQ(t.row_sums(), (std::vector<std::uint64_t>{2, 2}));
  EXPECT_EQ(t.col_sums(), (std::vector<std::uint64_t>{3, 1}));

  auto column = contingency(Partition::singletons(3), Partition::whole(3));
  for (Label r = 0; r < 3; ++r) EXPECT_EQ(column.at(r, 0), 1u);
  EXPECT_EQ(column.col_sums().size(), 1u);
}

TEST(Contingency, SizeMismatch) {
  EXPECT_THROW(contingency(Partition::whole(3), Partition::whole(4)), InvalidInput);
}

TEST(RandIndex, Examples) {
  EXPECT_EQ(rand_index(kP1, kP1), 1.0);
  EXPECT_EQ(rand_index(kP1, kP2), 0.5);
  EXPECT_EQ(rand_index(Partition::singletons(3), Partition::whole(3)), 0.0);
  EXPECT_THROW(rand_index(Partition::whole(1), Partition::whole(1)), InvalidInput);
}

TEST(AdjustedRandIndex, Examples) {
  EXPECT_EQ(adjusted_rand_index(kP1, kP1), 1.0);
  EXPECT_EQ(adjusted_rand_index(kP1, kP2), 0.0);
  Rng rng(1);
  for (int i = 0; i < 20; ++i) {
    auto p = oracle::random_partition(10, 4, rng);
    EXPECT_EQ(adjusted_rand_index(p, Partition::whole(10)), p.community_count() == 1 ? 1.0 : 0.0);
  }
  EXPECT_THROW(adjusted_rand_index(Partition::whole(1), Partition::whole(1)), InvalidInput);
}

TEST(Nmi, Examples) {
  EXPECT_NEAR(nmi(kP1, kP1), 1.0, 1e-15);
  EXPECT_EQ(nmi(Partition::whole(4), kP1), 0.0);
  EXPECT_EQ(nmi(Partition::whole(4), Partition::whole(4)), 1.0);
  EXPECT_NEAR(nmi(kP1, kP2), 0.344, 5e-4);
  EXPECT_NEAR(nmi(kP1, kP2), oracle::nmi(kP1, kP2), 1e-12);
}

TEST(VariationOfInformation, Examples) {
  EXPECT_EQ(variation_of_information(kP1, kP1), 0.0);
  EXPECT_NEAR(variation_of_information(Partition::singletons(4), Partition::whole(4)), std::log(4.0), 1e-12);
  EXPECT_NEAR(variation_of_information(kP1, kP2), 0.824, 5e-4);
}

TEST(SplitJoin, Examples) {
  EXPECT_EQ(split_join_distance(kP1, kP1), 0u);
  EXPECT_EQ(split_join_distance(kP1, kP2), 2u);
  EXPECT_EQ(split_join_distance(Partition::singletons(4), Partition::whole(4)), 3u);
}

TEST(SimilarityScale, HigherMeansMoreSimilar) {
  for (auto m : kAllFunctionalMetrics) {
    EXPECT_NEAR(similarity(m, kP1, kP1), 1.0, 1e-15) << to_string(m);
    EXPECT_LT(similarity(m, kP1, kP2), 1.0) << to_string(m);
  }
  EXPECT_NEAR(vi_similarity(kP1, kP2), 1.0 - variation_of_information(kP1, kP2) / std::log(4.0), 1e-15);
  EXPECT_EQ(sjd_similarity(kP1, kP2), 1.0 - 2.0 / 8.0);
  EXPECT_EQ(to_string(FunctionalMetric::VI), "VI*");
  EXPECT_EQ(parse_functional_metric("SJD"), FunctionalMetric::SJD);
  EXPECT_THROW(parse_functional_metric("XYZ"), InvalidInput);
}

TEST(FunctionalProperties, Symmetric) {
  Rng rng(2);
  for (int i = 0; i < 200; ++i) {
    auto n = 2 + uniform_index(rng, 30);
    auto a = oracle::random_partition(n, 6, rng), b = oracle::random_partition(n, 6, rng);
    EXPECT_EQ(rand_index(a, b), rand_index(b, a));
    EXPECT_EQ(adjusted_rand_index(a, b), adjusted_rand_index(b, a));
    EXPECT_NEAR(nmi(a, b), nmi(b, a), 1e-12);
    EXPECT_NEAR(variation_of_information(a, b), variation_of_information(b, a), 1e-12);
    EXPECT_EQ(split_join_distance(a, b), split_join_distance(b, a));
  }
}

TEST(FunctionalProperties, RelabelingInvariant) {
  Rng rng(3);
  for (int i = 0; i < 200; ++i) {
    auto n = 2 + uniform_index(rng, 30);
    auto a = oracle::random_partition(n, 6, rng), b = oracle::random_partition(n, 6, rng);
    auto a2 = relabeled(a, rng), b2 = relabeled(b, rng);
    EXPECT_EQ(rand_index(a, b), rand_index(a2, b2));
    EXPECT_EQ(adjusted_rand_index(a, b), adjusted_rand_index(a2, b2));
    EXPECT_NEAR(nmi(a, b), nmi(a2, b2), 1e-12);
    EXPECT_NEAR(variation_of_information(a, b), variation_of_information(a2, b2), 1e-12);
    EXPECT_EQ(split_join_distance(a, b), split_join_distance(a2, b2));
  }
}

TEST(FunctionalProperties, MatchBruteForce) {
  Rng rng(4);
  for (int i = 0; i < 200; ++i) {
    auto n = 2 + uniform_index(rng, 11);
    auto a = oracle::random_partition(n, 5, rng), b = oracle::random_partition(n, 5, rng);
    EXPECT_EQ(rand_index(a, b), oracle::rand_index(a, b));
    EXPECT_NEAR(adjusted_rand_index(a, b), oracle::adjusted_rand_index(a, b), 1e-12);
    EXPECT_EQ(split_join_distance(a, b), oracle::split_join(a, b));
    EXPECT_NEAR(nmi(a, b), oracle::nmi(a, b), 1e-12);
    EXPECT_NEAR(variation_of_information(a, b), oracle::variation_of_information(a, b), 1e-12);
  }
}

TEST(FunctionalProperties, VariationOfInformationIsAMetric) {
  Rng rng(5);
  for (int i = 0; i < 100; ++i) {
    auto n = 2 + uniform_index(rng, 20);
    auto x = oracle::random_partition(n, 5, rng), y = oracle::random_partition(n, 5, rng),
         z = oracle::random_partition(n, 5, rng);
    EXPECT_EQ(variation_of_information(x, x), 0.0);
    if (variation_of_information(x, y) == 0.0) {
      EXPECT_EQ(x, y);
    }
    EXPECT_NEAR(variation_of_information(x, y), variation_of_information(y, x), 1e-12);
    EXPECT_LE(variation_of_information(x, z), variation_of_information(x, y) + variation_of_information(y, z) + 1e-12);
  }
}

TEST(FunctionalProperties, RangesHold) {
  Rng rng(6);
  for (int i = 0; i < 200; ++i) {
    auto n = 2 + uniform_index(rng, 30);
    auto a = oracle::random_partition(n, 8, rng), b = oracle::random_partition(n, 8, rng);
    for (auto m : kAllFunctionalMetrics) {
      double s = similarity(m, a, b);
      EXPECT_LE(s, 1.0 + 1e-12) << to_string(m);
      EXPECT_GE(s, m == FunctionalMetric::ARI ? -1.0 : -1e-12) << to_string(m);
    }
  }
}
