#pragma once

// Partition similarity measured against another partition of the same node
// set. Every measure here goes through one contingency table.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "commeval/error.hpp"
#include "commeval/graph.hpp"

namespace commeval {

class ContingencyTable {
 public:
  struct Cell {
    Label row;
    Label col;
    std::uint64_t count;
  };

  ContingencyTable(const Partition& a, const Partition& b) {
    if (a.size() != b.size()) {
      throw InvalidInput("partitions cover different node sets (" + std::to_string(a.size()) +
                         " vs " + std::to_string(b.size()) + " nodes)");
    }
    n_ = a.size();
    rows_.assign(a.community_count(), 0);
    cols_.assign(b.community_count(), 0);
    std::vector<std::uint64_t> keys(n_);
    for (std::size_t i = 0; i < n_; ++i) {
      ++rows_[a[static_cast<NodeIndex>(i)]];
      ++cols_[b[static_cast<NodeIndex>(i)]];
      keys[i] = (static_cast<std::uint64_t>(a[static_cast<NodeIndex>(i)]) << 32) |
                b[static_cast<NodeIndex>(i)];
    }
    std::sort(keys.begin(), keys.end());
    for (std::size_t i = 0; i < keys.size();) {
      std::size_t j = i;
      while (j < keys.size() && keys[j] == keys[i]) ++j;
      cells_.push_back({static_cast<Label>(keys[i] >> 32),
                        static_cast<Label>(keys[i] & 0xffffffffu), j - i});
      i = j;
    }
  }

  std::uint64_t total() const noexcept { return n_; }
  const std::vector<std::uint64_t>& row_sums() const noexcept { return rows_; }
  const std::vector<std::uint64_t>& col_sums() const noexcept { return cols_; }
  // Nonzero cells in (row, col) order.
  const std::vector<Cell>& cells() const noexcept { return cells_; }

  std::uint64_t at(Label row, Label col) const {
    auto it = std::lower_bound(cells_.begin(), cells_.end(), std::pair{row, col},
                               [](const Cell& c, std::pair<Label, Label> k) {
                                 return std::pair{c.row, c.col} < k;
                               });
    return (it != cells_.end() && it->row == row && it->col == col) ? it->count : 0;
  }

 private:
  std::uint64_t n_ = 0;
  std::vector<std::uint64_t> rows_;
  std::vector<std::uint64_t> cols_;
  std::vector<Cell> cells_;
};

inline ContingencyTable contingency(const Partition& a, const Partition& b) {
  return ContingencyTable(a, b);
}

namespace detail {

inline std::uint64_t choose2(std::uint64_t x) { return x < 2 ? 0 : x * (x - 1) / 2; }

struct PairCounts {
  std::uint64_t together_both = 0;  // sum C(n_ij, 2)
  std::uint64_t together_a = 0;     // sum C(a_i, 2)
  std::uint64_t together_b = 0;     // sum C(b_j, 2)
  std::uint64_t pairs = 0;          // C(n, 2)
};

inline PairCounts pair_counts(const ContingencyTable& t) {
  PairCounts pc;
  for (const auto& c : t.cells()) pc.together_both += choose2(c.count);
  for (auto a : t.row_sums()) pc.together_a += choose2(a);
  for (auto b : t.col_sums()) pc.together_b += choose2(b);
  pc.pairs = choose2(t.total());
  return pc;
}

struct Entropies {
  double h_a = 0.0;
  double h_b = 0.0;
  double mutual = 0.0;
};

// Natural log throughout.
inline Entropies entropies(const ContingencyTable& t) {
  Entropies e;
  const auto n = static_cast<double>(t.total());
  if (t.total() == 0) return e;
  for (auto a : t.row_sums()) {
    double p = static_cast<double>(a) / n;
    if (p > 0) e.h_a -= p * std::log(p);
  }
  for (auto b : t.col_sums()) {
    double p = static_cast<double>(b) / n;
    if (p > 0) e.h_b -= p * std::log(p);
  }
  for (const auto& c : t.cells()) {
    double nij = static_cast<double>(c.count);
    double ai = static_cast<double>(t.row_sums()[c.row]);
    double bj = static_cast<double>(t.col_sums()[c.col]);
    e.mutual += nij / n * std::log(nij * n / (ai * bj));
  }
  e.mutual = std::max(0.0, e.mutual);
  return e;
}

}  // namespace detail

// Fraction of node pairs on which both partitions agree (co-clustered in
// both, or separated in both).
inline double rand_index(const Partition& a, const Partition& b) {
  ContingencyTable t(a, b);
  if (t.total() < 2) throw InvalidInput("Rand index needs at least 2 nodes");
  auto pc = detail::pair_counts(t);
  // agreements = pairs + 2*both - A - B, computed without underflow.
  std::uint64_t agree = pc.pairs + 2 * pc.together_both - pc.together_a - pc.together_b;
  return static_cast<double>(agree) / static_cast<double>(pc.pairs);
}

// Permutation-model ARI. When the maximum equals the expectation the index is
// 1 if the observed count equals the expectation too, 0 otherwise.
inline double adjusted_rand_index(const Partition& a, const Partition& b) {
  ContingencyTable t(a, b);
  if (t.total() < 2) throw InvalidInput("adjusted Rand index needs at least 2 nodes");
  auto pc = detail::pair_counts(t);
  const double index = static_cast<double>(pc.together_both);
  const double expected = static_cast<double>(pc.together_a) *
                          static_cast<double>(pc.together_b) / static_cast<double>(pc.pairs);
  const double maximum = 0.5 * (static_cast<double>(pc.together_a) + static_cast<double>(pc.together_b));
  if (maximum == expected) return index == expected ? 1.0 : 0.0;
  return (index - expected) / (maximum - expected);
}

// Arithmetic-mean normalization 2I / (H_a + H_b).
inline double nmi(const Partition& a, const Partition& b) {
  ContingencyTable t(a, b);
  auto e = detail::entropies(t);
  const bool za = e.h_a <= 0.0;
  const bool zb = e.h_b <= 0.0;
  if (za && zb) return 1.0;
  if (za || zb) return 0.0;
  return std::clamp(2.0 * e.mutual / (e.h_a + e.h_b), 0.0, 1.0);
}

// VI = H(a|b) + H(b|a), in nats. Summed per cell so identical partitions
// give exactly 0.
inline double variation_of_information(const Partition& a, const Partition& b) {
  ContingencyTable t(a, b);
  const auto n = static_cast<double>(t.total());
  double vi = 0.0;
  for (const auto& c : t.cells()) {
    double nij = static_cast<double>(c.count);
    double ai = static_cast<double>(t.row_sums()[c.row]);
    double bj = static_cast<double>(t.col_sums()[c.col]);
    vi -= nij / n * (std::log(nij / ai) + std::log(nij / bj));
  }
  return std::max(0.0, vi);
}

// van Dongen: 2n - sum of best row overlaps - sum of best column overlaps.
inline std::uint64_t split_join_distance(const Partition& a, const Partition& b) {
  ContingencyTable t(a, b);
  std::vector<std::uint64_t> best_row(t.row_sums().size(), 0);
  std::vector<std::uint64_t> best_col(t.col_sums().size(), 0);
  for (const auto& c : t.cells()) {
    best_row[c.row] = std::max(best_row[c.row], c.count);
    best_col[c.col] = std::max(best_col[c.col], c.count);
  }
  std::uint64_t covered = 0;
  for (auto x : best_row) covered += x;
  for (auto x : best_col) covered += x;
  return 2 * t.total() - covered;
}

// Similarity-oriented forms used by the consensus layer: both in [0, 1],
// higher means more alike.
inline double vi_similarity(const Partition& a, const Partition& b) {
  if (a.size() < 2) return 1.0;
  double vi = variation_of_information(a, b);
  return std::clamp(1.0 - vi / std::log(static_cast<double>(a.size())), 0.0, 1.0);
}

inline double sjd_similarity(const Partition& a, const Partition& b) {
  if (a.size() == 0) return 1.0;
  double sjd = static_cast<double>(split_join_distance(a, b));
  return 1.0 - sjd / (2.0 * static_cast<double>(a.size()));
}

enum class FunctionalMetric { RI, ARI, NMI, VI, SJD };

inline constexpr FunctionalMetric kAllFunctionalMetrics[] = {
    FunctionalMetric::RI, FunctionalMetric::ARI, FunctionalMetric::NMI, FunctionalMetric::VI,
    FunctionalMetric::SJD};

inline std::string to_string(FunctionalMetric m) {
  switch (m) {
    case FunctionalMetric::RI: return "RI";
    case FunctionalMetric::ARI: return "ARI";
    case FunctionalMetric::NMI: return "NMI";
    case FunctionalMetric::VI: return "VI*";
    case FunctionalMetric::SJD: return "SJD*";
  }
  return "?";
}

inline FunctionalMetric parse_functional_metric(std::string_view s) {
  if (s == "RI") return FunctionalMetric::RI;
  if (s == "ARI") return FunctionalMetric::ARI;
  if (s == "NMI") return FunctionalMetric::NMI;
  if (s == "VI" || s == "VI*") return FunctionalMetric::VI;
  if (s == "SJD" || s == "SJD*") return FunctionalMetric::SJD;
  throw InvalidInput("unknown functional metric '" + std::string(s) + "'");
}

// Similarity on the [0, 1]-or-(-1, 1] higher-is-better scale.
inline double similarity(FunctionalMetric m, const Partition& a, const Partition& b) {
  switch (m) {
    case FunctionalMetric::RI: return rand_index(a, b);
    case FunctionalMetric::ARI: return adjusted_rand_index(a, b);
    case FunctionalMetric::NMI: return nmi(a, b);
    case FunctionalMetric::VI: return vi_similarity(a, b);
    case FunctionalMetric::SJD: return sjd_similarity(a, b);
  }
  return 0.0;
}

}  // namespace commeval
