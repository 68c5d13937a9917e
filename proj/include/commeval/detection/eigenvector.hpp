#pragma once

// Recursive spectral bisection on the generalized modularity matrix
// (Newman 2006):
//   B(g)_ij = A_ij - k_i k_j / 2m - delta_ij * sum_{l in g} B_il
// A group is split by the signs of the leading eigenvector of B(g), refined
// by single-vertex moves, as long as the split increases modularity.

#include <algorithm>
#include <cmath>
#include <deque>
#include <string>
#include <vector>

#include "commeval/detection/types.hpp"
#include "commeval/random.hpp"
#include "commeval/structural.hpp"

namespace commeval {

struct EigenvectorOptions {
  double tolerance = 1e-10;
  int max_iterations = 10000;
};

namespace detail {

class GroupModularityMatrix {
 public:
  GroupModularityMatrix(const Graph& g, const std::vector<NodeIndex>& members)
      : g_(g), members_(members), local_(g.node_count(), kOutside), m2_(2.0 * g.total_weight()) {
    for (std::size_t i = 0; i < members_.size(); ++i) local_[members_[i]] = static_cast<NodeIndex>(i);
    const std::size_t n = members_.size();
    k_.resize(n);
    double k_group = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      k_[i] = g.strength(members_[i]);
      k_group += k_[i];
    }
    // sum_{l in g} B_il = k_i^(g) - k_i K_g / 2m
    diag_.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
      double inside = 0.0;
      for (const auto& nb : g.neighbors(members_[i])) {
        if (local_[nb.node] != kOutside) inside += nb.weight;
      }
      diag_[i] = inside - k_[i] * k_group / m2_;
    }
  }

  std::size_t size() const { return members_.size(); }

  // Column j of B(g), written into `col`.
  void column(std::size_t j, std::vector<double>& col) const {
    const std::size_t n = size();
    for (std::size_t i = 0; i < n; ++i) col[i] = -k_[i] * k_[j] / m2_;
    for (const auto& nb : g_.neighbors(members_[j])) {
      auto i = local_[nb.node];
      if (i != kOutside) col[i] += nb.weight;
    }
    col[j] -= diag_[j];
  }

  double diagonal(std::size_t i) const { return -k_[i] * k_[i] / m2_ - diag_[i]; }

  // y = B(g) x
  void apply(const std::vector<double>& x, std::vector<double>& y) const {
    const std::size_t n = size();
    double kx = 0.0;
    for (std::size_t i = 0; i < n; ++i) kx += k_[i] * x[i];
    for (std::size_t i = 0; i < n; ++i) {
      double ax = 0.0;
      for (const auto& nb : g_.neighbors(members_[i])) {
        auto j = local_[nb.node];
        if (j != kOutside) ax += nb.weight * x[j];
      }
      y[i] = ax - k_[i] * kx / m2_ - diag_[i] * x[i];
    }
  }

  // Largest absolute row sum; bounds the spectral radius.
  double max_abs_row_sum() const {
    const std::size_t n = size();
    double best = 0.0;
    std::vector<double> a_row(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
      for (const auto& nb : g_.neighbors(members_[i])) {
        auto j = local_[nb.node];
        if (j != kOutside) a_row[j] = nb.weight;
      }
      double sum = 0.0;
      for (std::size_t j = 0; j < n; ++j) {
        double b = a_row[j] - k_[i] * k_[j] / m2_ - (i == j ? diag_[i] : 0.0);
        sum += std::abs(b);
      }
      best = std::max(best, sum);
      for (const auto& nb : g_.neighbors(members_[i])) {
        auto j = local_[nb.node];
        if (j != kOutside) a_row[j] = 0.0;
      }
    }
    return best;
  }

 private:
  static constexpr NodeIndex kOutside = static_cast<NodeIndex>(-1);
  const Graph& g_;
  const std::vector<NodeIndex>& members_;
  std::vector<NodeIndex> local_;
  std::vector<double> k_;
  std::vector<double> diag_;
  double m2_;
};

inline double dot(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

struct LeadingPair {
  double value = 0.0;
  std::vector<double> vector;
};

// Power iteration on B + cI with c the largest absolute row sum, which makes
// the shifted matrix positive semidefinite so the dominant eigenpair is the
// leading one of B.
inline LeadingPair leading_eigenpair(const GroupModularityMatrix& b, const EigenvectorOptions& opt) {
  const std::size_t n = b.size();
  const double shift = b.max_abs_row_sum();
  Rng rng(0x5eed);
  std::vector<double> x(n), y(n);
  for (auto& v : x) v = 0.5 + uniform_unit(rng);
  double norm = std::sqrt(dot(x, x));
  for (auto& v : x) v /= norm;

  int it = 0;
  double change = 0.0;
  for (; it < opt.max_iterations; ++it) {
    b.apply(x, y);
    for (std::size_t i = 0; i < n; ++i) y[i] += shift * x[i];
    norm = std::sqrt(dot(y, y));
    if (norm == 0.0) break;  // B = -cI: every vector is an eigenvector
    change = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      y[i] /= norm;
      change = std::max(change, std::abs(y[i] - x[i]));
    }
    x.swap(y);
    if (change < opt.tolerance) break;
  }
  b.apply(x, y);
  LeadingPair out;
  out.value = dot(x, y);
  if (it == opt.max_iterations) {
    double residual = 0.0;
    for (std::size_t i = 0; i < n; ++i) residual += (y[i] - out.value * x[i]) * (y[i] - out.value * x[i]);
    throw DetectionError("LE", "power iteration did not converge after " +
                                   std::to_string(opt.max_iterations) +
                                   " iterations (residual " + std::to_string(std::sqrt(residual)) + ")");
  }
  out.vector = std::move(x);
  return out;
}

// Vertex-moving refinement of a bisection: each sweep flips every vertex
// once, greedily picking the flip with the best change in s^T B s, and keeps
// the best intermediate state. Sweeps repeat while they improve the split.
inline void refine_split(const GroupModularityMatrix& b, std::vector<double>& s) {
  const std::size_t n = s.size();
  std::vector<double> bs(n), col(n);
  while (true) {
    b.apply(s, bs);
    double score = dot(s, bs);
    std::vector<double> trial = s;
    std::vector<bool> moved(n, false);
    double best_score = score;
    std::vector<double> best = s;
    for (std::size_t step = 0; step < n; ++step) {
      std::size_t pick = n;
      double pick_gain = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        if (moved[i]) continue;
        // Flipping s_i changes s^T B s by -4 s_i (Bs)_i + 4 B_ii.
        double gain = -4.0 * trial[i] * bs[i] + 4.0 * b.diagonal(i);
        if (pick == n || gain > pick_gain) {
          pick = i;
          pick_gain = gain;
        }
      }
      b.column(pick, col);
      for (std::size_t j = 0; j < n; ++j) bs[j] -= 2.0 * trial[pick] * col[j];
      trial[pick] = -trial[pick];
      moved[pick] = true;
      score += pick_gain;
      if (score > best_score + 1e-12) {
        best_score = score;
        best = trial;
      }
    }
    if (best == s) return;
    s = std::move(best);
  }
}

}  // namespace detail

inline DetectionResult leading_eigenvector(const Graph& g, const EigenvectorOptions& opt = {}) {
  detail::require_edges(g, Algorithm::LE);
  const double m = g.total_weight();
  std::vector<Label> labels(g.node_count(), 0);
  Label next_label = 1;

  std::deque<std::vector<NodeIndex>> pending;
  {
    std::vector<NodeIndex> all(g.node_count());
    for (std::size_t v = 0; v < all.size(); ++v) all[v] = static_cast<NodeIndex>(v);
    pending.push_back(std::move(all));
  }
  while (!pending.empty()) {
    auto members = std::move(pending.front());
    pending.pop_front();
    if (members.size() < 2) continue;
    detail::GroupModularityMatrix b(g, members);
    auto lead = detail::leading_eigenpair(b, opt);
    if (lead.value <= opt.tolerance) continue;

    std::vector<double> s(members.size());
    for (std::size_t i = 0; i < s.size(); ++i) s[i] = lead.vector[i] >= 0.0 ? 1.0 : -1.0;
    detail::refine_split(b, s);
    auto positive = static_cast<std::size_t>(std::count(s.begin(), s.end(), 1.0));
    if (positive == 0 || positive == s.size()) continue;
    std::vector<double> bs(s.size());
    b.apply(s, bs);
    double gain = detail::dot(s, bs) / (4.0 * m);
    if (gain <= 1e-12) continue;

    std::vector<NodeIndex> left, right;
    const Label fresh = next_label++;
    for (std::size_t i = 0; i < s.size(); ++i) {
      if (s[i] > 0) {
        left.push_back(members[i]);
      } else {
        right.push_back(members[i]);
        labels[members[i]] = fresh;
      }
    }
    pending.push_back(std::move(left));
    pending.push_back(std::move(right));
  }

  DetectionResult r;
  r.algorithm = Algorithm::LE;
  r.partition = Partition(labels);
  r.objective = modularity(g, r.partition);
  return r;
}

}  // namespace commeval
