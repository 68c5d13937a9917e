#pragma once

// Undirected weighted graphs, node partitions, temporal interaction streams,
// and the text formats they are read from and written to.

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <functional>
#include <map>
#include <optional>
#include <queue>
#include <span>
#include <sstream>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "commeval/error.hpp"

namespace commeval {

using NodeIndex = std::uint32_t;
using Label = std::uint32_t;

struct Neighbor {
  NodeIndex node;
  double weight;
};

// Stored with u < v.
struct Edge {
  NodeIndex u;
  NodeIndex v;
  double weight;
};

namespace detail {

struct StringHash {
  using is_transparent = void;
  std::size_t operator()(std::string_view s) const noexcept {
    return std::hash<std::string_view>{}(s);
  }
};

inline std::uint64_t pair_key(NodeIndex u, NodeIndex v) {
  if (u > v) std::swap(u, v);
  return (static_cast<std::uint64_t>(u) << 32) | v;
}

// Splits a line into whitespace-separated tokens, dropping any '#' comment.
inline std::vector<std::string_view> tokenize(std::string_view line) {
  if (auto hash = line.find('#'); hash != std::string_view::npos) {
    line = line.substr(0, hash);
  }
  std::vector<std::string_view> tokens;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && std::isspace(static_cast<unsigned char>(line[i]))) ++i;
    std::size_t start = i;
    while (i < line.size() && !std::isspace(static_cast<unsigned char>(line[i]))) ++i;
    if (i > start) tokens.push_back(line.substr(start, i - start));
  }
  return tokens;
}

template <class Fn>
void for_each_line(std::string_view text, Fn&& fn) {
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    ++line_no;
    std::string_view line = text.substr(pos, end - pos);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    auto tokens = tokenize(line);
    if (!tokens.empty()) fn(line_no, tokens);
    if (end == text.size()) break;
    pos = end + 1;
  }
}

inline std::optional<double> parse_double(std::string_view token) {
  double value = 0.0;
  auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), value);
  if (ec != std::errc{} || ptr != token.data() + token.size()) return std::nullopt;
  return value;
}

inline std::optional<std::int64_t> parse_int(std::string_view token) {
  std::int64_t value = 0;
  auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), value);
  if (ec != std::errc{} || ptr != token.data() + token.size()) return std::nullopt;
  return value;
}

// Shortest round-trip representation.
inline std::string format_double(double value) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, ptr);
}

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InvalidInput("cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace detail

class Graph {
 public:
  class Builder;

  Graph() = default;

  std::size_t node_count() const noexcept { return names_.size(); }
  std::size_t edge_count() const noexcept { return edges_.size(); }
  double total_weight() const noexcept { return total_weight_; }

  std::span<const Edge> edges() const noexcept { return edges_; }
  std::span<const Neighbor> neighbors(NodeIndex v) const {
    return {adjacency_.data() + offsets_[v], adjacency_.data() + offsets_[v + 1]};
  }
  std::size_t degree(NodeIndex v) const { return offsets_[v + 1] - offsets_[v]; }
  double strength(NodeIndex v) const { return strength_[v]; }
  std::span<const double> strengths() const noexcept { return strength_; }

  const std::string& name(NodeIndex v) const { return names_[v]; }
  std::span<const std::string> names() const noexcept { return names_; }
  std::optional<NodeIndex> find(std::string_view name) const {
    auto it = index_.find(name);
    if (it == index_.end()) return std::nullopt;
    return it->second;
  }

  // Weight of edge (u, v), 0 when absent. Binary search over the sorted row.
  double weight(NodeIndex u, NodeIndex v) const {
    auto row = neighbors(u);
    auto it = std::lower_bound(row.begin(), row.end(), v,
                               [](const Neighbor& n, NodeIndex x) { return n.node < x; });
    return (it != row.end() && it->node == v) ? it->weight : 0.0;
  }

  bool is_weighted() const noexcept {
    return std::any_of(edges_.begin(), edges_.end(),
                       [](const Edge& e) { return e.weight != 1.0; });
  }

  // Same nodes and edges, every weight set to 1.
  Graph binarized() const;

 private:
  std::vector<std::string> names_;
  std::unordered_map<std::string, NodeIndex, detail::StringHash, std::equal_to<>> index_;
  std::vector<Edge> edges_;
  std::vector<std::size_t> offsets_{0};
  std::vector<Neighbor> adjacency_;
  std::vector<double> strength_;
  double total_weight_ = 0.0;
};

// Accumulates nodes and edges; duplicate edges sum their weights. Node
// indices follow insertion order.
class Graph::Builder {
 public:
  NodeIndex add_node(std::string_view name) {
    if (auto it = index_.find(name); it != index_.end()) return it->second;
    auto idx = static_cast<NodeIndex>(names_.size());
    names_.emplace_back(name);
    index_.emplace(names_.back(), idx);
    return idx;
  }

  void add_edge(NodeIndex u, NodeIndex v, double weight = 1.0) {
    if (u == v) throw InvalidInput("self-loop on node '" + names_.at(u) + "'");
    if (!(weight > 0.0) || !std::isfinite(weight)) {
      throw InvalidInput("edge weight must be positive and finite");
    }
    if (u >= names_.size() || v >= names_.size()) throw InvalidInput("edge endpoint not declared");
    auto key = detail::pair_key(u, v);
    auto [it, inserted] = weights_.try_emplace(key, 0.0);
    if (inserted) order_.push_back(key);
    it->second += weight;
  }

  void add_edge(std::string_view u, std::string_view v, double weight = 1.0) {
    if (u == v) throw InvalidInput("self-loop on node '" + std::string(u) + "'");
    NodeIndex a = add_node(u);
    NodeIndex b = add_node(v);
    add_edge(a, b, weight);
  }

  std::size_t node_count() const noexcept { return names_.size(); }

  Graph build() &&;

 private:
  std::vector<std::string> names_;
  std::unordered_map<std::string, NodeIndex, detail::StringHash, std::equal_to<>> index_;
  std::unordered_map<std::uint64_t, double> weights_;
  std::vector<std::uint64_t> order_;
};

inline Graph Graph::Builder::build() && {
  Graph g;
  g.names_ = std::move(names_);
  g.index_ = std::move(index_);
  std::sort(order_.begin(), order_.end());
  g.edges_.reserve(order_.size());
  for (auto key : order_) {
    g.edges_.push_back({static_cast<NodeIndex>(key >> 32),
                        static_cast<NodeIndex>(key & 0xffffffffu), weights_.at(key)});
  }
  const std::size_t n = g.names_.size();
  std::vector<std::size_t> deg(n, 0);
  for (const auto& e : g.edges_) {
    ++deg[e.u];
    ++deg[e.v];
  }
  g.offsets_.assign(n + 1, 0);
  for (std::size_t i = 0; i < n; ++i) g.offsets_[i + 1] = g.offsets_[i] + deg[i];
  g.adjacency_.resize(g.offsets_[n]);
  g.strength_.assign(n, 0.0);
  std::vector<std::size_t> fill(g.offsets_.begin(), g.offsets_.end() - 1);
  for (const auto& e : g.edges_) {
    g.adjacency_[fill[e.u]++] = {e.v, e.weight};
    g.adjacency_[fill[e.v]++] = {e.u, e.weight};
    g.strength_[e.u] += e.weight;
    g.strength_[e.v] += e.weight;
    g.total_weight_ += e.weight;
  }
  for (std::size_t i = 0; i < n; ++i) {
    std::sort(g.adjacency_.begin() + static_cast<std::ptrdiff_t>(g.offsets_[i]),
              g.adjacency_.begin() + static_cast<std::ptrdiff_t>(g.offsets_[i + 1]),
              [](const Neighbor& a, const Neighbor& b) { return a.node < b.node; });
  }
  return g;
}

inline Graph Graph::binarized() const {
  Builder b;
  for (const auto& name : names_) b.add_node(name);
  for (const auto& e : edges_) b.add_edge(e.u, e.v, 1.0);
  return std::move(b).build();
}

// Total assignment of nodes to communities. Labels are renumbered by first
// appearance, so two partitions compare equal iff they group nodes alike.
class Partition {
 public:
  Partition() = default;

  explicit Partition(std::span<const Label> raw) : labels_(raw.size()) {
    std::unordered_map<Label, Label> remap;
    for (std::size_t i = 0; i < raw.size(); ++i) {
      auto [it, inserted] = remap.try_emplace(raw[i], static_cast<Label>(remap.size()));
      labels_[i] = it->second;
    }
    count_ = remap.size();
  }
  explicit Partition(const std::vector<Label>& raw) : Partition(std::span<const Label>(raw)) {}

  static Partition singletons(std::size_t n) {
    std::vector<Label> l(n);
    for (std::size_t i = 0; i < n; ++i) l[i] = static_cast<Label>(i);
    return Partition(l);
  }
  static Partition whole(std::size_t n) { return Partition(std::vector<Label>(n, 0)); }

  std::size_t size() const noexcept { return labels_.size(); }
  std::size_t community_count() const noexcept { return count_; }
  Label operator[](NodeIndex v) const { return labels_[v]; }
  std::span<const Label> labels() const noexcept { return labels_; }

  std::vector<std::vector<NodeIndex>> communities() const {
    std::vector<std::vector<NodeIndex>> out(count_);
    for (std::size_t i = 0; i < labels_.size(); ++i) {
      out[labels_[i]].push_back(static_cast<NodeIndex>(i));
    }
    return out;
  }

  std::vector<std::size_t> community_sizes() const {
    std::vector<std::size_t> sizes(count_, 0);
    for (auto l : labels_) ++sizes[l];
    return sizes;
  }

  friend bool operator==(const Partition&, const Partition&) = default;

 private:
  std::vector<Label> labels_;
  std::size_t count_ = 0;
};

struct Interaction {
  std::string u;
  std::string v;
  std::int64_t time = 0;
};

// Timestamped pairwise interactions, kept sorted by time (stable).
class TemporalStream {
 public:
  TemporalStream() = default;
  explicit TemporalStream(std::vector<Interaction> events) : events_(std::move(events)) {
    for (const auto& e : events_) validate(e);
    std::stable_sort(events_.begin(), events_.end(),
                     [](const Interaction& a, const Interaction& b) { return a.time < b.time; });
  }

  std::span<const Interaction> events() const noexcept { return events_; }
  std::size_t size() const noexcept { return events_.size(); }
  bool empty() const noexcept { return events_.empty(); }

 private:
  static void validate(const Interaction& e) {
    if (e.u == e.v) throw InvalidInput("interaction of node '" + e.u + "' with itself");
    if (e.time < 0) throw InvalidInput("negative timestamp");
  }

  std::vector<Interaction> events_;
};

// ---------------------------------------------------------------------------
// Text formats

// "u v [w]" per line, '#' comments, a lone "u" declares an isolated node.
inline Graph load_edge_list(std::string_view text) {
  Graph::Builder b;
  detail::for_each_line(text, [&](std::size_t line, const std::vector<std::string_view>& tok) {
    if (tok.size() > 3) throw ParseError(line, "expected 'u v [weight]'");
    if (tok.size() == 1) {
      b.add_node(tok[0]);
      return;
    }
    double w = 1.0;
    if (tok.size() == 3) {
      auto parsed = detail::parse_double(tok[2]);
      if (!parsed) throw ParseError(line, "invalid weight '" + std::string(tok[2]) + "'");
      if (!(*parsed > 0.0) || !std::isfinite(*parsed)) {
        throw ParseError(line, "weight must be positive");
      }
      w = *parsed;
    }
    if (tok[0] == tok[1]) throw ParseError(line, "self-loop on '" + std::string(tok[0]) + "'");
    b.add_edge(tok[0], tok[1], w);
  });
  return std::move(b).build();
}

inline Graph read_edge_list(const std::string& path) {
  return load_edge_list(detail::read_file(path));
}

// Isolated nodes are written as single-token lines; weights are omitted when
// the graph is unweighted.
inline std::string save_edge_list(const Graph& g) {
  std::string out;
  const bool weighted = g.is_weighted();
  for (NodeIndex v = 0; v < g.node_count(); ++v) {
    if (g.degree(v) == 0) out += g.name(v) + "\n";
  }
  for (const auto& e : g.edges()) {
    out += g.name(e.u);
    out += ' ';
    out += g.name(e.v);
    if (weighted) {
      out += ' ';
      out += detail::format_double(e.weight);
    }
    out += '\n';
  }
  return out;
}

// "u v t" per line.
inline TemporalStream load_temporal(std::string_view text) {
  std::vector<Interaction> events;
  detail::for_each_line(text, [&](std::size_t line, const std::vector<std::string_view>& tok) {
    if (tok.size() != 3) throw ParseError(line, "expected 'u v timestamp'");
    auto t = detail::parse_int(tok[2]);
    if (!t) throw ParseError(line, "invalid timestamp '" + std::string(tok[2]) + "'");
    if (*t < 0) throw ParseError(line, "negative timestamp");
    if (tok[0] == tok[1]) throw ParseError(line, "self-interaction on '" + std::string(tok[0]) + "'");
    events.push_back({std::string(tok[0]), std::string(tok[1]), *t});
  });
  return TemporalStream(std::move(events));
}

inline TemporalStream read_temporal(const std::string& path) {
  return load_temporal(detail::read_file(path));
}

inline std::string save_temporal(const TemporalStream& s) {
  std::string out;
  for (const auto& e : s.events()) {
    out += e.u + ' ' + e.v + ' ' + std::to_string(e.time) + '\n';
  }
  return out;
}

// "node label" per line; every graph node exactly once.
inline Partition load_partition(std::string_view text, const Graph& g) {
  constexpr Label kUnset = static_cast<Label>(-1);
  std::vector<Label> labels(g.node_count(), kUnset);
  std::unordered_map<std::string, Label, detail::StringHash, std::equal_to<>> label_ids;
  detail::for_each_line(text, [&](std::size_t line, const std::vector<std::string_view>& tok) {
    if (tok.size() != 2) throw ParseError(line, "expected 'node label'");
    auto node = g.find(tok[0]);
    if (!node) throw ParseError(line, "node '" + std::string(tok[0]) + "' is not in the graph");
    if (labels[*node] != kUnset) {
      throw ParseError(line, "node '" + std::string(tok[0]) + "' assigned twice");
    }
    auto it = label_ids.find(tok[1]);
    if (it == label_ids.end()) {
      it = label_ids.emplace(std::string(tok[1]), static_cast<Label>(label_ids.size())).first;
    }
    labels[*node] = it->second;
  });
  for (NodeIndex v = 0; v < labels.size(); ++v) {
    if (labels[v] == kUnset) throw InvalidInput("node '" + g.name(v) + "' has no community label");
  }
  return Partition(labels);
}

inline Partition read_partition(const std::string& path, const Graph& g) {
  return load_partition(detail::read_file(path), g);
}

inline std::string save_partition(const Graph& g, const Partition& p) {
  if (p.size() != g.node_count()) throw InvalidInput("partition does not cover the graph");
  std::string out;
  for (NodeIndex v = 0; v < g.node_count(); ++v) {
    out += g.name(v) + ' ' + std::to_string(p[v]) + '\n';
  }
  return out;
}

// Carries a partition across graphs by node name. Nodes of `to` that are
// absent from `from` are an error.
inline Partition transfer_partition(const Graph& from, const Partition& p, const Graph& to) {
  std::vector<Label> labels(to.node_count());
  for (NodeIndex v = 0; v < to.node_count(); ++v) {
    auto src = from.find(to.name(v));
    if (!src) throw InvalidInput("node '" + to.name(v) + "' is not covered by the partition");
    labels[v] = p[*src];
  }
  return Partition(labels);
}

// ---------------------------------------------------------------------------
// Construction from interactions

// One edge per interacting pair, weighted by the number of interactions.
inline Graph aggregate_temporal(const TemporalStream& stream) {
  if (stream.empty()) throw InvalidInput("empty temporal stream");
  Graph::Builder b;
  for (const auto& e : stream.events()) b.add_edge(e.u, e.v, 1.0);
  return std::move(b).build();
}

// Inverse of aggregate_temporal for integer-weighted graphs: edge (u, v) of
// weight w becomes w interactions. Timestamps are assigned round-robin.
inline TemporalStream expand_to_stream(const Graph& g) {
  std::vector<Interaction> events;
  std::int64_t t = 0;
  for (const auto& e : g.edges()) {
    double rounded = std::round(e.weight);
    if (rounded != e.weight) throw InvalidInput("edge weights must be integers to expand");
    for (std::int64_t k = 0; k < static_cast<std::int64_t>(rounded); ++k) {
      events.push_back({g.name(e.u), g.name(e.v), t++});
    }
  }
  return TemporalStream(std::move(events));
}

// Same node names and the same weighted edges, irrespective of index order.
inline bool equivalent(const Graph& a, const Graph& b) {
  if (a.node_count() != b.node_count() || a.edge_count() != b.edge_count()) return false;
  for (NodeIndex v = 0; v < a.node_count(); ++v) {
    if (!b.find(a.name(v))) return false;
  }
  for (const auto& e : a.edges()) {
    auto u = *b.find(a.name(e.u));
    auto v = *b.find(a.name(e.v));
    if (b.weight(u, v) != e.weight) return false;
  }
  return true;
}

// ---------------------------------------------------------------------------
// Statistics

inline Partition connected_components(const Graph& g) {
  constexpr Label kUnset = static_cast<Label>(-1);
  std::vector<Label> labels(g.node_count(), kUnset);
  Label next = 0;
  std::vector<NodeIndex> stack;
  for (NodeIndex s = 0; s < g.node_count(); ++s) {
    if (labels[s] != kUnset) continue;
    labels[s] = next;
    stack.push_back(s);
    while (!stack.empty()) {
      NodeIndex v = stack.back();
      stack.pop_back();
      for (const auto& nb : g.neighbors(v)) {
        if (labels[nb.node] == kUnset) {
          labels[nb.node] = next;
          stack.push_back(nb.node);
        }
      }
    }
    ++next;
  }
  return Partition(labels);
}

struct NetworkStats {
  std::size_t node_count = 0;
  std::size_t edge_count = 0;
  std::size_t max_degree = 0;
  std::size_t min_degree = 0;
  double density = 0.0;
  double clustering = 0.0;  // global transitivity
  std::size_t component_count = 0;
  double total_weight = 0.0;

  bool operator==(const NetworkStats&) const = default;
};

inline NetworkStats network_stats(const Graph& g) {
  const std::size_t n = g.node_count();
  if (n < 2) throw InvalidInput("network statistics need at least 2 nodes");
  NetworkStats s;
  s.node_count = n;
  s.edge_count = g.edge_count();
  s.total_weight = g.total_weight();
  s.min_degree = g.degree(0);
  for (NodeIndex v = 0; v < n; ++v) {
    s.max_degree = std::max(s.max_degree, g.degree(v));
    s.min_degree = std::min(s.min_degree, g.degree(v));
  }
  s.density = 2.0 * static_cast<double>(s.edge_count) /
              (static_cast<double>(n) * static_cast<double>(n - 1));

  // Triangles counted once each: edge (u, v) with a common neighbor w > v.
  std::uint64_t triangles = 0;
  std::uint64_t triples = 0;
  for (NodeIndex v = 0; v < n; ++v) {
    std::uint64_t d = g.degree(v);
    if (d >= 2) triples += d * (d - 1) / 2;
  }
  for (const auto& e : g.edges()) {
    auto a = g.neighbors(e.u);
    auto b = g.neighbors(e.v);
    auto ia = a.begin();
    auto ib = b.begin();
    while (ia != a.end() && ib != b.end()) {
      if (ia->node < ib->node) {
        ++ia;
      } else if (ib->node < ia->node) {
        ++ib;
      } else {
        if (ia->node > e.v) ++triangles;
        ++ia;
        ++ib;
      }
    }
  }
  s.clustering = triples == 0 ? 0.0 : 3.0 * static_cast<double>(triangles) / static_cast<double>(triples);
  s.component_count = connected_components(g).community_count();
  return s;
}

}  // namespace commeval
