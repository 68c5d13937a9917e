#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "commeval/error.hpp"
#include "commeval/graph.hpp"

namespace commeval {

// Declaration order is the canonical ordering of results.
enum class Algorithm { LM, GM, LE, LP, GN, WT, IM };

inline constexpr Algorithm kAllAlgorithms[] = {Algorithm::LM, Algorithm::GM, Algorithm::LE,
                                               Algorithm::LP, Algorithm::GN, Algorithm::WT,
                                               Algorithm::IM};

inline std::string to_string(Algorithm a) {
  switch (a) {
    case Algorithm::LM: return "LM";
    case Algorithm::GM: return "GM";
    case Algorithm::LE: return "LE";
    case Algorithm::LP: return "LP";
    case Algorithm::GN: return "GN";
    case Algorithm::WT: return "WT";
    case Algorithm::IM: return "IM";
  }
  return "?";
}

inline Algorithm parse_algorithm(std::string_view s) {
  for (auto a : kAllAlgorithms) {
    if (to_string(a) == s) return a;
  }
  throw InvalidInput("unknown algorithm '" + std::string(s) + "'");
}

// Deterministic algorithms run once per suite; the others once per seed.
inline bool is_deterministic(Algorithm a) {
  return a == Algorithm::LM || a == Algorithm::GM || a == Algorithm::LE || a == Algorithm::GN;
}

struct DetectionResult {
  Algorithm algorithm = Algorithm::LM;
  std::uint64_t seed = 0;
  Partition partition;
  double wall_time = 0.0;  // seconds
  // Modularity for LM/GM/LE/GN/WT, map-equation codelength (bits) for IM.
  std::optional<double> objective;
};

struct DendrogramLevel {
  Partition partition;
  double modularity = 0.0;
  std::string event;
};

// Level 0 is the starting partition; each further level records one event.
struct Dendrogram {
  std::vector<DendrogramLevel> levels;

  // First level with the highest modularity.
  std::size_t best_level() const {
    std::size_t best = 0;
    for (std::size_t i = 1; i < levels.size(); ++i) {
      if (levels[i].modularity > levels[best].modularity + 1e-12) best = i;
    }
    return best;
  }
};

namespace detail {

inline void require_edges(const Graph& g, Algorithm a) {
  if (g.edge_count() == 0 || !(g.total_weight() > 0.0)) {
    throw DetectionError(to_string(a), "graph has no edges");
  }
}

}  // namespace detail

}  // namespace commeval
