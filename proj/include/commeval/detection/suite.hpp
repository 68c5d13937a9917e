#pragma once

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstdint>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <optional>
#include <thread>
#include <vector>

#include "commeval/detection/eigenvector.hpp"
#include "commeval/detection/girvan_newman.hpp"
#include "commeval/detection/greedy.hpp"
#include "commeval/detection/infomap.hpp"
#include "commeval/detection/label_propagation.hpp"
#include "commeval/detection/louvain.hpp"
#include "commeval/detection/types.hpp"
#include "commeval/detection/walktrap.hpp"

namespace commeval {

struct DetectionConfig {
  std::vector<Algorithm> algorithms{std::begin(kAllAlgorithms), std::end(kAllAlgorithms)};
  int replications = 30;  // runs per non-deterministic algorithm
  std::uint64_t base_seed = 1;
  int walk_length = kDefaultWalkLength;
  std::uint64_t louvain_seed = kDefaultLouvainSeed;
  // 0 picks from CONSENSUS_COMM_THREADS, then the hardware.
  unsigned threads = 0;

  void validate() const {
    if (algorithms.empty()) throw InvalidInput("no detection algorithm selected");
    if (replications < 1) throw InvalidInput("replications must be at least 1");
    if (walk_length < 1) throw InvalidInput("walk length must be at least 1");
  }
};

inline DetectionResult run_algorithm(const Graph& g, Algorithm a, std::uint64_t seed,
                                     const DetectionConfig& cfg = {}) {
  auto start = std::chrono::steady_clock::now();
  DetectionResult r;
  switch (a) {
    case Algorithm::LM: r = louvain(g, seed); break;
    case Algorithm::GM: r = greedy_modularity(g); break;
    case Algorithm::LE: r = leading_eigenvector(g); break;
    case Algorithm::LP: r = label_propagation(g, seed); break;
    case Algorithm::GN: r = girvan_newman(g); break;
    case Algorithm::WT: r = walktrap(g, cfg.walk_length, seed); break;
    case Algorithm::IM: r = infomap(g, seed); break;
  }
  r.seed = seed;
  r.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return r;
}

inline unsigned worker_count(unsigned requested) {
  if (requested > 0) return requested;
  if (const char* env = std::getenv("CONSENSUS_COMM_THREADS")) {
    char* end = nullptr;
    unsigned long v = std::strtoul(env, &end, 10);
    if (end != env && *end == '\0' && v > 0) return static_cast<unsigned>(v);
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

// Deterministic algorithms run once (LM with cfg.louvain_seed, the rest seed
// 0); the others once per seed base_seed .. base_seed + R - 1. Output is
// ordered by (algorithm, seed) whatever order the runs finish in.
inline std::vector<DetectionResult> run_suite(const Graph& g, const DetectionConfig& cfg) {
  cfg.validate();
  std::vector<Algorithm> algs = cfg.algorithms;
  std::sort(algs.begin(), algs.end());
  algs.erase(std::unique(algs.begin(), algs.end()), algs.end());

  struct Job {
    Algorithm algorithm;
    std::uint64_t seed;
  };
  std::vector<Job> jobs;
  for (auto a : algs) {
    if (is_deterministic(a)) {
      jobs.push_back({a, a == Algorithm::LM ? cfg.louvain_seed : 0});
    } else {
      for (int r = 0; r < cfg.replications; ++r) {
        jobs.push_back({a, cfg.base_seed + static_cast<std::uint64_t>(r)});
      }
    }
  }

  std::vector<std::optional<DetectionResult>> out(jobs.size());
  std::exception_ptr failure;
  std::size_t failed_at = jobs.size();
  std::mutex failure_mutex;
  std::atomic<std::size_t> next{0};

  auto work = [&] {
    for (std::size_t i = next++; i < jobs.size(); i = next++) {
      try {
        out[i] = run_algorithm(g, jobs[i].algorithm, jobs[i].seed, cfg);
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        // Report the first failing job in canonical order.
        if (i < failed_at) {
          failed_at = i;
          failure = std::current_exception();
        }
      }
    }
  };

  const unsigned workers = std::min<unsigned>(worker_count(cfg.threads),
                                              static_cast<unsigned>(std::max<std::size_t>(1, jobs.size())));
  if (workers <= 1) {
    work();
  } else {
    std::vector<std::jthread> pool;
    for (unsigned t = 0; t < workers; ++t) pool.emplace_back(work);
  }

  if (failure) {
    const std::string alg = to_string(jobs[failed_at].algorithm);
    try {
      std::rethrow_exception(failure);
    } catch (const DetectionError&) {
      throw;
    } catch (const std::exception& e) {
      throw DetectionError(alg, e.what());
    }
  }
  std::vector<DetectionResult> results;
  results.reserve(out.size());
  for (auto& r : out) results.push_back(std::move(*r));
  return results;
}

}  // namespace commeval
