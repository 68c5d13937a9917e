// Acceptance checks: one PASS/FAIL line per criterion. Exit status is the
// number of failed criteria.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <set>
#include <sstream>

#include "commeval/pipeline.hpp"
#include "commeval/synth.hpp"
#include "oracles.hpp"

using namespace commeval;
namespace fs = std::filesystem;

namespace {

std::string data(const std::string& name) { return std::string(COMMEVAL_DATA_DIR) + "/" + name; }

fs::path scratch(const std::string& name) {
  auto p = fs::temp_directory_path() / ("commeval_acceptance_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string fmt(double x) { return detail::format_double(x); }

// Collects failed checks for one criterion.
struct Check {
  std::vector<std::string> failures;
  std::vector<std::string> notes;

  void expect(bool ok, const std::string& what) {
    if (!ok) failures.push_back(what);
  }
  void note(const std::string& s) { notes.push_back(s); }
};

int failed = 0;

void criterion(int id, const std::string& title, double limit_seconds, const std::function<void(Check&)>& body) {
  Check c;
  auto t0 = std::chrono::steady_clock::now();
  try {
    body(c);
  } catch (const std::exception& e) {
    c.failures.push_back(std::string("exception: ") + e.what());
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  if (limit_seconds > 0.0) c.expect(secs < limit_seconds, "runtime " + fmt(secs) + " s over " + fmt(limit_seconds) + " s");
  const bool ok = c.failures.empty();
  if (!ok) ++failed;
  std::printf("%s %d %s (%.2f s)\n", ok ? "PASS" : "FAIL", id, title.c_str(), secs);
  for (const auto& f : c.failures) std::printf("    fail: %s\n", f.c_str());
  for (const auto& n : c.notes) std::printf("    note: %s\n", n.c_str());
  std::fflush(stdout);
}

std::map<Algorithm, double> mean_truth_nmi(const std::vector<DetectionResult>& runs, const Partition& truth) {
  std::map<Algorithm, std::vector<double>> per;
  for (const auto& r : runs) per[r.algorithm].push_back(nmi(r.partition, truth));
  std::map<Algorithm, double> out;
  for (const auto& [a, v] : per) out[a] = summarize(v).mean;
  return out;
}

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

const std::vector<FunctionalMetric> kMetrics(std::begin(kAllFunctionalMetrics), std::end(kAllFunctionalMetrics));

}  // namespace

int main() {
  criterion(1, "karate anchor", 5.0, [](Check& c) {
    auto g = read_edge_list(data("karate.edges"));
    c.expect(g.node_count() == 34, "|V| = " + std::to_string(g.node_count()));
    c.expect(g.edge_count() == 78, "|E| = " + std::to_string(g.edge_count()));
    auto truth = read_partition(data("karate.groundtruth"), g);
    auto sizes = truth.community_sizes();
    std::sort(sizes.begin(), sizes.end());
    c.expect(sizes == std::vector<std::size_t>{16, 18}, "ground-truth sizes");
    const double q = modularity(g, truth);
    c.expect(std::abs(q - 0.3715) <= 5e-4, "ground-truth Q = " + fmt(q));
    const double lm = *louvain(g).objective;
    c.expect(lm >= 0.40, "Louvain Q = " + fmt(lm));
    c.note("ground-truth Q " + fmt(q) + ", Louvain Q " + fmt(lm));
  });

  criterion(2, "karate divergence scenario", 0.0, [](Check& c) {
    PipelineConfig cfg;
    cfg.graph_path = data("karate.edges");
    cfg.truth_path = data("karate.groundtruth");
    auto b = run_pipeline(cfg).bundle;
    const auto& rep = *b.consensus;
    c.expect(rep.rankings.size() == 8, "rankings emitted: " + std::to_string(rep.rankings.size()));
    const MetricRanking* q = nullptr;
    const MetricRanking* ri = nullptr;
    for (const auto& r : rep.rankings) {
      if (r.metric == kModularity) q = &r;
      if (r.metric == "RI") ri = &r;
    }
    c.expect(q && ri, "modularity and RI rankings present");
    bool seen = false;
    for (const auto& d : rep.divergences) {
      c.expect(d.flagged == (d.tau < rep.thresholds.divergence), "flag rule for " + d.functional_metric);
      if (d.functional_metric == "RI") {
        seen = true;
        c.expect(!q || !ri || (q->order != ri->order) || !d.flagged, "identical rankings flagged");
        c.note("modularity vs RI tau " + fmt(d.tau) + (d.flagged ? ", flagged" : ", not flagged"));
      }
    }
    c.expect(seen, "RI divergence entry");

    auto s = rank_by(kModularity, {{Algorithm::LM, 0.42}, {Algorithm::WT, 0.37}, {Algorithm::GN, 0.40}});
    auto f = rank_by("RI", {{Algorithm::LM, 0.60}, {Algorithm::WT, 0.85}, {Algorithm::GN, 0.70}});
    c.expect(divergence_score(s, f).flagged, "constructed disagreement not flagged");

    const auto wq = rep.winners.at(kModularity), wri = rep.winners.at("RI");
    c.note("max-modularity winner " + to_string(wq) + ", max-RI winner " + to_string(wri) +
           (wq != wri ? " (differ)" : " (same)"));
    c.note("verdict " + to_string(rep.verdict));
  });

  criterion(3, "metric oracle equivalence", 10.0, [](Check& c) {
    Rng rng(3);
    int bad = 0;
    for (int i = 0; i < 200; ++i) {
      auto n = 2 + uniform_index(rng, 11);
      auto a = oracle::random_partition(n, 5, rng), b = oracle::random_partition(n, 5, rng);
      bad += rand_index(a, b) != oracle::rand_index(a, b);
      bad += adjusted_rand_index(a, b) != oracle::adjusted_rand_index(a, b);
      bad += split_join_distance(a, b) != oracle::split_join(a, b);
      bad += std::abs(nmi(a, b) - oracle::nmi(a, b)) > 1e-12;
      bad += std::abs(variation_of_information(a, b) - oracle::variation_of_information(a, b)) > 1e-12;
    }
    c.expect(bad == 0, std::to_string(bad) + " mismatches");
  });

  criterion(4, "VI metric axioms", 0.0, [](Check& c) {
    Rng rng(4);
    int bad = 0;
    for (int i = 0; i < 100; ++i) {
      auto n = 2 + uniform_index(rng, 20);
      auto x = oracle::random_partition(n, 5, rng), y = oracle::random_partition(n, 5, rng),
           z = oracle::random_partition(n, 5, rng);
      const double xy = variation_of_information(x, y), yx = variation_of_information(y, x);
      bad += std::abs(xy - yx) > 1e-12;
      bad += std::abs(variation_of_information(x, x)) > 1e-12;
      bad += (xy <= 1e-12) != (x == y);
      bad += variation_of_information(x, z) > xy + variation_of_information(y, z) + 1e-12;
    }
    c.expect(bad == 0, std::to_string(bad) + " violations");
  });

  criterion(5, "planted-partition consensus", 60.0, [](Check& c) {
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
      auto lg = planted_partition({{32, 32, 32, 32}, 0.3, 0.01, 2, seed});
      DetectionConfig cfg;
      cfg.base_seed = seed;
      auto runs = run_suite(lg.graph, cfg);
      auto rep = consensus_verdict(lg.graph, runs, &lg.truth, kMetrics);
      double worst = 1.0;
      Algorithm worst_alg = Algorithm::LM;
      for (const auto& [a, v] : mean_truth_nmi(runs, lg.truth)) {
        if (v < worst) {
          worst = v;
          worst_alg = a;
        }
        c.expect(v >= 0.9, "seed " + std::to_string(seed) + " " + to_string(a) + " NMI " + fmt(v));
      }
      c.expect(rep.verdict == Verdict::Consensus, "seed " + std::to_string(seed) + " verdict " + to_string(rep.verdict));
      c.expect(rep.mean_pairwise_nmi >= 0.9, "seed " + std::to_string(seed) + " pairwise NMI " + fmt(rep.mean_pairwise_nmi));
      c.note("seed " + std::to_string(seed) + ": lowest NMI " + to_string(worst_alg) + " " + fmt(worst) +
             ", pairwise " + fmt(rep.mean_pairwise_nmi));
    }
  });

  criterion(6, "bias-control reproduction", 90.0, [](Check& c) {
    auto lg = planted_partition({{32, 32, 32, 32}, 0.3, 0.01, 2, 1});
    auto noisy = inject_sporadic_noise(lg.graph, lg.truth, 2.0, 1);
    auto restored = recurrence_filter(noisy.stream, {2, true});
    c.expect(edge_set(restored.graph) == edge_set(lg.graph), "filtered edge set differs from the original");

    auto dir = scratch("bias");
    std::ofstream(dir / "stream.temporal", std::ios::binary) << save_temporal(noisy.stream);
    std::ofstream(dir / "truth.txt", std::ios::binary) << save_partition(lg.graph, lg.truth);
    PipelineConfig cfg;
    cfg.command = Command::Diagnose;
    cfg.temporal_path = (dir / "stream.temporal").string();
    cfg.truth_path = (dir / "truth.txt").string();
    auto b = run_pipeline(cfg).bundle;
    c.expect(b.control.has_value() && b.bias.has_value(), "control record and diagnosis present");
    if (!b.control || !b.bias) return;
    double lowest_raw = 1.0;
    for (const auto& a : b.control->algorithms) {
      const double raw = a.raw[FunctionalMetric::NMI], filtered = a.filtered[FunctionalMetric::NMI];
      lowest_raw = std::min(lowest_raw, raw);
      c.expect(filtered >= 0.9, to_string(a.algorithm) + " filtered NMI " + fmt(filtered));
      c.note(to_string(a.algorithm) + ": raw NMI " + fmt(raw) + ", filtered " + fmt(filtered));
    }
    c.expect(lowest_raw < 0.8, "no algorithm dropped below 0.8 on raw data");
    c.expect(b.bias->data.status == BiasStatus::Confirmed, "data bias " + to_string(b.bias->data.status));
  });

  criterion(7, "determinism and replication variance", 0.0, [](Check& c) {
    auto g = read_edge_list(data("karate.edges"));
    DetectionConfig cfg;
    cfg.algorithms = {Algorithm::LM, Algorithm::GM, Algorithm::LE, Algorithm::GN};
    std::map<Algorithm, std::vector<double>> q;
    for (int rep = 0; rep < 10; ++rep) {
      for (const auto& r : run_suite(g, cfg)) q[r.algorithm].push_back(modularity(g, r.partition));
    }
    for (const auto& [a, v] : q) {
      c.expect(summarize(v).variance == 0.0, to_string(a) + " variance over repeated executions");
    }

    PipelineConfig pc;
    pc.graph_path = data("karate.edges");
    pc.detection.replications = 30;
    auto b = run_pipeline(pc).bundle;
    for (const auto& row : b.plot) {
      if (is_deterministic(row.algorithm)) {
        c.expect(row.variance == 0.0, to_string(row.algorithm) + " " + row.quantity + " variance " + fmt(row.variance));
      } else {
        c.expect(row.runs == 30, to_string(row.algorithm) + " runs " + std::to_string(row.runs));
        c.expect(std::isfinite(row.variance) && row.variance >= 0.0, to_string(row.algorithm) + " variance field");
        if (row.quantity == "modularity") c.note(to_string(row.algorithm) + " modularity variance " + fmt(row.variance));
      }
    }
  });

  criterion(8, "exhaustive optimization oracle", 0.0, [](Check& c) {
    Rng rng(7);
    int lm_bad = 0, gm_bad = 0;
    double lm_gap = 0.0, gm_gap = 0.0;
    for (int t = 0; t < 50; ++t) {
      auto g = oracle::random_connected_graph(3 + uniform_index(rng, 6), 0.3, rng);
      const double best = oracle::max_modularity(g).value;
      const double lm = *louvain(g).objective, gm = *greedy_modularity(g).objective;
      lm_bad += lm < best - 0.05;
      gm_bad += gm < best - 0.05;
      lm_gap = std::max(lm_gap, best - lm);
      gm_gap = std::max(gm_gap, best - gm);
    }
    c.expect(lm_bad == 0, "LM below Q_opt - 0.05 on " + std::to_string(lm_bad) + " of 50 graphs");
    c.expect(gm_bad == 0, "GM below Q_opt - 0.05 on " + std::to_string(gm_bad) + " of 50 graphs");
    c.note("largest gap LM " + fmt(lm_gap) + ", GM " + fmt(gm_gap));
    auto bridge = oracle::two_triangle_bridge();
    const double l = *infomap(bridge, 1).objective, l_min = oracle::min_map_equation(bridge).value;
    c.expect(std::abs(l - l_min) <= 1e-9, "IM L " + fmt(l) + " vs minimum " + fmt(l_min));
  });

  criterion(9, "end-to-end determinism", 0.0, [](Check& c) {
    auto a = scratch("run_a"), b = scratch("run_b");
    PipelineConfig cfg;
    cfg.graph_path = data("karate.edges");
    cfg.truth_path = data("karate.groundtruth");
    cfg.command = Command::Diagnose;
    cfg.out_dir = a.string();
    run_pipeline(cfg);
    cfg.out_dir = b.string();
    run_pipeline(cfg);
    c.expect(slurp(a / "report.json") == slurp(b / "report.json"), "report.json differs");
    c.expect(!slurp(a / "report.json").empty(), "report.json empty");
  });

  return failed;
}
