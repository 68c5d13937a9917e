#pragma once

// load -> (filter) -> detect -> evaluate -> control -> diagnose -> serialize

#include <filesystem>
#include <fstream>
#include <optional>
#include <string>
#include <vector>

#include "commeval/bias.hpp"
#include "commeval/consensus.hpp"
#include "commeval/detection/suite.hpp"
#include "commeval/report.hpp"

namespace commeval {

class PipelineError : public Error {
 public:
  PipelineError(std::string stage, const std::string& what)
      : Error(stage + ": " + what), stage_(std::move(stage)), detail_(what) {}

  const std::string& stage() const noexcept { return stage_; }
  const std::string& detail() const noexcept { return detail_; }

 private:
  std::string stage_;
  std::string detail_;
};

enum class Command { Detect, Evaluate, Diagnose };

inline std::string to_string(Command c) {
  switch (c) {
    case Command::Detect: return "detect";
    case Command::Evaluate: return "evaluate";
    case Command::Diagnose: return "diagnose";
  }
  return "detect";
}

enum class ReportFormat { Json, Csv };

struct PipelineConfig {
  Command command = Command::Evaluate;
  std::optional<std::string> graph_path;
  std::optional<std::string> temporal_path;
  std::optional<std::string> truth_path;
  DetectionConfig detection;
  std::vector<FunctionalMetric> metrics{std::begin(kAllFunctionalMetrics), std::end(kAllFunctionalMetrics)};
  FilterConfig filter;
  bool filter_input = false;  // filter a temporal input before detection
  bool binarize = false;
  PipelineThresholds thresholds;
  std::string out_dir;  // empty: compute only, write nothing
  ReportFormat format = ReportFormat::Json;

  void validate() const {
    if (graph_path.has_value() == temporal_path.has_value()) {
      throw InvalidInput("exactly one of a graph or a temporal stream must be given");
    }
    detection.validate();
    filter.validate();
    if (metrics.empty()) throw InvalidInput("no functional metric selected");
    if (command != Command::Detect) {
      auto algs = detection.algorithms;
      std::sort(algs.begin(), algs.end());
      if (std::unique(algs.begin(), algs.end()) - algs.begin() < 2) {
        throw InvalidInput(to_string(command) + " needs at least 2 algorithms");
      }
    }
  }
};

struct PipelineResult {
  ReportBundle bundle;
  std::vector<double> wall_times;  // aligned with bundle.runs; not part of the report body
};

namespace detail {

template <typename F>
auto stage(const char* name, F&& f) -> decltype(f()) {
  try {
    return f();
  } catch (const PipelineError&) {
    throw;
  } catch (const std::exception& e) {
    throw PipelineError(name, e.what());
  }
}

inline std::string csv_row(const std::vector<std::string>& cells) {
  std::string out;
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (i) out += ',';
    out += cells[i];
  }
  return out + "\n";
}

inline std::string run_file_name(const RunRecord& r) {
  return "partitions/" + to_string(r.algorithm) + "_" + std::to_string(r.seed) + ".txt";
}

}  // namespace detail

// ---------------------------------------------------------------------------
// CSV side tables

inline std::string runs_csv(const ReportBundle& b) {
  using detail::format_double;
  std::string out = detail::csv_row(
      {"run", "algorithm", "seed", "communities", "modularity", "conductance_mean", "density_mean", "objective"});
  for (const auto& r : b.runs) {
    out += detail::csv_row({r.id, to_string(r.algorithm), std::to_string(r.seed), std::to_string(r.community_count),
                            format_double(r.modularity), format_double(r.conductance_mean),
                            format_double(r.density_mean), r.objective ? format_double(*r.objective) : ""});
  }
  return out;
}

inline std::string plot_csv(const ReportBundle& b) {
  using detail::format_double;
  std::string out =
      detail::csv_row({"algorithm", "quantity", "runs", "min", "q1", "median", "q3", "max", "variance", "truth"});
  for (const auto& p : b.plot) {
    out += detail::csv_row({to_string(p.algorithm), p.quantity, std::to_string(p.runs), format_double(p.summary.min),
                            format_double(p.summary.q1), format_double(p.summary.median),
                            format_double(p.summary.q3), format_double(p.summary.max), format_double(p.variance),
                            p.truth ? format_double(*p.truth) : ""});
  }
  return out;
}

inline std::string matrix_csv(const ConsensusReport& c, const EvidenceMatrix& m) {
  std::vector<std::string> head{"run"};
  head.insert(head.end(), c.run_ids.begin(), c.run_ids.end());
  std::string out = detail::csv_row(head);
  for (std::size_t i = 0; i < m.values.size(); ++i) {
    std::vector<std::string> row{c.run_ids[i]};
    for (double v : m.values[i]) row.push_back(detail::format_double(v));
    out += detail::csv_row(row);
  }
  return out;
}

inline std::string rankings_csv(const ConsensusReport& c) {
  std::string out = detail::csv_row({"metric", "rank", "algorithm", "score", "tied"});
  for (const auto& r : c.rankings) {
    for (std::size_t i = 0; i < r.order.size(); ++i) {
      bool tied = false;
      for (const auto& [x, y] : r.ties) tied = tied || x == r.order[i] || y == r.order[i];
      out += detail::csv_row({r.metric, std::to_string(i + 1), to_string(r.order[i]),
                              detail::format_double(r.scores[i]), tied ? "1" : "0"});
    }
  }
  return out;
}

inline std::string truth_csv(const ConsensusReport& c) {
  const auto& t = *c.ground_truth;
  std::vector<std::string> head{"run"};
  for (auto m : t.metrics) head.push_back(to_string(m));
  std::string out = detail::csv_row(head);
  for (std::size_t i = 0; i < t.rows.size(); ++i) {
    std::vector<std::string> row{c.run_ids[i]};
    for (double v : t.rows[i]) row.push_back(detail::format_double(v));
    out += detail::csv_row(row);
  }
  return out;
}

inline std::string control_csv(const ControlRecord& rec) {
  std::vector<std::string> head{"algorithm"};
  for (auto m : kAllFunctionalMetrics) {
    head.push_back("raw_" + to_string(m));
    head.push_back("filtered_" + to_string(m));
  }
  for (const char* d : {"delta_modularity", "delta_conductance", "delta_density", "delta_community_count"}) {
    head.emplace_back(d);
  }
  std::string out = detail::csv_row(head);
  for (const auto& a : rec.algorithms) {
    std::vector<std::string> row{to_string(a.algorithm)};
    for (auto m : kAllFunctionalMetrics) {
      row.push_back(detail::format_double(a.raw[m]));
      row.push_back(detail::format_double(a.filtered[m]));
    }
    for (double d : {a.delta_modularity, a.delta_conductance, a.delta_density, a.delta_community_count}) {
      row.push_back(detail::format_double(d));
    }
    out += detail::csv_row(row);
  }
  return out;
}

// Flat key/value digest used as the primary output in CSV mode.
inline std::string summary_csv(const ReportBundle& b) {
  using detail::format_double;
  std::string out = detail::csv_row({"key", "value"});
  auto put = [&](const std::string& k, const std::string& v) { out += detail::csv_row({k, v}); };
  put("schema_version", std::to_string(b.metadata.schema_version));
  put("command", b.metadata.command);
  put("nodes", std::to_string(b.network.node_count));
  put("edges", std::to_string(b.network.edge_count));
  put("runs", std::to_string(b.runs.size()));
  if (b.truth) put("truth_modularity", format_double(b.truth->modularity));
  if (b.consensus) {
    put("verdict", to_string(b.consensus->verdict));
    put("mean_pairwise_nmi", format_double(b.consensus->mean_pairwise_nmi));
    if (b.consensus->mean_truth_nmi) put("mean_truth_nmi", format_double(*b.consensus->mean_truth_nmi));
    for (const auto& [metric, a] : b.consensus->winners) put("winner:" + metric, to_string(a));
    for (const auto& d : b.consensus->divergences) {
      put("tau:" + d.structural_metric + "/" + d.functional_metric, format_double(d.tau));
    }
  }
  if (b.bias) {
    put("data_bias", to_string(b.bias->data.status));
    put("ground_truth_bias", to_string(b.bias->ground_truth.status));
    put("method_bias", to_string(b.bias->method.status));
  }
  return out;
}

// Side tables (and the partitions) keyed by relative path.
inline std::vector<std::pair<std::string, std::string>> side_tables(const ReportBundle& b) {
  std::vector<std::pair<std::string, std::string>> files;
  files.emplace_back("runs.csv", runs_csv(b));
  files.emplace_back("plot_data.csv", plot_csv(b));
  if (b.consensus) {
    files.emplace_back("rankings.csv", rankings_csv(*b.consensus));
    for (const auto& m : b.consensus->matrices) {
      std::string name = to_string(m.metric);
      if (name.back() == '*') name.pop_back();
      files.emplace_back("matrix_" + name + ".csv", matrix_csv(*b.consensus, m));
    }
    if (b.consensus->ground_truth) files.emplace_back("truth_similarity.csv", truth_csv(*b.consensus));
  }
  if (b.control) files.emplace_back("control.csv", control_csv(*b.control));
  return files;
}

// ---------------------------------------------------------------------------
// Output

// Writes every output file; on failure removes what was written.
inline void write_outputs(ReportBundle& b, const std::vector<double>& wall_times, const std::string& dir,
                          ReportFormat format) {
  namespace fs = std::filesystem;
  std::vector<fs::path> written;
  const fs::path root(dir);
  auto put = [&](const std::string& rel, const std::string& body) {
    fs::path p = root / rel;
    fs::create_directories(p.parent_path());
    written.push_back(p);
    std::ofstream out(p, std::ios::binary);
    out << body;
    if (!out) throw Error("cannot write " + p.string());
  };
  try {
    fs::create_directories(root);
    fs::remove(root / "error.json");

    std::vector<std::pair<std::string, std::string>> files;
    for (const auto& r : b.runs) {
      std::string body;
      for (std::size_t v = 0; v < r.labels.size(); ++v) {
        body += b.nodes[v] + " " + std::to_string(r.labels[v]) + "\n";
      }
      files.emplace_back(r.partition_file, std::move(body));
    }
    for (auto& f : side_tables(b)) files.push_back(std::move(f));
    std::string timings = detail::csv_row({"run", "seconds"});
    for (std::size_t i = 0; i < b.runs.size() && i < wall_times.size(); ++i) {
      timings += detail::csv_row({b.runs[i].id, detail::format_double(wall_times[i])});
    }
    files.emplace_back("timings.csv", timings);
    files.emplace_back(format == ReportFormat::Json ? "report.json" : "summary.csv", "");

    b.files.clear();
    for (const auto& [rel, body] : files) b.files.push_back(rel);
    for (const auto& [rel, body] : files) {
      if (rel == "report.json") {
        put(rel, serialize(b));
      } else if (rel == "summary.csv") {
        put(rel, summary_csv(b));
      } else {
        put(rel, body);
      }
    }
  } catch (...) {
    std::error_code ec;
    for (const auto& p : written) fs::remove(p, ec);
    fs::remove(root / "partitions", ec);  // only succeeds when empty
    throw;
  }
}

// ---------------------------------------------------------------------------
// Orchestration

inline PipelineResult run_pipeline(const PipelineConfig& cfg) {
  detail::stage("config", [&] { cfg.validate(); });

  struct Inputs {
    Graph raw;
    Graph graph;
    std::optional<TemporalStream> stream;
    std::optional<Partition> raw_truth;
    std::optional<Partition> truth;
    std::optional<FilterSummary> filter;
  };
  auto in = detail::stage("load", [&] {
    Inputs x;
    if (cfg.graph_path) {
      x.raw = read_edge_list(*cfg.graph_path);
    } else {
      x.stream = read_temporal(*cfg.temporal_path);
      x.raw = aggregate_temporal(*x.stream);
    }
    if (cfg.binarize) x.raw = x.raw.binarized();
    x.graph = x.raw;
    if (cfg.truth_path) x.raw_truth = read_partition(*cfg.truth_path, x.raw);
    return x;
  });

  if (cfg.filter_input && in.stream) {
    detail::stage("filter", [&] {
      auto f = recurrence_filter(*in.stream, cfg.filter);
      if (f.empty) throw InvalidInput("recurrence filter removed every edge");
      in.graph = cfg.binarize ? f.graph.binarized() : std::move(f.graph);
      in.filter = FilterSummary{cfg.filter, f.pairs_kept, f.pairs_dropped, f.nodes_dropped};
    });
  }
  if (in.raw_truth) in.truth = detail::stage("load", [&] { return transfer_partition(in.raw, *in.raw_truth, in.graph); });

  const Graph& g = in.graph;
  auto runs = detail::stage("detect", [&] { return run_suite(g, cfg.detection); });

  PipelineResult out;
  ReportBundle& b = out.bundle;
  detail::stage("evaluate", [&] {
    auto& m = b.metadata;
    m.command = to_string(cfg.command);
    m.input_kind = cfg.graph_path ? "graph" : "temporal";
    m.algorithms = cfg.detection.algorithms;
    std::sort(m.algorithms.begin(), m.algorithms.end());
    m.algorithms.erase(std::unique(m.algorithms.begin(), m.algorithms.end()), m.algorithms.end());
    m.metrics = cfg.metrics;
    m.replications = cfg.detection.replications;
    m.base_seed = cfg.detection.base_seed;
    m.louvain_seed = cfg.detection.louvain_seed;
    m.walk_length = cfg.detection.walk_length;
    m.binarized = cfg.binarize;
    m.thresholds = cfg.thresholds;

    b.network = network_stats(g);
    b.nodes.assign(g.names().begin(), g.names().end());
    if (in.truth) b.truth = TruthSummary{partition_stats(g, *in.truth), modularity(g, *in.truth)};
    b.filter = in.filter;
    for (const auto& r : runs) {
      RunRecord rec;
      rec.id = run_id(r);
      rec.algorithm = r.algorithm;
      rec.seed = r.seed;
      auto ev = structural_evidence(g, r.partition);
      rec.community_count = ev.stats.community_count;
      rec.modularity = ev.modularity;
      rec.conductance_mean = ev.conductance_mean;
      rec.density_mean = ev.density_mean;
      rec.objective = r.objective;
      rec.labels.assign(r.partition.labels().begin(), r.partition.labels().end());
      rec.partition_file = detail::run_file_name(rec);
      b.runs.push_back(std::move(rec));
      out.wall_times.push_back(r.wall_time);
    }
    b.plot = plot_rows(b.runs, b.truth);
    if (cfg.command != Command::Detect) {
      ConsensusThresholds ct{cfg.thresholds.consensus, cfg.thresholds.divergence};
      b.consensus = consensus_verdict(g, runs, in.truth ? &*in.truth : nullptr, cfg.metrics, ct);
    }
  });

  if (cfg.command == Command::Diagnose) {
    if (in.stream && in.raw_truth) {
      b.control = detail::stage("control", [&] {
        auto f = recurrence_filter(*in.stream, cfg.filter);
        if (f.empty) throw InvalidInput("recurrence filter removed every edge");
        b.filter = FilterSummary{cfg.filter, f.pairs_kept, f.pairs_dropped, f.nodes_dropped};
        Graph filtered = cfg.binarize ? f.graph.binarized() : std::move(f.graph);
        const bool same_graph = !cfg.filter_input;
        return bias_control_experiment(in.raw, filtered, *in.raw_truth, cfg.detection, cfg.thresholds.improvement,
                                       same_graph ? &runs : nullptr);
      });
    }
    b.bias = detail::stage("diagnose", [&] {
      BiasThresholds bt{cfg.thresholds.consensus, cfg.thresholds.functional, cfg.thresholds.improvement};
      return diagnose(*b.consensus, b.control ? &*b.control : nullptr, bt);
    });
  }

  if (!cfg.out_dir.empty()) {
    detail::stage("serialize", [&] { write_outputs(b, out.wall_times, cfg.out_dir, cfg.format); });
  }
  return out;
}

// Writes error.json into `dir`, best effort.
inline void write_error_record(const std::string& dir, const std::string& stage, const std::string& message) {
  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(dir, ec);
  std::ofstream out(fs::path(dir) / "error.json", std::ios::binary);
  Json j;
  j["error"] = {{"stage", stage}, {"message", message}};
  out << j.dump(2) << "\n";
}

}  // namespace commeval
