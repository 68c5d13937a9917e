// commeval: run detection suites, compare their partitions, diagnose bias.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "commeval/bias.hpp"
#include "commeval/pipeline.hpp"
#include "commeval/synth.hpp"

namespace {

using namespace commeval;

struct SharedOptions {
  std::string graph;
  std::string temporal;
  std::string truth;
  std::vector<std::string> algorithms;
  std::vector<std::string> metrics;
  int replications = 30;
  std::uint64_t seed = 1;
  std::uint64_t louvain_seed = kDefaultLouvainSeed;
  int walk_length = kDefaultWalkLength;
  int min_recurrence = 2;
  bool keep_isolated = false;
  bool binarize = false;
  std::string out;
  std::string format = "json";
  PipelineThresholds thresholds;
};

void add_input_flags(CLI::App& cmd, SharedOptions& o) {
  auto* g = cmd.add_option("--graph", o.graph, "Edge list: 'u v [w]' per line");
  auto* t = cmd.add_option("--temporal", o.temporal, "Interaction stream: 'u v t' per line");
  g->excludes(t);
  t->excludes(g);
}

void add_format_flag(CLI::App& cmd, SharedOptions& o) {
  cmd.add_option("--format", o.format, "Primary report format")->check(CLI::IsMember({"json", "csv"}));
}

void add_pipeline_flags(CLI::App& cmd, SharedOptions& o) {
  add_input_flags(cmd, o);
  cmd.add_option("--ground-truth", o.truth, "Partition file: 'node community' per line");
  cmd.add_option("--algorithms", o.algorithms, "Comma-separated subset of LM,GM,LE,LP,GN,WT,IM")->delimiter(',');
  cmd.add_option("--metrics", o.metrics, "Comma-separated subset of RI,ARI,NMI,VI,SJD")->delimiter(',');
  cmd.add_option("--replications", o.replications, "Runs per non-deterministic algorithm")->capture_default_str();
  cmd.add_option("--seed", o.seed, "First seed of the replication sweep")->capture_default_str();
  cmd.add_option("--louvain-seed", o.louvain_seed, "Node-order seed of LM")->capture_default_str();
  cmd.add_option("--walk-length", o.walk_length, "Random-walk length of WT")->capture_default_str();
  cmd.add_option("--min-recurrence", o.min_recurrence, "Recurrence filter threshold k")->capture_default_str();
  cmd.add_flag("--binarize", o.binarize, "Ignore edge weights");
  cmd.add_option("--theta-consensus", o.thresholds.consensus, "Minimum mean pairwise NMI for consensus")
      ->capture_default_str();
  cmd.add_option("--theta-functional", o.thresholds.functional, "Maximum mean NMI to truth counted as low")
      ->capture_default_str();
  cmd.add_option("--delta", o.thresholds.improvement, "Minimum NMI gain confirming data bias")
      ->capture_default_str();
  cmd.add_option("--tau", o.thresholds.divergence, "Kendall tau below which rankings diverge")
      ->capture_default_str();
  cmd.add_option("--out", o.out, "Output directory")->required();
  add_format_flag(cmd, o);
}

std::optional<std::string> non_empty(const std::string& s) {
  if (s.empty()) return std::nullopt;
  return s;
}

PipelineConfig to_config(Command command, const SharedOptions& o, bool min_recurrence_given) {
  PipelineConfig cfg;
  cfg.command = command;
  cfg.graph_path = non_empty(o.graph);
  cfg.temporal_path = non_empty(o.temporal);
  cfg.truth_path = non_empty(o.truth);
  if (!o.algorithms.empty()) {
    cfg.detection.algorithms.clear();
    for (const auto& a : o.algorithms) cfg.detection.algorithms.push_back(parse_algorithm(a));
  }
  if (!o.metrics.empty()) {
    cfg.metrics.clear();
    for (const auto& m : o.metrics) cfg.metrics.push_back(parse_functional_metric(m));
  }
  cfg.detection.replications = o.replications;
  cfg.detection.base_seed = o.seed;
  cfg.detection.louvain_seed = o.louvain_seed;
  cfg.detection.walk_length = o.walk_length;
  cfg.filter.min_recurrence = o.min_recurrence;
  cfg.filter.drop_isolated = !o.keep_isolated;
  // detect/evaluate filter a temporal input only on request; diagnose keeps
  // the raw stream and filters for the control experiment.
  cfg.filter_input = command != Command::Diagnose && min_recurrence_given;
  cfg.binarize = o.binarize;
  cfg.thresholds = o.thresholds;
  cfg.out_dir = o.out;
  cfg.format = o.format == "csv" ? ReportFormat::Csv : ReportFormat::Json;
  return cfg;
}

void write_text(const std::filesystem::path& p, const std::string& body) {
  std::filesystem::create_directories(p.parent_path());
  std::ofstream out(p, std::ios::binary);
  out << body;
  if (!out) throw Error("cannot write " + p.string());
}

int fail(const std::string& out_dir, const std::string& stage, const std::string& message) {
  std::cerr << "error [" << stage << "]: " << message << "\n";
  if (!out_dir.empty()) write_error_record(out_dir, stage, message);
  return 1;
}

int run_pipeline_command(Command command, const SharedOptions& o, bool min_recurrence_given) {
  PipelineConfig cfg;
  try {
    cfg = to_config(command, o, min_recurrence_given);
  } catch (const std::exception& e) {
    return fail(o.out, "config", e.what());
  }
  try {
    auto result = run_pipeline(cfg);
    const auto& b = result.bundle;
    std::cout << b.runs.size() << " runs on " << b.network.node_count << " nodes / " << b.network.edge_count
              << " edges";
    if (b.consensus) std::cout << "; verdict " << to_string(b.consensus->verdict);
    if (b.bias) std::cout << "; data bias " << to_string(b.bias->data.status);
    std::cout << "\n";
    return 0;
  } catch (const PipelineError& e) {
    return fail(o.out, e.stage(), e.detail());
  }
}

int run_filter(const SharedOptions& o) {
  try {
    if (o.temporal.empty()) throw InvalidInput("filter needs --temporal");
    FilterConfig cfg{o.min_recurrence, !o.keep_isolated};
    auto f = recurrence_filter(read_temporal(o.temporal), cfg);
    const std::filesystem::path dir(o.out);
    std::filesystem::remove(dir / "error.json");
    write_text(dir / "filtered.edges", save_edge_list(f.graph));
    FilterSummary s{cfg, f.pairs_kept, f.pairs_dropped, f.nodes_dropped};
    if (o.format == "csv") {
      std::string body = "key,value\n";
      body += "min_recurrence," + std::to_string(cfg.min_recurrence) + "\n";
      body += "pairs_kept," + std::to_string(s.pairs_kept) + "\n";
      body += "pairs_dropped," + std::to_string(s.pairs_dropped) + "\n";
      body += "nodes_dropped," + std::to_string(s.nodes_dropped) + "\n";
      write_text(dir / "filter.csv", body);
    } else {
      Json j = s;
      j["empty"] = f.empty;
      write_text(dir / "filter.json", j.dump(2) + "\n");
    }
    std::cout << "kept " << s.pairs_kept << " pairs, dropped " << s.pairs_dropped << " pairs and " << s.nodes_dropped
              << " nodes\n";
    if (f.empty) std::cerr << "warning: every edge was removed\n";
    return 0;
  } catch (const std::exception& e) {
    return fail(o.out, "filter", e.what());
  }
}

struct GenerateOptions {
  std::vector<std::size_t> sizes{32, 32, 32, 32};
  double p_in = 0.3;
  double p_out = 0.01;
  int w_in = 2;
  double noise_rate = 0.0;
};

int run_generate(const SharedOptions& o, const GenerateOptions& gen) {
  try {
    PlantedConfig cfg;
    cfg.sizes = gen.sizes;
    cfg.p_in = gen.p_in;
    cfg.p_out = gen.p_out;
    cfg.w_in = gen.w_in;
    cfg.seed = o.seed;
    if (!cfg.has_structure()) std::cerr << "warning: p_in <= p_out gives no community structure\n";
    auto planted = planted_partition(cfg);
    const std::filesystem::path dir(o.out);
    std::filesystem::remove(dir / "error.json");
    std::size_t added = 0;
    if (gen.noise_rate > 0.0 || cfg.sizes.size() > 1) {
      auto noisy = inject_sporadic_noise(planted.graph, planted.truth, gen.noise_rate, o.seed);
      write_text(dir / "stream.temporal", save_temporal(noisy.stream));
      if (noisy.added > 0) write_text(dir / "noisy.edges", save_edge_list(noisy.graph));
      added = noisy.added;
    }
    write_text(dir / "graph.edges", save_edge_list(planted.graph));
    write_text(dir / "truth.txt", save_partition(planted.graph, planted.truth));
    std::cout << planted.graph.node_count() << " nodes, " << planted.graph.edge_count() << " edges, " << added
              << " noise edges\n";
    return 0;
  } catch (const std::exception& e) {
    return fail(o.out, "generate", e.what());
  }
}

int run_report(const SharedOptions& o) {
  try {
    const std::filesystem::path dir(o.out);
    auto bundle = parse_report(detail::read_file((dir / "report.json").string()));
    for (const auto& [rel, body] : side_tables(bundle)) write_text(dir / rel, body);
    if (o.format == "csv") {
      std::cout << summary_csv(bundle);
    } else {
      Json j;
      j["network"] = bundle.network;
      j["runs"] = bundle.runs.size();
      if (bundle.consensus) {
        j["verdict"] = bundle.consensus->verdict;
        j["winners"] = bundle.consensus->winners;
        j["divergences"] = bundle.consensus->divergences;
      }
      if (bundle.bias) j["bias"] = *bundle.bias;
      std::cout << j.dump(2) << "\n";
    }
    return 0;
  } catch (const std::exception& e) {
    // Never overwrite the record of the run being inspected.
    std::cerr << "error [report]: " << e.what() << "\n";
    return 1;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Multi-algorithm community detection evaluation"};
  app.require_subcommand(1);

  SharedOptions detect_o, evaluate_o, diagnose_o, filter_o, generate_o, report_o;
  auto* detect = app.add_subcommand("detect", "Run the detection suite and write its partitions");
  add_pipeline_flags(*detect, detect_o);
  auto* evaluate = app.add_subcommand("evaluate", "Detect, then compare runs and rank algorithms");
  add_pipeline_flags(*evaluate, evaluate_o);
  auto* diagnose = app.add_subcommand("diagnose", "Evaluate, run the filtering control, attribute bias");
  add_pipeline_flags(*diagnose, diagnose_o);

  auto* filter = app.add_subcommand("filter", "Keep recurrent pairs of an interaction stream");
  add_input_flags(*filter, filter_o);
  filter->add_option("--min-recurrence", filter_o.min_recurrence, "Minimum interaction count")
      ->capture_default_str();
  filter->add_flag("--keep-isolated", filter_o.keep_isolated, "Keep nodes left without edges");
  filter->add_option("--out", filter_o.out, "Output directory")->required();
  add_format_flag(*filter, filter_o);

  GenerateOptions gen;
  auto* generate = app.add_subcommand("generate", "Planted-partition graph with optional sporadic noise");
  generate->add_option("--sizes", gen.sizes, "Community sizes")->delimiter(',')->capture_default_str();
  generate->add_option("--p-in", gen.p_in, "Intra-community edge probability")->capture_default_str();
  generate->add_option("--p-out", gen.p_out, "Inter-community edge probability")->capture_default_str();
  generate->add_option("--w-in", gen.w_in, "Weight of generated edges")->capture_default_str();
  generate->add_option("--noise-rate", gen.noise_rate, "Noise edges per original edge")->capture_default_str();
  generate->add_option("--seed", generate_o.seed, "Generator seed")->capture_default_str();
  generate->add_option("--out", generate_o.out, "Output directory")->required();

  auto* report = app.add_subcommand("report", "Re-emit side tables and print a summary of a report");
  report->add_option("--out", report_o.out, "Directory holding report.json")->required();
  add_format_flag(*report, report_o);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  auto given = [](CLI::App* cmd) { return cmd->count("--min-recurrence") > 0; };
  if (detect->parsed()) return run_pipeline_command(Command::Detect, detect_o, given(detect));
  if (evaluate->parsed()) return run_pipeline_command(Command::Evaluate, evaluate_o, given(evaluate));
  if (diagnose->parsed()) return run_pipeline_command(Command::Diagnose, diagnose_o, given(diagnose));
  if (filter->parsed()) return run_filter(filter_o);
  if (generate->parsed()) return run_generate(generate_o, gen);
  return run_report(report_o);
}
