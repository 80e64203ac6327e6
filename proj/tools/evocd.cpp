// Command-line front end: graph generation, evolution, detection, scoring and
// the benchmark protocols.

#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "evocd/algorithms.hpp"
#include "evocd/errors.hpp"
#include "evocd/graph_io.hpp"
#include "evocd/harness.hpp"
#include "evocd/lfr.hpp"
#include "evocd/metrics.hpp"
#include "evocd/transforms.hpp"

namespace {

using namespace evocd;

struct Common {
  std::optional<std::uint64_t> seed;
  std::string config;
  std::string out;
  std::string profile = "desk";
  bool serial = false;
  bool series = false;
  bool paper_scale = false;
  std::string algo;
  std::optional<double> alpha;
  std::optional<double> theta_q;
};

ExperimentSpec load_spec(const Common& c) {
  ExperimentSpec spec = profile_by_name(c.paper_scale ? "paper" : c.profile);
  if (!c.config.empty()) spec = read_spec(c.config, spec);
  if (c.seed) spec.master_seed = *c.seed;
  if (c.serial) spec.serial = true;
  if (c.series) spec.keep_series = true;
  if (!c.algo.empty()) {
    AlgoConfig only;
    only.algorithm = parse_algorithm(c.algo);
    spec.algorithms = {only};
    if (only.algorithm != Algorithm::GMA) spec.algorithms.insert(spec.algorithms.begin(), AlgoConfig{});
  }
  for (AlgoConfig& a : spec.algorithms) {
    if (c.alpha) a.alpha = *c.alpha;
    if (c.theta_q) a.theta_q = *c.theta_q;
  }
  spec.validate();
  return spec;
}

AlgoConfig algo_config(const Common& c) {
  AlgoConfig cfg;
  cfg.algorithm = parse_algorithm(c.algo.empty() ? "GMA" : c.algo);
  if (c.alpha) cfg.alpha = *c.alpha;
  if (c.theta_q) cfg.theta_q = *c.theta_q;
  cfg.seed = c.seed.value_or(0);
  cfg.validate();
  return cfg;
}

void require_out(const Common& c, const char* what) {
  if (c.out.empty()) throw ConfigError(std::string("--out is required for ") + what);
}

void print_aggregate(const std::vector<AggregateRow>& rows) {
  std::printf("%-14s %-6s %-10s %8s %8s %8s %9s %s\n", "transform", "algo", "metric", "median", "ci_lo", "ci_hi",
              "gain%", "bucket");
  for (const AggregateRow& r : rows) {
    char gain[32] = "n.a.";
    if (r.gain_pct) std::snprintf(gain, sizeof gain, "%+.2f", *r.gain_pct);
    std::printf("%-14s %-6s %-10s %8.4f %8.4f %8.4f %9s %s\n", r.transform.c_str(), r.algorithm.c_str(),
                r.metric.c_str(), r.median, r.ci_lo, r.ci_hi, gain, r.bucket.c_str());
  }
}

void print_timing(const std::vector<TimingRow>& rows) {
  std::printf("%-6s %14s %9s\n", "algo", "median_s/snap", "vs_GMA");
  for (const TimingRow& r : rows) {
    std::printf("%-6s %14.6g %9s\n", r.algorithm.c_str(), r.median_seconds,
                r.relative ? std::to_string(*r.relative).c_str() : "n.a.");
  }
}

void finish_bench(const ExperimentSpec& spec, const ExperimentResult& result, const Common& c) {
  for (const std::string& w : result.warnings) std::fprintf(stderr, "warning: %s\n", w.c_str());
  if (result.records.empty()) throw AggregationError("every graph was skipped; nothing to report");
  const auto rows = aggregate(result.records);
  export_results(spec, result, rows, c.out);
  print_aggregate(rows);
  print_timing(timing_report(result.records));
  std::printf("%zu records, %zu skipped graphs, results in %s\n", result.records.size(), result.warnings.size(),
              c.out.c_str());
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Benchmark for evolutionary community detection on dynamic weighted graphs"};
  app.require_subcommand(1);
  Common c;

  auto common = [&](CLI::App* sub) {
    sub->add_option("--seed", c.seed, "Master / algorithm seed");
    sub->add_option("--out", c.out, "Output file or directory");
  };
  auto spec_flags = [&](CLI::App* sub) {
    sub->add_option("--config", c.config, "JSON config file (ExperimentSpec schema)")->check(CLI::ExistingFile);
    sub->add_option("--profile", c.profile, "desk or paper")->check(CLI::IsMember({"desk", "paper"}));
    sub->add_flag("--paper-scale", c.paper_scale, "Same as --profile paper");
  };
  auto algo_flags = [&](CLI::App* sub) {
    sub->add_option("--algo", c.algo, "GMA, aGMA, sGMA or NeGMA");
    sub->add_option("--alpha", c.alpha, "aGMA memory in [0,1)");
    sub->add_option("--theta-q", c.theta_q, "NeGMA unbind threshold");
  };

  // gen
  auto* gen = app.add_subcommand("gen", "Generate an LFR base graph (snapshot 0 and its ground truth)");
  common(gen);
  spec_flags(gen);
  // evolve
  std::string in_path;
  std::string kind_name;
  auto* evolve_cmd = app.add_subcommand("evolve", "Evolve a base graph under one transformation");
  common(evolve_cmd);
  spec_flags(evolve_cmd);
  evolve_cmd->add_option("--in", in_path, "Base graph JSON from `gen`")->required()->check(CLI::ExistingFile);
  evolve_cmd->add_option("--kind", kind_name, "Transformation (overrides the config)");
  // detect
  auto* detect = app.add_subcommand("detect", "Run one algorithm over every snapshot");
  common(detect);
  algo_flags(detect);
  detect->add_option("--in", in_path, "Dynamic graph JSON")->required()->check(CLI::ExistingFile);
  // metrics
  std::string partitions;
  int graph_id = 0, run_id = 0;
  auto* metrics = app.add_subcommand("metrics", "Score a partition series against a graph's ground truth");
  metrics->add_option("--out", c.out, "Metrics CSV (stdout when omitted)");
  metrics->add_option("--graph", in_path, "Dynamic graph JSON")->required()->check(CLI::ExistingFile);
  metrics->add_option("--partitions", partitions, "Partition CSV from `detect`")->required()->check(CLI::ExistingFile);
  metrics->add_option("--graph-id", graph_id);
  metrics->add_option("--run-id", run_id);
  metrics->add_option("--algo", c.algo, "Algorithm name written to the CSV");
  // bench / respond
  auto* bench = app.add_subcommand("bench", "Full experiment: generate, evolve, detect, score, aggregate");
  common(bench);
  spec_flags(bench);
  algo_flags(bench);
  bench->add_flag("--serial", c.serial, "Disable the worker pool");
  bench->add_flag("--series", c.series, "Also write per-snapshot S_t/K_t to series.csv");
  auto* respond = app.add_subcommand("respond", "Instantaneous-morph responsiveness protocol (N=20, tau=1, t=10)");
  common(respond);
  spec_flags(respond);
  algo_flags(respond);
  respond->add_flag("--serial", c.serial, "Disable the worker pool");
  respond->add_flag("--series", c.series, "Also write per-snapshot S_t/K_t to series.csv");
  // ingest
  double window = 1800.0;
  auto* ingest = app.add_subcommand("ingest", "Build a dynamic graph from a timestamp,node_a,node_b contact log");
  ingest->add_option("--in", in_path, "Contact CSV")->required()->check(CLI::ExistingFile);
  ingest->add_option("--window", window, "Window length in seconds")->capture_default_str();
  ingest->add_option("--out", c.out, "Dynamic graph JSON")->required();
  // report
  auto* report = app.add_subcommand("report", "Aggregate an existing runs.csv");
  report->add_option("--in", in_path, "runs.csv")->required()->check(CLI::ExistingFile);
  report->add_option("--out", c.out, "Directory for aggregate.csv");

  CLI11_PARSE(app, argc, argv);

  try {
    if (gen->parsed()) {
      require_out(c, "gen");
      ExperimentSpec spec = load_spec(c);
      LfrParams p = spec.lfr;
      p.seed = c.seed.value_or(p.seed);
      const LfrGraph g = generate_lfr(p);
      DynamicGraph dg;
      dg.snapshots.push_back(g.snapshot);
      dg.ground_truth.push_back(g.ground_truth);
      dg.meta["generator"] = "lfr";
      dg.meta["lfr_seed"] = std::to_string(p.seed);
      dg.meta["empirical_mixing"] = std::to_string(empirical_mixing(g.snapshot, g.ground_truth));
      write_dynamic_graph(dg, c.out);
    } else if (evolve_cmd->parsed()) {
      require_out(c, "evolve");
      ExperimentSpec spec = load_spec(c);
      TransformConfig tc = spec.transform;
      if (!kind_name.empty()) tc.kind = parse_transform(kind_name);
      tc.seed = c.seed.value_or(spec.master_seed);
      const DynamicGraph base = read_dynamic_graph(in_path);
      if (base.snapshots.empty() || base.ground_truth.empty()) {
        throw ConfigError("base graph needs snapshot 0 and its ground truth");
      }
      write_dynamic_graph(evolve(base.snapshots.front(), base.ground_truth.front(), tc), c.out);
    } else if (detect->parsed()) {
      require_out(c, "detect");
      const DynamicGraph g = read_dynamic_graph(in_path);
      write_partition_csv(run_sequence(g, algo_config(c)), std::filesystem::path(c.out));
    } else if (metrics->parsed()) {
      const DynamicGraph g = read_dynamic_graph(in_path);
      const PartitionSeries series = read_partition_csv(std::filesystem::path(partitions));
      const std::string transform = g.meta.contains("transform") ? g.meta.at("transform") : "none";
      const Scenario scenario = transform == "none" ? Scenario::Noise : scenario_of(parse_transform(transform));
      const int start = g.meta.contains("start") ? std::stoi(g.meta.at("start")) : 0;
      const Scores s = score_run(g, series, scenario, start);
      std::ofstream file;
      if (!c.out.empty()) {
        file.open(c.out);
        if (!file) throw IoError("cannot write " + c.out);
      }
      std::ostream& out = c.out.empty() ? std::cout : file;
      auto opt = [](const auto& v) { return v ? std::to_string(*v) : std::string(); };
      out << "graph_id,run_id,algorithm,transform,S,K,D,CP\n"
          << graph_id << ',' << run_id << ',' << (c.algo.empty() ? "?" : c.algo) << ',' << transform << ','
          << std::to_string(s.stability) << ',' << opt(s.correctness) << ',' << opt(s.delay) << ','
          << opt(s.crossing_point) << '\n';
    } else if (bench->parsed()) {
      require_out(c, "bench");
      const ExperimentSpec spec = load_spec(c);
      finish_bench(spec, run_experiment(spec), c);
    } else if (respond->parsed()) {
      require_out(c, "respond");
      ExperimentSpec spec = load_spec(c);
      if (c.config.empty()) {
        spec.kinds = {TransformKind::Merge, TransformKind::Split, TransformKind::Birth, TransformKind::Death};
      }
      finish_bench(spec, responsiveness_experiment(spec), c);
    } else if (ingest->parsed()) {
      const IngestResult r = ingest_contacts(std::filesystem::path(in_path), window);
      for (const std::string& w : r.warnings) std::fprintf(stderr, "warning: %s\n", w.c_str());
      write_dynamic_graph(r.graph, c.out);
      std::printf("%zu snapshots, %zu rejected rows\n", r.graph.snapshots.size(), r.rejected_rows);
    } else if (report->parsed()) {
      const auto records = import_runs(in_path);
      const auto rows = aggregate(records);
      if (!c.out.empty()) {
        std::filesystem::create_directories(c.out);
        std::ofstream out(std::filesystem::path(c.out) / "aggregate.csv");
        if (!out) throw IoError("cannot write aggregate.csv in " + c.out);
        write_aggregate_csv(rows, out);
      }
      print_aggregate(rows);
      print_timing(timing_report(records));
    }
  } catch (const std::exception& ex) {
    std::fprintf(stderr, "error: %s\n", ex.what());
    return 1;
  }
  return 0;
}
