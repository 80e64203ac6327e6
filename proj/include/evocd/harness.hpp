#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <tuple>
#include <vector>

#include <nlohmann/json.hpp>

#include "evocd/algorithms.hpp"
#include "evocd/graph.hpp"
#include "evocd/lfr.hpp"
#include "evocd/transforms.hpp"

namespace evocd {

// Seeds (all via derive_seed):
//   LFR base of graph g          derive_seed(master, g, kLfrStream)
//   evolution of graph g, kind k derive_seed(master, g, kTransformStream, k)
//   run r of algorithm a on g    derive_seed(master, g, r, a + 1)
// The LFR base depends on the graph id only, so every transformation of a
// bench starts from the same base graphs.
inline constexpr std::uint64_t kLfrStream = 0x6c6672;
inline constexpr std::uint64_t kTransformStream = 0x74726e;

struct ExperimentSpec {
  LfrParams lfr;
  TransformConfig transform;
  /// Transformations to run; empty means {transform.kind}.
  std::vector<TransformKind> kinds;
  std::vector<AlgoConfig> algorithms;
  int n_graphs = 20;
  int n_runs = 5;
  std::uint64_t master_seed = 1;
  bool serial = false;
  unsigned threads = 0;  // 0: one per hardware thread
  bool keep_series = false;
  std::string profile = "desk";

  std::vector<TransformKind> effective_kinds() const;
  void validate() const;
};

/// n = 250, 20 graphs x 5 runs, all four algorithms.
ExperimentSpec desk_profile();
/// n = 500, 100 graphs x 10 runs, all four algorithms.
ExperimentSpec paper_profile();
/// "desk" or "paper"; throws ConfigError otherwise.
ExperimentSpec profile_by_name(const std::string& name);

/// Overlays the keys present in `j` onto `base`. Unknown keys are rejected.
ExperimentSpec spec_from_json(const nlohmann::json& j, ExperimentSpec base);
nlohmann::json spec_to_json(const ExperimentSpec& spec);
ExperimentSpec read_spec(const std::filesystem::path& path, ExperimentSpec base);

struct SeriesPoint {
  int t = 0;
  std::optional<double> stability;    // S^t, absent at the first snapshot
  std::optional<double> correctness;  // AMI(GT^0, C^t) or AMI(GT^N, C^t)

  friend bool operator==(const SeriesPoint&, const SeriesPoint&) = default;
};

struct RunRecord {
  int graph_id = 0;
  int run_id = 0;
  std::string algorithm;
  std::string transform;
  double stability = 0.0;
  std::optional<double> correctness;  // absent for disruptive transformations
  std::optional<double> delay;        // morphing only
  std::optional<int> crossing_point;
  bool reached_cp = false;
  std::size_t moves = 0;
  std::size_t violations = 0;
  double seconds_per_snapshot = 0.0;
  std::vector<SeriesPoint> series;  // filled when ExperimentSpec::keep_series

  friend bool operator==(const RunRecord&, const RunRecord&) = default;
};

struct Scores {
  double stability = 0.0;
  std::optional<double> correctness;
  std::optional<double> delay;
  std::optional<int> crossing_point;
  std::vector<SeriesPoint> series;
};

/// Scores one partition series against the graph's ground truth. The
/// scenario decides the correctness convention; delay and crossing point are
/// computed for morphing graphs only, searching from `start`. Per-snapshot
/// values are filled in when `keep_series` is set.
Scores score_run(const DynamicGraph& g, const PartitionSeries& series, Scenario scenario, int start,
                 bool keep_series = false);

struct ExperimentResult {
  std::vector<RunRecord> records;
  std::vector<std::string> warnings;  // one per skipped graph
};

/// Generates, evolves, detects and scores every (kind, graph, run, algorithm).
/// Graphs whose generation or evolution fails are skipped with a warning.
/// Output order and all metric columns are independent of threading.
ExperimentResult run_experiment(const ExperimentSpec& spec);

/// Instantaneous-morph protocol: N = 20, tau = 1, start = end = 10. Throws
/// ConfigError for non-morphing kinds.
ExperimentResult responsiveness_experiment(ExperimentSpec spec);

struct AggregateRow {
  std::string transform;
  std::string algorithm;
  std::string metric;  // "S", "K", "D" or "reached_cp"
  std::size_t n_graphs = 0;
  double median = 0.0;
  double ci_lo = 0.0;
  double ci_hi = 0.0;
  std::optional<double> gain_pct;  // vs the GMA median of the same transform and metric
  double delta = 0.0;              // median - GMA median
  std::string bucket;              // "=", "+", "++", "-", ... or "n.a."

  friend bool operator==(const AggregateRow&, const AggregateRow&) = default;
};

/// "=" within 0.5%, n pluses for (5(n-1)%, 5n%], n minuses for
/// [-5n%, -5(n-1)%).
std::string gain_bucket(double gain_pct);

/// Run mean per graph, then median and 99% bootstrap CI across graphs, then
/// gain against GMA. Throws AggregationError when GMA is missing for a
/// transformation or `records` is empty.
std::vector<AggregateRow> aggregate(const std::vector<RunRecord>& records);

// Contact-log ingestion: rows `timestamp,node_a,node_b`, an optional header.
struct IngestResult {
  DynamicGraph graph;
  std::size_t rejected_rows = 0;
  std::vector<std::string> warnings;
};
IngestResult ingest_contacts(std::istream& in, double window_seconds);
IngestResult ingest_contacts(const std::filesystem::path& path, double window_seconds);

inline constexpr const char* kRunsHeader =
    "graph_id,run_id,algorithm,transform,S,K,D,CP,reached_cp,moves,violations,seconds_per_snapshot";
inline constexpr const char* kAggregateHeader =
    "transform,algorithm,metric,n_graphs,median,ci_lo,ci_hi,gain_pct,delta,bucket";
inline constexpr const char* kSeriesHeader = "graph_id,run_id,algorithm,transform,t,S_t,K_t";

void write_runs_csv(const std::vector<RunRecord>& records, std::ostream& out);
std::vector<RunRecord> read_runs_csv(std::istream& in);
void write_aggregate_csv(const std::vector<AggregateRow>& rows, std::ostream& out);
void write_series_csv(const std::vector<RunRecord>& records, std::ostream& out);

/// Writes runs.csv, aggregate.csv, meta.json (and series.csv when any record
/// carries a series) into `dir`, creating it if needed. Throws IoError.
void export_results(const ExperimentSpec& spec, const ExperimentResult& result,
                    const std::vector<AggregateRow>& rows, const std::filesystem::path& dir);
std::vector<RunRecord> import_runs(const std::filesystem::path& runs_csv);

struct TimingRow {
  std::string algorithm;
  double median_seconds = 0.0;
  std::optional<double> relative;  // median_seconds / GMA median_seconds
};

/// Median per-snapshot runtime of each algorithm, normalised to GMA.
std::vector<TimingRow> timing_report(const std::vector<RunRecord>& records);

}  // namespace evocd
