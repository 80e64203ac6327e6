#include "evocd/harness.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <exception>
#include <fstream>
#include <map>
#include <numeric>
#include <set>
#include <sstream>
#include <thread>

#include "evocd/errors.hpp"
#include "evocd/metrics.hpp"
#include "evocd/rng.hpp"

#ifndef EVOCD_VERSION
#define EVOCD_VERSION "0.0.0"
#endif

namespace evocd {

using nlohmann::json;

std::vector<TransformKind> ExperimentSpec::effective_kinds() const {
  return kinds.empty() ? std::vector<TransformKind>{transform.kind} : kinds;
}

void ExperimentSpec::validate() const {
  if (n_graphs < 1) throw ConfigError("n_graphs must be at least 1");
  if (n_runs < 1) throw ConfigError("n_runs must be at least 1");
  if (algorithms.empty()) throw ConfigError("at least one algorithm is required");
  lfr.validate();
  transform.validate();
  for (const AlgoConfig& a : algorithms) a.validate();
}

namespace {

std::vector<AlgoConfig> all_algorithms() {
  std::vector<AlgoConfig> out;
  for (const Algorithm a : {Algorithm::GMA, Algorithm::AlphaGMA, Algorithm::SGMA, Algorithm::NeGMA}) {
    AlgoConfig cfg;
    cfg.algorithm = a;
    out.push_back(cfg);
  }
  return out;
}

}  // namespace

ExperimentSpec desk_profile() {
  ExperimentSpec spec;
  spec.lfr.n = 250;
  spec.lfr.max_comm = 50;
  spec.n_graphs = 20;
  spec.n_runs = 5;
  spec.algorithms = all_algorithms();
  spec.profile = "desk";
  return spec;
}

ExperimentSpec paper_profile() {
  ExperimentSpec spec;
  spec.lfr.n = 500;
  spec.lfr.max_comm = 60;
  spec.n_graphs = 100;
  spec.n_runs = 10;
  spec.algorithms = all_algorithms();
  spec.profile = "paper";
  return spec;
}

ExperimentSpec profile_by_name(const std::string& name) {
  if (name == "desk") return desk_profile();
  if (name == "paper") return paper_profile();
  throw ConfigError("unknown profile: " + name + " (expected desk or paper)");
}

namespace {

template <typename T>
void read_key(const json& j, const char* key, T& out) {
  if (!j.contains(key)) return;
  try {
    out = j.at(key).get<T>();
  } catch (const json::exception& ex) {
    throw ConfigError(std::string("config key '") + key + "': " + ex.what());
  }
}

void reject_unknown(const json& j, std::initializer_list<const char*> known, const char* where) {
  for (const auto& [key, value] : j.items()) {
    const bool ok = std::any_of(known.begin(), known.end(), [&](const char* k) { return key == k; });
    if (!ok) throw ConfigError(std::string("unknown key '") + key + "' in " + where);
  }
}

void lfr_from_json(const json& j, LfrParams& p) {
  reject_unknown(j, {"n", "mu", "deg_exponent", "comm_exponent", "avg_degree", "max_degree", "min_comm", "max_comm"},
                 "lfr");
  read_key(j, "n", p.n);
  read_key(j, "mu", p.mu);
  read_key(j, "deg_exponent", p.deg_exponent);
  read_key(j, "comm_exponent", p.comm_exponent);
  read_key(j, "avg_degree", p.avg_degree);
  read_key(j, "max_degree", p.max_degree);
  read_key(j, "min_comm", p.min_comm);
  read_key(j, "max_comm", p.max_comm);
}

void transform_from_json(const json& j, TransformConfig& c) {
  reject_unknown(j,
                 {"kind", "n_snapshots", "start", "end", "tau", "phi_int", "phi_swi", "gamma", "phi_rem_lo",
                  "phi_rem_hi", "phi_mix", "targets", "birth_fraction", "growth", "mu", "weight_floor"},
                 "transform");
  if (j.contains("kind")) c.kind = parse_transform(j.at("kind").get<std::string>());
  read_key(j, "n_snapshots", c.n_snapshots);
  read_key(j, "start", c.start);
  read_key(j, "end", c.end);
  read_key(j, "tau", c.tau);
  read_key(j, "phi_int", c.phi_int);
  read_key(j, "phi_swi", c.phi_swi);
  read_key(j, "gamma", c.gamma);
  read_key(j, "phi_rem_lo", c.phi_rem_lo);
  read_key(j, "phi_rem_hi", c.phi_rem_hi);
  read_key(j, "phi_mix", c.phi_mix);
  read_key(j, "targets", c.targets);
  read_key(j, "birth_fraction", c.birth_fraction);
  read_key(j, "growth", c.growth);
  read_key(j, "mu", c.mu);
  read_key(j, "weight_floor", c.weight_floor);
}

AlgoConfig algo_from_json(const json& j) {
  AlgoConfig c;
  if (j.is_string()) {
    c.algorithm = parse_algorithm(j.get<std::string>());
    return c;
  }
  reject_unknown(j, {"name", "alpha", "theta_q", "evict_memory", "memory_epsilon"}, "algorithms[]");
  if (!j.contains("name")) throw ConfigError("algorithm entry needs a name");
  c.algorithm = parse_algorithm(j.at("name").get<std::string>());
  read_key(j, "alpha", c.alpha);
  read_key(j, "theta_q", c.theta_q);
  read_key(j, "evict_memory", c.evict_memory);
  read_key(j, "memory_epsilon", c.memory_epsilon);
  return c;
}

}  // namespace

ExperimentSpec spec_from_json(const json& j, ExperimentSpec base) {
  if (!j.is_object()) throw ConfigError("config must be a JSON object");
  reject_unknown(j,
                 {"profile", "master_seed", "n_graphs", "n_runs", "serial", "threads", "keep_series", "lfr",
                  "transform", "kinds", "algorithms"},
                 "config");
  if (j.contains("profile")) {
    const auto name = j.at("profile").get<std::string>();
    if (name != base.profile) base = profile_by_name(name);
  }
  read_key(j, "master_seed", base.master_seed);
  read_key(j, "n_graphs", base.n_graphs);
  read_key(j, "n_runs", base.n_runs);
  read_key(j, "serial", base.serial);
  read_key(j, "threads", base.threads);
  read_key(j, "keep_series", base.keep_series);
  if (j.contains("lfr")) lfr_from_json(j.at("lfr"), base.lfr);
  if (j.contains("transform")) transform_from_json(j.at("transform"), base.transform);
  if (j.contains("kinds")) {
    base.kinds.clear();
    const json& kinds = j.at("kinds");
    if (kinds.is_string() && kinds.get<std::string>() == "all") {
      base.kinds.assign(std::begin(kAllTransforms), std::end(kAllTransforms));
    } else {
      for (const auto& k : kinds) base.kinds.push_back(parse_transform(k.get<std::string>()));
    }
  }
  if (j.contains("algorithms")) {
    base.algorithms.clear();
    for (const auto& a : j.at("algorithms")) base.algorithms.push_back(algo_from_json(a));
  }
  base.validate();
  return base;
}

json spec_to_json(const ExperimentSpec& spec) {
  const LfrParams& l = spec.lfr;
  const TransformConfig& t = spec.transform;
  json kinds = json::array();
  for (const TransformKind k : spec.effective_kinds()) kinds.push_back(std::string(to_string(k)));
  json algos = json::array();
  for (const AlgoConfig& a : spec.algorithms) {
    algos.push_back({{"name", std::string(to_string(a.algorithm))},
                     {"alpha", a.alpha},
                     {"theta_q", a.theta_q},
                     {"evict_memory", a.evict_memory},
                     {"memory_epsilon", a.memory_epsilon}});
  }
  return {{"profile", spec.profile},
          {"master_seed", spec.master_seed},
          {"n_graphs", spec.n_graphs},
          {"n_runs", spec.n_runs},
          {"keep_series", spec.keep_series},
          {"lfr",
           {{"n", l.n},
            {"mu", l.mu},
            {"deg_exponent", l.deg_exponent},
            {"comm_exponent", l.comm_exponent},
            {"avg_degree", l.avg_degree},
            {"max_degree", l.max_degree},
            {"min_comm", l.min_comm},
            {"max_comm", l.max_comm}}},
          {"transform",
           {{"kind", std::string(to_string(t.kind))},
            {"n_snapshots", t.n_snapshots},
            {"start", t.start},
            {"end", t.end},
            {"tau", t.tau},
            {"phi_int", t.phi_int},
            {"phi_swi", t.phi_swi},
            {"gamma", t.gamma},
            {"phi_rem_lo", t.phi_rem_lo},
            {"phi_rem_hi", t.phi_rem_hi},
            {"phi_mix", t.phi_mix},
            {"targets", t.targets},
            {"birth_fraction", t.birth_fraction},
            {"growth", t.growth},
            {"mu", t.mu},
            {"weight_floor", t.weight_floor}}},
          {"kinds", std::move(kinds)},
          {"algorithms", std::move(algos)}};
}

ExperimentSpec read_spec(const std::filesystem::path& path, ExperimentSpec base) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config file " + path.string());
  json j;
  try {
    in >> j;
  } catch (const json::exception& ex) {
    throw ConfigError("config file " + path.string() + " is not valid JSON: " + ex.what());
  }
  return spec_from_json(j, std::move(base));
}

Scores score_run(const DynamicGraph& g, const PartitionSeries& series, Scenario scenario, int start,
                 bool keep_series) {
  Scores out;
  const SeriesScore s = stability(series);
  out.stability = s.mean;

  const Partition* gt0 = g.ground_truth.empty() ? nullptr : &g.ground_truth.front();
  const Partition* gtN = g.final_ground_truth ? &*g.final_ground_truth : nullptr;
  std::map<int, double> k_per_t;
  if (scenario == Scenario::Noise && gt0) {
    const SeriesScore k = correctness_noise(*gt0, series);
    out.correctness = k.mean;
    k_per_t.insert(k.per_t.begin(), k.per_t.end());
  } else if (scenario == Scenario::Morphing && gt0 && gtN) {
    out.correctness = correctness_morphing(*gtN, series);
    out.crossing_point = crossing_point(*gt0, *gtN, series, start);
    out.delay = delay(out.crossing_point, start, series.back().first);
    if (keep_series) {
      for (const auto& [t, p] : series) k_per_t[t] = ami(*gtN, p);
    }
  }

  if (keep_series) {
    const std::map<int, double> s_per_t(s.per_t.begin(), s.per_t.end());
    for (const auto& [t, p] : series) {
      SeriesPoint pt{t, std::nullopt, std::nullopt};
      if (const auto it = s_per_t.find(t); it != s_per_t.end()) pt.stability = it->second;
      if (const auto it = k_per_t.find(t); it != k_per_t.end()) pt.correctness = it->second;
      out.series.push_back(pt);
    }
  }
  return out;
}

namespace {

// Runs f(0..n-1) on a pool of worker threads; the first exception is
// rethrown after all workers join.
template <typename F>
void parallel_for(std::size_t n, bool serial, unsigned threads, F&& f) {
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  if (serial || threads == 1 || n <= 1) {
    for (std::size_t i = 0; i < n; ++i) f(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::exception_ptr> errors(n);
  auto worker = [&] {
    for (std::size_t i = next++; i < n; i = next++) {
      try {
        f(i);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  std::vector<std::thread> pool;
  const unsigned count = static_cast<unsigned>(std::min<std::size_t>(threads, n));
  pool.reserve(count);
  for (unsigned k = 0; k < count; ++k) pool.emplace_back(worker);
  for (auto& th : pool) th.join();
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

}  // namespace

ExperimentResult run_experiment(const ExperimentSpec& spec) {
  spec.validate();
  const auto kinds = spec.effective_kinds();
  const auto n_graphs = static_cast<std::size_t>(spec.n_graphs);

  std::vector<std::optional<LfrGraph>> bases(n_graphs);
  std::vector<std::string> base_errors(n_graphs);
  parallel_for(n_graphs, spec.serial, spec.threads, [&](std::size_t g) {
    LfrParams p = spec.lfr;
    p.seed = derive_seed(spec.master_seed, g, kLfrStream);
    try {
      bases[g] = generate_lfr(p);
    } catch (const GenerationError& ex) {
      base_errors[g] = ex.what();
    }
  });

  const std::size_t n_cells = kinds.size() * n_graphs;
  std::vector<std::optional<DynamicGraph>> graphs(n_cells);
  std::vector<std::string> cell_errors(n_cells);
  parallel_for(n_cells, spec.serial, spec.threads, [&](std::size_t cell) {
    const std::size_t g = cell % n_graphs;
    if (!bases[g]) {
      cell_errors[cell] = "generation failed: " + base_errors[g];
      return;
    }
    TransformConfig tc = spec.transform;
    tc.kind = kinds[cell / n_graphs];
    tc.seed = derive_seed(spec.master_seed, g, kTransformStream, static_cast<int>(tc.kind));
    try {
      graphs[cell] = evolve(bases[g]->snapshot, bases[g]->ground_truth, tc);
    } catch (const EvolutionError& ex) {
      cell_errors[cell] = std::string("evolution failed: ") + ex.what();
    } catch (const ConfigError& ex) {
      cell_errors[cell] = std::string("planning failed: ") + ex.what();
    }
  });

  const std::size_t per_cell = static_cast<std::size_t>(spec.n_runs) * spec.algorithms.size();
  std::vector<std::optional<RunRecord>> slots(n_cells * per_cell);
  parallel_for(slots.size(), spec.serial, spec.threads, [&](std::size_t i) {
    const std::size_t cell = i / per_cell;
    if (!graphs[cell]) return;
    const std::size_t run = (i % per_cell) / spec.algorithms.size();
    const std::size_t a = i % spec.algorithms.size();
    const std::size_t g = cell % n_graphs;
    const TransformKind kind = kinds[cell / n_graphs];
    const DynamicGraph& graph = *graphs[cell];

    AlgoConfig cfg = spec.algorithms[a];
    cfg.seed = derive_seed(spec.master_seed, g, run, a + 1);
    SequenceStats stats;
    const PartitionSeries series = run_sequence(graph, cfg, &stats);
    const int start = std::stoi(graph.meta.at("start"));
    Scores sc = score_run(graph, series, scenario_of(kind), start, spec.keep_series);

    RunRecord r;
    r.graph_id = static_cast<int>(g);
    r.run_id = static_cast<int>(run);
    r.algorithm = std::string(to_string(cfg.algorithm));
    r.transform = std::string(to_string(kind));
    r.stability = sc.stability;
    r.correctness = sc.correctness;
    r.delay = sc.delay;
    r.crossing_point = sc.crossing_point;
    r.reached_cp = sc.crossing_point.has_value();
    r.moves = stats.monitor.moves;
    r.violations = stats.monitor.violations;
    r.seconds_per_snapshot =
        std::accumulate(stats.seconds.begin(), stats.seconds.end(), 0.0) / static_cast<double>(stats.seconds.size());
    r.series = std::move(sc.series);
    slots[i] = std::move(r);
  });

  ExperimentResult out;
  for (auto& s : slots) {
    if (s) out.records.push_back(std::move(*s));
  }
  for (std::size_t cell = 0; cell < n_cells; ++cell) {
    if (!graphs[cell]) {
      out.warnings.push_back("skipped graph " + std::to_string(cell % n_graphs) + " (" +
                             std::string(to_string(kinds[cell / n_graphs])) + "): " + cell_errors[cell]);
    }
  }
  return out;
}

ExperimentResult responsiveness_experiment(ExperimentSpec spec) {
  for (const TransformKind k : spec.effective_kinds()) {
    if (scenario_of(k) != Scenario::Morphing) {
      throw ConfigError("responsiveness protocol needs a morphing transformation, got " +
                        std::string(to_string(k)));
    }
  }
  spec.transform.n_snapshots = 20;
  spec.transform.start = 10;
  spec.transform.end = 10;
  spec.transform.tau = 1.0;
  return run_experiment(spec);
}

std::string gain_bucket(double gain_pct) {
  if (std::abs(gain_pct) <= 0.5) return "=";
  const auto n = static_cast<std::size_t>(std::max(1.0, std::ceil(std::abs(gain_pct) / 5.0 - 1e-12)));
  return std::string(n, gain_pct > 0.0 ? '+' : '-');
}

std::vector<AggregateRow> aggregate(const std::vector<RunRecord>& records) {
  if (records.empty()) throw AggregationError("no records to aggregate");
  static constexpr const char* kMetrics[] = {"S", "K", "D", "reached_cp"};

  std::vector<std::string> transforms, algorithms;
  auto remember = [](std::vector<std::string>& v, const std::string& s) {
    if (std::find(v.begin(), v.end(), s) == v.end()) v.push_back(s);
  };
  // (transform, algorithm, metric) -> graph -> run values
  std::map<std::tuple<std::string, std::string, std::string>, std::map<int, std::vector<double>>> cells;
  for (const RunRecord& r : records) {
    remember(transforms, r.transform);
    remember(algorithms, r.algorithm);
    auto add = [&](const char* metric, double v) { cells[{r.transform, r.algorithm, metric}][r.graph_id].push_back(v); };
    add("S", r.stability);
    if (r.correctness) add("K", *r.correctness);
    if (r.delay) {
      add("D", *r.delay);
      add("reached_cp", r.reached_cp ? 1.0 : 0.0);
    }
  }

  std::map<std::tuple<std::string, std::string, std::string>, AggregateRow> rows;
  for (const auto& [key, per_graph] : cells) {
    std::vector<double> means;
    for (const auto& [g, runs] : per_graph) {
      means.push_back(std::accumulate(runs.begin(), runs.end(), 0.0) / static_cast<double>(runs.size()));
    }
    const MedianCi ci = bootstrap_median_ci(means);
    AggregateRow row;
    std::tie(row.transform, row.algorithm, row.metric) = key;
    row.n_graphs = means.size();
    row.median = ci.median;
    row.ci_lo = ci.lo;
    row.ci_hi = ci.hi;
    rows.emplace(key, row);
  }

  std::vector<AggregateRow> out;
  for (const std::string& t : transforms) {
    const bool has_baseline = std::any_of(rows.begin(), rows.end(), [&](const auto& kv) {
      return std::get<0>(kv.first) == t && std::get<1>(kv.first) == "GMA";
    });
    if (!has_baseline) throw AggregationError("no GMA baseline records for transformation " + t);
    for (const std::string& a : algorithms) {
      for (const char* m : kMetrics) {
        const auto it = rows.find({t, a, m});
        if (it == rows.end()) continue;
        AggregateRow row = it->second;
        const auto base = rows.find({t, "GMA", m});
        if (base == rows.end()) throw AggregationError("no GMA baseline for " + t + "/" + m);
        const double b = base->second.median;
        row.delta = row.median - b;
        if (std::abs(b) > 1e-12) {
          row.gain_pct = 100.0 * (row.median - b) / std::abs(b);
        } else if (row.median == b) {
          row.gain_pct = 0.0;
        }
        row.bucket = row.gain_pct ? gain_bucket(*row.gain_pct) : "n.a.";
        out.push_back(row);
      }
    }
  }
  return out;
}

namespace {

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> fields;
  std::string field;
  std::istringstream ss(line);
  while (std::getline(ss, field, ',')) fields.push_back(field);
  if (!line.empty() && line.back() == ',') fields.emplace_back();
  return fields;
}

std::string trim(std::string s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

template <typename T>
bool parse_number(const std::string& text, T& out) {
  const std::string s = trim(text);
  if (s.empty()) return false;
  if constexpr (std::is_floating_point_v<T>) {
    // from_chars for doubles is missing from older standard libraries.
    char* end = nullptr;
    out = std::strtod(s.c_str(), &end);
    return end == s.c_str() + s.size() && std::isfinite(out);
  } else {
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
    return ec == std::errc{} && ptr == s.data() + s.size();
  }
}

std::string fmt(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::string fmt(const std::optional<double>& x) { return x ? fmt(*x) : std::string(); }

}  // namespace

IngestResult ingest_contacts(std::istream& in, double window_seconds) {
  if (!(window_seconds > 0.0)) throw ConfigError("window_seconds must be positive");
  IngestResult out;
  struct Contact {
    double ts;
    NodeId a;
    NodeId b;
  };
  std::vector<Contact> contacts;
  std::string line;
  std::size_t line_no = 0;
  bool first_content = true;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const auto fields = split_csv(trim(line));
    Contact c{};
    const bool ok = fields.size() == 3 && parse_number(fields[0], c.ts) && parse_number(fields[1], c.a) &&
                    parse_number(fields[2], c.b);
    const bool header = first_content && !fields.empty() && !parse_number(fields[0], c.ts);
    first_content = false;
    if (header) continue;
    if (!ok) {
      ++out.rejected_rows;
      out.warnings.push_back("line " + std::to_string(line_no) + ": expected timestamp,node_a,node_b");
      continue;
    }
    if (c.a == c.b) {
      ++out.rejected_rows;
      out.warnings.push_back("line " + std::to_string(line_no) + ": self-contact");
      continue;
    }
    contacts.push_back(c);
  }
  if (contacts.empty()) throw IoError("contact log contains no valid contacts");

  double t0 = contacts.front().ts;
  for (const Contact& c : contacts) t0 = std::min(t0, c.ts);
  std::map<std::size_t, std::map<EdgeKey, int>> windows;
  std::size_t last = 0;
  for (const Contact& c : contacts) {
    const auto w = static_cast<std::size_t>(std::floor((c.ts - t0) / window_seconds));
    ++windows[w][canonical(c.a, c.b)];
    last = std::max(last, w);
  }
  for (std::size_t w = 0; w <= last; ++w) {
    std::vector<NodeId> nodes;
    std::vector<Edge> edges;
    if (const auto it = windows.find(w); it != windows.end()) {
      int peak = 0;
      for (const auto& [k, count] : it->second) peak = std::max(peak, count);
      for (const auto& [k, count] : it->second) {
        edges.push_back({k.first, k.second, static_cast<double>(count) / peak});
        nodes.push_back(k.first);
        nodes.push_back(k.second);
      }
    }
    out.graph.snapshots.emplace_back(static_cast<int>(w), std::move(nodes), std::move(edges));
  }
  out.graph.meta["source"] = "contacts";
  out.graph.meta["window_seconds"] = fmt(window_seconds);
  out.graph.meta["t0"] = fmt(t0);
  out.graph.meta["weighting"] = "contact count / window max count";
  out.graph.meta["rejected_rows"] = std::to_string(out.rejected_rows);
  return out;
}

IngestResult ingest_contacts(const std::filesystem::path& path, double window_seconds) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open contact log " + path.string());
  return ingest_contacts(in, window_seconds);
}

void write_runs_csv(const std::vector<RunRecord>& records, std::ostream& out) {
  out << kRunsHeader << '\n';
  for (const RunRecord& r : records) {
    out << r.graph_id << ',' << r.run_id << ',' << r.algorithm << ',' << r.transform << ',' << fmt(r.stability)
        << ',' << fmt(r.correctness) << ',' << fmt(r.delay) << ','
        << (r.crossing_point ? std::to_string(*r.crossing_point) : std::string()) << ',' << (r.reached_cp ? 1 : 0)
        << ',' << r.moves << ',' << r.violations << ',' << fmt(r.seconds_per_snapshot) << '\n';
  }
}

std::vector<RunRecord> read_runs_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || trim(line) != kRunsHeader) {
    throw IoError("runs.csv header mismatch; expected " + std::string(kRunsHeader));
  }
  std::vector<RunRecord> out;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const auto f = split_csv(trim(line));
    auto bad = [&] { return IoError("runs.csv line " + std::to_string(line_no) + " is malformed"); };
    if (f.size() != 12) throw bad();
    RunRecord r;
    int reached = 0;
    if (!parse_number(f[0], r.graph_id) || !parse_number(f[1], r.run_id)) throw bad();
    r.algorithm = f[2];
    r.transform = f[3];
    if (!parse_number(f[4], r.stability)) throw bad();
    double x = 0.0;
    if (!f[5].empty()) {
      if (!parse_number(f[5], x)) throw bad();
      r.correctness = x;
    }
    if (!f[6].empty()) {
      if (!parse_number(f[6], x)) throw bad();
      r.delay = x;
    }
    if (!f[7].empty()) {
      int cp = 0;
      if (!parse_number(f[7], cp)) throw bad();
      r.crossing_point = cp;
    }
    if (!parse_number(f[8], reached) || !parse_number(f[9], r.moves) || !parse_number(f[10], r.violations) ||
        !parse_number(f[11], r.seconds_per_snapshot)) {
      throw bad();
    }
    r.reached_cp = reached != 0;
    out.push_back(std::move(r));
  }
  return out;
}

void write_aggregate_csv(const std::vector<AggregateRow>& rows, std::ostream& out) {
  out << kAggregateHeader << '\n';
  for (const AggregateRow& r : rows) {
    out << r.transform << ',' << r.algorithm << ',' << r.metric << ',' << r.n_graphs << ',' << fmt(r.median) << ','
        << fmt(r.ci_lo) << ',' << fmt(r.ci_hi) << ',' << fmt(r.gain_pct) << ',' << fmt(r.delta) << ',' << r.bucket
        << '\n';
  }
}

void write_series_csv(const std::vector<RunRecord>& records, std::ostream& out) {
  out << kSeriesHeader << '\n';
  for (const RunRecord& r : records) {
    for (const SeriesPoint& p : r.series) {
      out << r.graph_id << ',' << r.run_id << ',' << r.algorithm << ',' << r.transform << ',' << p.t << ','
          << fmt(p.stability) << ',' << fmt(p.correctness) << '\n';
    }
  }
}

namespace {

std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path.string());
  return out;
}

}  // namespace

void export_results(const ExperimentSpec& spec, const ExperimentResult& result,
                    const std::vector<AggregateRow>& rows, const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw IoError("cannot create output directory " + dir.string() + ": " + ec.message());

  auto runs = open_out(dir / "runs.csv");
  write_runs_csv(result.records, runs);
  auto agg = open_out(dir / "aggregate.csv");
  write_aggregate_csv(rows, agg);
  const bool any_series =
      std::any_of(result.records.begin(), result.records.end(), [](const RunRecord& r) { return !r.series.empty(); });
  if (any_series) {
    auto series = open_out(dir / "series.csv");
    write_series_csv(result.records, series);
  }

  json meta = {
      {"software", {{"name", "evocd"}, {"version", EVOCD_VERSION}}},
      {"spec", spec_to_json(spec)},
      {"master_seed", spec.master_seed},
      {"seed_scheme",
       {{"hash", "splitmix64 fold: h = mix(first); h = mix(h ^ mix(v)) per value"},
        {"lfr", "derive_seed(master_seed, graph_id, 0x6c6672)"},
        {"transform", "derive_seed(master_seed, graph_id, 0x74726e, kind_index)"},
        {"run", "derive_seed(master_seed, graph_id, run_id, algorithm_index + 1)"},
        {"louvain_per_snapshot", "derive_seed(run_seed, t)"}}},
      {"records", result.records.size()},
      {"warnings", result.warnings},
      {"design",
       {{"ami_normalisation", "arithmetic mean of entropies, exact hypergeometric expected MI"},
        {"cross_snapshot_comparison", "intersection of active node sets"},
        {"alpha_memory", "absent edges kept at alpha * previous weight; eviction below memory_epsilon unless disabled"},
        {"negma_new_node_order", "seeded shuffle; votes see labels assigned earlier in the same pass"},
        {"negma_gate", "dissolve when Q_c(t) - Q_c(t-1) < theta_q, Q_c(t-1) on the previous snapshot"},
        {"vote_ties", "largest summed weight, then smallest community id"},
        {"switch_return_probability", "min(1, exp(t_off - gamma))"},
        {"weight_floor", "loosened weights stop at weight_floor and are deleted at the window end"},
        {"contact_weights", "contact count / window max count"},
        {"aggregation", "run mean per graph, then median and 99% percentile bootstrap CI (10000 resamples)"}}}};
  auto meta_out = open_out(dir / "meta.json");
  meta_out << meta.dump(2) << '\n';
}

std::vector<RunRecord> import_runs(const std::filesystem::path& runs_csv) {
  std::ifstream in(runs_csv);
  if (!in) throw IoError("cannot open " + runs_csv.string());
  return read_runs_csv(in);
}

std::vector<TimingRow> timing_report(const std::vector<RunRecord>& records) {
  std::vector<std::string> order;
  std::map<std::string, std::vector<double>> seconds;
  for (const RunRecord& r : records) {
    if (!seconds.contains(r.algorithm)) order.push_back(r.algorithm);
    seconds[r.algorithm].push_back(r.seconds_per_snapshot);
  }
  std::vector<TimingRow> out;
  for (const std::string& a : order) out.push_back({a, median(seconds.at(a)), std::nullopt});
  const auto base = std::find_if(out.begin(), out.end(), [](const TimingRow& r) { return r.algorithm == "GMA"; });
  if (base != out.end() && base->median_seconds > 0.0) {
    const double b = base->median_seconds;
    for (TimingRow& r : out) r.relative = r.median_seconds / b;
  }
  return out;
}

}  // namespace evocd
