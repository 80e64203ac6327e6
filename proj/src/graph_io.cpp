#include "evocd/graph_io.hpp"

#include <fstream>
#include <map>
#include <sstream>

#include "evocd/errors.hpp"

namespace evocd {

using nlohmann::json;

json partition_to_json(const Partition& p) {
  json assignment = json::object();
  for (const auto& [n, c] : p.entries()) assignment[std::to_string(n)] = c;
  return assignment;
}

Partition partition_from_json(const json& j) {
  std::vector<Partition::Entry> entries;
  entries.reserve(j.size());
  for (const auto& [key, value] : j.items()) {
    entries.emplace_back(std::stoll(key), value.get<CommunityId>());
  }
  return Partition(std::move(entries));
}

json to_json(const DynamicGraph& g) {
  json snapshots = json::array();
  for (const Snapshot& s : g.snapshots) {
    json edges = json::array();
    for (const Edge& e : s.edges()) edges.push_back(json::array({e.u, e.v, e.w}));
    snapshots.push_back({{"t", s.t()},
                         {"nodes", std::vector<NodeId>(s.nodes().begin(), s.nodes().end())},
                         {"edges", std::move(edges)}});
  }
  json doc = {{"snapshots", std::move(snapshots)}};
  if (!g.ground_truth.empty()) {
    json gt = json::array();
    for (std::size_t t = 0; t < g.ground_truth.size(); ++t) {
      gt.push_back({{"t", t}, {"assignment", partition_to_json(g.ground_truth[t])}});
    }
    doc["ground_truth"] = std::move(gt);
  }
  if (g.final_ground_truth) {
    doc["final_ground_truth"] = {{"assignment", partition_to_json(*g.final_ground_truth)}};
  }
  if (!g.meta.empty()) doc["meta"] = g.meta;
  return doc;
}

DynamicGraph dynamic_graph_from_json(const json& j) {
  DynamicGraph g;
  try {
    for (const auto& s : j.at("snapshots")) {
      std::vector<Edge> edges;
      for (const auto& e : s.at("edges")) {
        edges.push_back({e.at(0).get<NodeId>(), e.at(1).get<NodeId>(), e.at(2).get<double>()});
      }
      g.snapshots.emplace_back(s.at("t").get<int>(), s.at("nodes").get<std::vector<NodeId>>(),
                               std::move(edges));
    }
    if (j.contains("ground_truth")) {
      std::map<int, Partition> by_t;
      for (const auto& gt : j.at("ground_truth")) {
        by_t[gt.at("t").get<int>()] = partition_from_json(gt.at("assignment"));
      }
      for (auto& [t, p] : by_t) g.ground_truth.push_back(std::move(p));
    }
    if (j.contains("final_ground_truth")) {
      g.final_ground_truth = partition_from_json(j.at("final_ground_truth").at("assignment"));
    }
    if (j.contains("meta")) g.meta = j.at("meta").get<std::map<std::string, std::string>>();
  } catch (const json::exception& ex) {
    throw IoError(std::string("malformed dynamic graph document: ") + ex.what());
  }
  g.validate();
  return g;
}

void write_dynamic_graph(const DynamicGraph& g, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open for writing: " + path.string());
  out << to_json(g).dump() << '\n';
  if (!out) throw IoError("write failed: " + path.string());
}

DynamicGraph read_dynamic_graph(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open: " + path.string());
  json j;
  try {
    in >> j;
  } catch (const json::exception& ex) {
    throw IoError("invalid JSON in " + path.string() + ": " + ex.what());
  }
  return dynamic_graph_from_json(j);
}

void write_partition_csv(const PartitionSeries& series, std::ostream& out) {
  out << "t,node,community\n";
  for (const auto& [t, p] : series) {
    for (const auto& [n, c] : p.entries()) out << t << ',' << n << ',' << c << '\n';
  }
}

PartitionSeries read_partition_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line.rfind("t,node,community", 0) != 0) {
    throw IoError("partition CSV must start with header t,node,community");
  }
  std::map<int, std::vector<Partition::Entry>> rows;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line == "\r") continue;
    std::istringstream fields(line);
    long long t = 0, n = 0, c = 0;
    char comma1 = 0, comma2 = 0;
    if (!(fields >> t >> comma1 >> n >> comma2 >> c) || comma1 != ',' || comma2 != ',') {
      throw IoError("malformed partition row at line " + std::to_string(lineno));
    }
    rows[static_cast<int>(t)].emplace_back(n, c);
  }
  PartitionSeries series;
  for (auto& [t, entries] : rows) series.emplace_back(t, Partition(std::move(entries)));
  return series;
}

void write_partition_csv(const PartitionSeries& series, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open for writing: " + path.string());
  write_partition_csv(series, out);
}

PartitionSeries read_partition_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open: " + path.string());
  return read_partition_csv(in);
}

}  // namespace evocd
