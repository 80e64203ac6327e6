#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "evocd/graph.hpp"

namespace evocd {

// DynamicGraph JSON document:
//   {"snapshots": [{"t": 0, "nodes": [..], "edges": [[u, v, w], ..]}, ..],
//    "ground_truth": [{"t": 0, "assignment": {"<node>": community}}, ..],
//    "final_ground_truth": {"assignment": {..}},
//    "meta": {"key": "value"}}
// ground_truth, final_ground_truth and meta are optional. Weights are written
// with round-trip precision (17 significant digits).
nlohmann::json to_json(const DynamicGraph& g);
DynamicGraph dynamic_graph_from_json(const nlohmann::json& j);

nlohmann::json partition_to_json(const Partition& p);
Partition partition_from_json(const nlohmann::json& j);

void write_dynamic_graph(const DynamicGraph& g, const std::filesystem::path& path);
DynamicGraph read_dynamic_graph(const std::filesystem::path& path);

// Partition CSV, header `t,node,community`, rows sorted by (t, node).
void write_partition_csv(const PartitionSeries& series, std::ostream& out);
PartitionSeries read_partition_csv(std::istream& in);
void write_partition_csv(const PartitionSeries& series, const std::filesystem::path& path);
PartitionSeries read_partition_csv(const std::filesystem::path& path);

}  // namespace evocd
