#pragma once

#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace evocd {

using NodeId = std::int64_t;
using CommunityId = std::int64_t;

/// Undirected weighted edge, stored with u < v.
struct Edge {
  NodeId u = 0;
  NodeId v = 0;
  double w = 0.0;

  friend bool operator==(const Edge&, const Edge&) = default;
};

/// Returns the canonical (min, max) ordering of an endpoint pair.
constexpr std::pair<NodeId, NodeId> canonical(NodeId a, NodeId b) noexcept {
  return a < b ? std::pair{a, b} : std::pair{b, a};
}

struct Neighbor {
  std::uint32_t index;  // position in Snapshot::nodes()
  double w;
};

// One undirected weighted graph of a dynamic sequence. Immutable after
// construction; node ids are kept sorted and edges canonical and sorted, which
// makes two snapshots with the same content compare (and serialize) equal.
class Snapshot {
 public:
  Snapshot() = default;

  // Throws DomainError on self-loops, duplicate pairs, weights outside (0,1]
  // or endpoints missing from `nodes`. Duplicate node ids are collapsed.
  Snapshot(int t, std::vector<NodeId> nodes, std::vector<Edge> edges);

  int t() const noexcept { return t_; }
  std::span<const NodeId> nodes() const noexcept { return nodes_; }
  std::span<const Edge> edges() const noexcept { return edges_; }
  std::size_t node_count() const noexcept { return nodes_.size(); }
  std::size_t edge_count() const noexcept { return edges_.size(); }

  bool contains(NodeId n) const noexcept { return index_of(n).has_value(); }
  std::optional<std::size_t> index_of(NodeId n) const noexcept;

  /// Neighbors of the node at position `index` in nodes().
  std::span<const Neighbor> neighbors(std::size_t index) const noexcept {
    return {adjacency_.data() + offsets_[index], adjacency_.data() + offsets_[index + 1]};
  }
  double degree_at(std::size_t index) const noexcept { return degree_[index]; }
  double total_weight() const noexcept { return total_weight_; }

  /// Copy with a different snapshot index.
  Snapshot with_index(int t) const;

  friend bool operator==(const Snapshot& a, const Snapshot& b) {
    return a.t_ == b.t_ && a.nodes_ == b.nodes_ && a.edges_ == b.edges_;
  }

 private:
  int t_ = 0;
  std::vector<NodeId> nodes_;
  std::vector<Edge> edges_;
  std::vector<std::size_t> offsets_{0};
  std::vector<Neighbor> adjacency_;
  std::vector<double> degree_;
  double total_weight_ = 0.0;
};

// Non-overlapping assignment of nodes to communities. Stored as a vector of
// (node, community) pairs sorted by node; a community exists iff some node is
// assigned to it, so empty communities cannot be represented.
class Partition {
 public:
  using Entry = std::pair<NodeId, CommunityId>;

  Partition() = default;
  /// Throws DomainError if a node appears twice.
  explicit Partition(std::vector<Entry> assignment);
  explicit Partition(const std::map<NodeId, CommunityId>& assignment);
  Partition(std::initializer_list<Entry> assignment) : Partition(std::vector<Entry>(assignment)) {}

  /// Every node in its own community, labelled by its node id.
  static Partition singletons(std::span<const NodeId> nodes);
  /// Every node in community `c`.
  static Partition uniform(std::span<const NodeId> nodes, CommunityId c = 0);

  std::span<const Entry> entries() const noexcept { return entries_; }
  std::size_t size() const noexcept { return entries_.size(); }
  bool empty() const noexcept { return entries_.empty(); }

  bool contains(NodeId n) const noexcept { return find(n).has_value(); }
  std::optional<CommunityId> find(NodeId n) const noexcept;
  /// Throws DomainError for nodes outside the domain.
  CommunityId community_of(NodeId n) const;

  std::vector<NodeId> domain() const;
  /// Sorted distinct community ids.
  std::vector<CommunityId> communities() const;
  std::map<CommunityId, std::vector<NodeId>> members() const;
  std::size_t community_count() const { return communities().size(); }
  /// True iff the domain equals the snapshot's node set.
  bool covers(const Snapshot& s) const noexcept;
  CommunityId max_label() const noexcept;

  friend bool operator==(const Partition&, const Partition&) = default;

 private:
  std::vector<Entry> entries_;
};

/// (t, partition) pairs in strictly increasing t.
using PartitionSeries = std::vector<std::pair<int, Partition>>;

/// True iff a and b have the same domain and induce the same grouping.
bool same_grouping(const Partition& a, const Partition& b);

// An ordered sequence of snapshots with optional ground truth. Snapshot k has
// index k.
struct DynamicGraph {
  std::vector<Snapshot> snapshots;
  /// Empty, or one partition per snapshot.
  std::vector<Partition> ground_truth;
  /// Target ground truth of a morphing transformation, when one exists.
  std::optional<Partition> final_ground_truth;
  /// Free-form key/value metadata written by the generator/evolver.
  std::map<std::string, std::string> meta;

  /// Throws DomainError when indices are not 0..N or ground truth is
  /// misaligned.
  void validate() const;
};

double total_weight(const Snapshot& s) noexcept;
double weighted_degree(const Snapshot& s, NodeId n);

/// Q_c = w_in,c / w* - (w_c / 2w*)^2.
double community_modularity(const Snapshot& s, const Partition& p, CommunityId c);
/// Q_c for every community of p.
std::map<CommunityId, double> community_modularities(const Snapshot& s, const Partition& p);
/// Sum of Q_c over the communities of p.
double modularity(const Snapshot& s, const Partition& p);

Partition restrict(const Partition& p, std::span<const NodeId> nodes);
Partition restrict(const Partition& p, const Snapshot& s);

/// Sorted intersection of two sorted node ranges.
std::vector<NodeId> intersect(std::span<const NodeId> a, std::span<const NodeId> b);

}  // namespace evocd
