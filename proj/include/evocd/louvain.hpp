#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "evocd/graph.hpp"

namespace evocd {

// Weighted graph on dense indices 0..n-1 as seen by one Louvain level.
// Collapsed communities keep their internal weight as a self-loop.
struct WorkGraph {
  std::vector<std::size_t> offsets{0};
  std::vector<Neighbor> adjacency;  // both directions, no self-loops
  std::vector<double> loops;        // self-loop weight, each loop counted once
  std::vector<double> degree;       // 2 * loop + incident weights
  double total = 0.0;               // w*, loops included

  std::size_t size() const noexcept { return degree.size(); }
  std::span<const Neighbor> neighbors(std::size_t i) const noexcept {
    return {adjacency.data() + offsets[i], adjacency.data() + offsets[i + 1]};
  }

  /// Node i of the result is s.nodes()[i].
  static WorkGraph from_snapshot(const Snapshot& s);
  /// One node per community id in [0, count); weights between communities are
  /// summed and intra-community weight becomes the self-loop.
  WorkGraph aggregate(std::span<const std::uint32_t> community, std::size_t count) const;
};

/// Modularity of a dense community assignment on a work graph.
double modularity(const WorkGraph& g, std::span<const std::uint32_t> community);

// Community totals for incremental modularity updates: `inner` is twice the
// intra-community weight (self-loops included), `total` the summed weighted
// degree.
class LouvainState {
 public:
  /// Community ids must be < g.size().
  LouvainState(const WorkGraph& g, std::vector<std::uint32_t> community);

  std::size_t size() const noexcept { return community_.size(); }
  std::uint32_t community_of(std::size_t node) const noexcept { return community_[node]; }
  std::span<const std::uint32_t> communities() const noexcept { return community_; }
  double inner(std::uint32_t c) const noexcept { return inner_[c]; }
  double total(std::uint32_t c) const noexcept { return total_[c]; }

  /// Modularity change of moving `node` into community `target`.
  double move_gain(std::size_t node, std::uint32_t target) const;
  void move(std::size_t node, std::uint32_t target);

  /// Q from the maintained totals.
  double modularity() const;
  /// Q_c from the maintained totals.
  double contribution(std::uint32_t c) const;

  /// Gain of moving a node of degree k_i from `own` into `target`, given its
  /// edge weight towards each (self-loop excluded). `own_total_without` is
  /// the total of `own` after removing the node.
  double gain(double k_i, double k_target, double k_own, double target_total,
              double own_total_without) const noexcept;

  /// Applies a move whose neighbour weights are already known.
  void apply_move(std::size_t node, std::uint32_t target, double k_target, double k_own);

  const WorkGraph& graph() const noexcept { return *graph_; }

 private:
  double link_weight(std::size_t node, std::uint32_t c) const;

  const WorkGraph* graph_;
  std::vector<std::uint32_t> community_;
  std::vector<double> inner_;
  std::vector<double> total_;
  double m2_;
};

// Counters filled in by louvain() when a monitor is supplied. A violation is
// an accepted move, or a completed aggregation level, after which modularity
// is lower than before it.
struct LouvainMonitor {
  std::size_t moves = 0;
  std::size_t levels = 0;
  std::size_t violations = 0;

  void merge(const LouvainMonitor& other) {
    moves += other.moves;
    levels += other.levels;
    violations += other.violations;
  }
};

/// Smallest modularity gain that counts as an improvement. Guards against
/// cycling on floating-point ties.
inline constexpr double kMinGain = 1e-12;

// Greedy modularity maximisation from `init`: local moving in a seeded
// shuffled order until a full sweep makes no move, then aggregation, repeated
// until a level merges nothing. Output labels are drawn from the labels of
// `init`. Edgeless snapshots return `init` unchanged.
Partition louvain(const Snapshot& s, const Partition& init, std::uint64_t seed,
                  LouvainMonitor* monitor = nullptr);

}  // namespace evocd
