#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "evocd/graph.hpp"
#include "evocd/louvain.hpp"

namespace evocd {

enum class Algorithm { GMA, AlphaGMA, SGMA, NeGMA };

std::string_view to_string(Algorithm a) noexcept;
/// Accepts "GMA", "aGMA"/"alphaGMA", "sGMA", "NeGMA" (case-insensitive).
Algorithm parse_algorithm(std::string_view name);

struct AlgoConfig {
  Algorithm algorithm = Algorithm::GMA;
  double alpha = 0.8;      // αGMA memory, in [0,1)
  double theta_q = 0.0;    // NeGMA unbind threshold
  bool evict_memory = true;
  double memory_epsilon = 1e-4;
  std::uint64_t seed = 0;

  void validate() const;
};

// Edge weights remembered by αGMA across snapshots.
class MemoryGraph {
 public:
  /// Remembered edges whose blended weight drops below `evict_below` are
  /// forgotten. 0 keeps every edge with positive weight.
  explicit MemoryGraph(double evict_below = 1e-4) : evict_below_(evict_below) {}

  std::size_t size() const noexcept { return weights_.size(); }
  bool empty() const noexcept { return weights_.empty(); }
  /// Remembered weight of an edge, 0 when unknown.
  double weight(NodeId a, NodeId b) const;
  double evict_below() const noexcept { return evict_below_; }

  friend Snapshot memory_update(MemoryGraph& mem, const Snapshot& s_hat, double alpha);

 private:
  std::map<std::pair<NodeId, NodeId>, double> weights_;
  double evict_below_;
};

// Smoothed snapshot over the union of current and remembered edges:
//   both known      (1-α)·ŵ + α·w_prev
//   no memory       ŵ
//   absent now      α·w_prev
// The memory is overwritten with the emitted weights.
Snapshot memory_update(MemoryGraph& mem, const Snapshot& s_hat, double alpha);

Partition run_gma(const Snapshot& s, const AlgoConfig& cfg, LouvainMonitor* monitor = nullptr);

/// Louvain on the smoothed snapshot; the result is restricted to s_hat's nodes.
Partition run_alpha_gma(MemoryGraph& mem, const Snapshot& s_hat, const AlgoConfig& cfg,
                        LouvainMonitor* monitor = nullptr);

/// Louvain warm-started from `prev` for surviving nodes, fresh singletons for
/// new ones.
Partition run_sgma(const Snapshot& s, const Partition& prev, const AlgoConfig& cfg,
                   LouvainMonitor* monitor = nullptr);

// Initial assignment of NeGMA:
//  1. surviving nodes keep their label from `prev`;
//  2. new nodes, in seeded shuffled order, take the label with the largest
//     total edge weight among already-labelled neighbours (ties to the smaller
//     label) or a fresh singleton label when none is labelled;
//  3. every label present in both `prev` and the tentative assignment whose
//     Q_c dropped (Q_c on s minus Q_c on s_prev) below theta_q is dissolved
//     into fresh singletons. Labels new at this snapshot are not gated.
Partition negma_init(const Snapshot& s, const Snapshot& s_prev, const Partition& prev,
                     double theta_q, std::uint64_t seed);

/// negma_init followed by Louvain refinement.
Partition run_negma(const Snapshot& s, const Snapshot& s_prev, const Partition& prev,
                    const AlgoConfig& cfg, LouvainMonitor* monitor = nullptr);

struct SequenceStats {
  std::vector<double> seconds;  // detection wall clock per snapshot
  LouvainMonitor monitor;
};

// Runs one algorithm over every snapshot in order, carrying the previous
// partition, previous snapshot and memory as the algorithm requires. The
// Louvain seed of snapshot t is derive_seed(cfg.seed, t).
PartitionSeries run_sequence(const DynamicGraph& g, const AlgoConfig& cfg,
                             SequenceStats* stats = nullptr);

}  // namespace evocd
