#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string_view>
#include <utility>
#include <vector>

#include "evocd/graph.hpp"
#include "evocd/rng.hpp"

namespace evocd {

enum class TransformKind { Expansion, Intermittence, Switch, Merge, Split, Death, Birth, Mixing, Removal };
enum class Scenario { Noise, Morphing, Disruptive };

inline constexpr TransformKind kAllTransforms[] = {
    TransformKind::Expansion, TransformKind::Intermittence, TransformKind::Switch,
    TransformKind::Merge,     TransformKind::Split,         TransformKind::Death,
    TransformKind::Birth,     TransformKind::Mixing,        TransformKind::Removal};

Scenario scenario_of(TransformKind kind) noexcept;
std::string_view to_string(TransformKind kind) noexcept;
std::string_view to_string(Scenario scenario) noexcept;
/// Case-insensitive; throws ConfigError for unknown names.
TransformKind parse_transform(std::string_view name);

struct TransformConfig {
  TransformKind kind = TransformKind::Merge;
  int n_snapshots = 150;  // snapshots 0..n_snapshots
  int start = 25;         // first transformed snapshot (>= 1)
  int end = 125;          // last transformed snapshot
  double tau = 0.01;      // weight change per snapshot
  double phi_int = 0.2;
  double phi_swi = 0.005;
  int gamma = 10;
  double phi_rem_lo = 0.005;  // phi_rem is drawn once per graph from [lo, hi]
  double phi_rem_hi = 0.02;
  double phi_mix = 0.002;
  int targets = 2;              // communities (or pairs) affected by a morph
  double birth_fraction = 0.25; // share of each community emigrating in Birth
  double growth = 0.005;        // Expansion: new nodes per snapshot, as a share of |V^0|
  double mu = 0.2;              // Expansion: external share of a new node's edges
  double weight_floor = 0.001;  // loosened weights stop here until the window ends
  std::uint64_t seed = 0;

  /// Throws ConfigError naming the first violated constraint.
  void validate() const;
};

/// Reappearance probability of a node that has been off for t_off snapshots.
double switch_return_probability(int t_off, int gamma) noexcept;

using EdgeKey = std::pair<NodeId, NodeId>;

struct MergePlan {
  CommunityId a = 0;
  CommunityId b = 0;
  std::vector<EdgeKey> cross;  // planned cross edges, existing ones included
  bool done = false;
};

// Everything a transformation decides once, before the first step.
struct TransformPlan {
  std::vector<MergePlan> merges;
  std::map<NodeId, int> split_side;        // Split: node -> half (0 or 1)
  std::set<CommunityId> split_communities;
  std::set<CommunityId> dying;              // Death
  std::set<EdgeKey> loosen;                 // edges weakened every step
  std::set<EdgeKey> tighten;                // edges strengthened every step
  std::vector<int> base_degrees;            // Expansion degree pool
  double phi_rem = 0.0;                     // Removal
  std::optional<Partition> final_gt;        // GT^N of morphing transformations
  int switch_t = -1;                        // snapshot at which GT^t becomes GT^N
};

// Mutable evolution state. `current` and `gt` describe the last emitted
// snapshot; the maps hold the working copy the next step edits.
struct EvolutionState {
  Snapshot current;
  Partition gt;
  std::map<NodeId, int> inactive;       // node -> snapshots spent removed
  TransformPlan plan;

  std::set<NodeId> nodes;               // active nodes
  std::map<EdgeKey, double> edges;      // active edges
  std::map<EdgeKey, double> parked;     // edges of inactive nodes
  std::map<NodeId, CommunityId> labels; // GT^0 labels of every node ever seen
  std::vector<NodeId> returning;        // Intermittence: removed at the last step
  NodeId next_node = 0;
  Rng rng{0};
};

/// Chooses the affected communities, pairs and nodes and computes GT^N.
/// Throws ConfigError when the base has too few communities for `targets`.
EvolutionState plan(const Snapshot& base, const Partition& gt0, const TransformConfig& cfg);

/// Produces snapshot t from the state's last snapshot. Outside [start, end]
/// this copies the graph (restoring inactive nodes right after the window and
/// deleting floored edges at its end). Throws EvolutionError when Removal runs
/// out of nodes.
EvolutionState step(EvolutionState state, int t, const TransformConfig& cfg);

/// Full sequence of n_snapshots + 1 snapshots with aligned ground truth.
DynamicGraph evolve(const Snapshot& base, const Partition& gt0, const TransformConfig& cfg);

}  // namespace evocd
