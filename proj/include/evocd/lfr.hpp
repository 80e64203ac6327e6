#pragma once

#include <cstdint>
#include <utility>

#include "evocd/graph.hpp"

namespace evocd {

/// Parameters of the LFR-style generator. Defaults are the desk profile
/// except for n (see harness profiles).
struct LfrParams {
  int n = 500;
  double mu = 0.2;             // fraction of inter-community stubs, in (0,1)
  double deg_exponent = 2.5;   // degree power law, > 1
  double comm_exponent = 1.5;  // community-size power law, > 1
  double avg_degree = 10.0;
  int max_degree = 50;
  int min_comm = 10;
  int max_comm = 60;
  std::uint64_t seed = 1;

  /// Throws ConfigError naming the first violated constraint.
  void validate() const;
};

struct LfrGraph {
  Snapshot snapshot;
  Partition ground_truth;
};

/// Generates snapshot 0 (nodes 0..n-1) and its ground-truth partition.
/// Deterministic in params. Throws GenerationError when the stub matching
/// cannot be completed.
LfrGraph generate_lfr(const LfrParams& params);

/// Weighted fraction of edge endpoints whose edge crosses communities:
/// sum of inter-community weights over w*. 0 for an edgeless snapshot.
double empirical_mixing(const Snapshot& s, const Partition& p);

}  // namespace evocd
