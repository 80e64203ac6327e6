#include <gtest/gtest.h>

#include <cmath>
#include <set>

#include "evocd/errors.hpp"
#include "evocd/lfr.hpp"
#include "evocd/transforms.hpp"

using namespace evocd;

namespace {

// `k` cliques of `size` nodes (weight 0.8) joined in a ring by one 0.1 edge.
LfrGraph cliques(int k, int size) {
  std::vector<NodeId> nodes;
  std::vector<Edge> edges;
  std::vector<Partition::Entry> gt;
  for (int c = 0; c < k; ++c) {
    for (int i = 0; i < size; ++i) {
      const NodeId u = c * size + i;
      nodes.push_back(u);
      gt.emplace_back(u, c);
      for (int j = i + 1; j < size; ++j) edges.push_back({u, c * size + j, 0.8});
    }
    edges.push_back({c * size, ((c + 1) % k) * size + 1, 0.1});
  }
  return {Snapshot(0, std::move(nodes), std::move(edges)), Partition(std::move(gt))};
}

LfrGraph lfr(int n, std::uint64_t seed) {
  LfrParams p;
  p.n = n;
  p.max_comm = 50;
  p.seed = seed;
  return generate_lfr(p);
}

TransformConfig short_cfg(TransformKind kind, std::uint64_t seed = 1) {
  TransformConfig c;
  c.kind = kind;
  c.n_snapshots = 30;
  c.start = 5;
  c.end = 25;
  c.tau = 0.05;
  c.seed = seed;
  return c;
}

double weighted_degree_of(const Snapshot& s, NodeId n) { return s.degree_at(*s.index_of(n)); }

std::map<EdgeKey, double> edge_map(const Snapshot& s) {
  std::map<EdgeKey, double> m;
  for (const Edge& e : s.edges()) m[{e.u, e.v}] = e.w;
  return m;
}

}  // namespace

TEST(TransformNames, ScenariosAndParsing) {
  EXPECT_EQ(scenario_of(TransformKind::Expansion), Scenario::Noise);
  EXPECT_EQ(scenario_of(TransformKind::Intermittence), Scenario::Noise);
  EXPECT_EQ(scenario_of(TransformKind::Switch), Scenario::Noise);
  for (auto k : {TransformKind::Merge, TransformKind::Split, TransformKind::Death, TransformKind::Birth}) {
    EXPECT_EQ(scenario_of(k), Scenario::Morphing);
  }
  EXPECT_EQ(scenario_of(TransformKind::Mixing), Scenario::Disruptive);
  EXPECT_EQ(scenario_of(TransformKind::Removal), Scenario::Disruptive);
  for (const TransformKind k : kAllTransforms) EXPECT_EQ(parse_transform(to_string(k)), k);
  EXPECT_THROW(parse_transform("teleport"), ConfigError);
}

TEST(TransformConfig, Validation) {
  TransformConfig c;
  EXPECT_NO_THROW(c.validate());
  c.start = 0;
  EXPECT_THROW(c.validate(), ConfigError);
  c = TransformConfig{};
  c.end = 200;
  EXPECT_THROW(c.validate(), ConfigError);
  c = TransformConfig{};
  c.tau = 1.5;
  EXPECT_THROW(c.validate(), ConfigError);
}

TEST(SwitchReturn, ClampedExponential) {
  EXPECT_DOUBLE_EQ(switch_return_probability(10, 10), 1.0);
  EXPECT_DOUBLE_EQ(switch_return_probability(15, 10), 1.0);
  EXPECT_NEAR(switch_return_probability(9, 10), std::exp(-1.0), 1e-15);
  EXPECT_NEAR(switch_return_probability(1, 10), std::exp(-9.0), 1e-15);
}

TEST(Plan, MergeHalvesCommunityCount) {
  const LfrGraph g = cliques(4, 8);
  const EvolutionState s = plan(g.snapshot, g.ground_truth, short_cfg(TransformKind::Merge));
  ASSERT_TRUE(s.plan.final_gt.has_value());
  EXPECT_EQ(s.plan.final_gt->community_count(), 2u);
  EXPECT_EQ(s.plan.merges.size(), 2u);
}

TEST(Plan, SplitAddsOneCommunity) {
  const LfrGraph g = cliques(4, 8);
  TransformConfig c = short_cfg(TransformKind::Split);
  c.targets = 1;
  const EvolutionState s = plan(g.snapshot, g.ground_truth, c);
  EXPECT_EQ(s.plan.final_gt->community_count(), 5u);
  // Each half of the split community keeps its nodes together.
  const CommunityId split = *s.plan.split_communities.begin();
  std::map<int, std::set<CommunityId>> by_side;
  for (const auto& [n, side] : s.plan.split_side) {
    EXPECT_EQ(g.ground_truth.community_of(n), split);
    by_side[side].insert(s.plan.final_gt->community_of(n));
  }
  ASSERT_EQ(by_side.size(), 2u);
  EXPECT_EQ(by_side[0].size(), 1u);
  EXPECT_EQ(by_side[1].size(), 1u);
  EXPECT_NE(*by_side[0].begin(), *by_side[1].begin());
}

TEST(Plan, DeathMapsDeadNodesToSurvivors) {
  const LfrGraph g = cliques(4, 8);
  TransformConfig c = short_cfg(TransformKind::Death);
  c.targets = 1;
  const EvolutionState s = plan(g.snapshot, g.ground_truth, c);
  EXPECT_EQ(s.plan.final_gt->community_count(), 3u);
  ASSERT_EQ(s.plan.dying.size(), 1u);
  for (const auto& [n, c0] : g.ground_truth.entries()) {
    EXPECT_FALSE(s.plan.dying.contains(s.plan.final_gt->community_of(n)));
  }
}

TEST(Plan, BirthCreatesCommunities) {
  const LfrGraph g = lfr(250, 3);
  TransformConfig c = short_cfg(TransformKind::Birth);
  const EvolutionState s = plan(g.snapshot, g.ground_truth, c);
  EXPECT_GT(s.plan.final_gt->community_count(), g.ground_truth.community_count());
  EXPECT_EQ(s.plan.final_gt->domain(), g.ground_truth.domain());
}

TEST(Plan, TooFewCommunitiesIsConfigError) {
  const LfrGraph g = cliques(4, 8);
  TransformConfig c = short_cfg(TransformKind::Merge);
  c.targets = 3;
  EXPECT_THROW(plan(g.snapshot, g.ground_truth, c), ConfigError);
  c.kind = TransformKind::Death;
  c.targets = 4;
  EXPECT_THROW(plan(g.snapshot, g.ground_truth, c), ConfigError);
  c.kind = TransformKind::Split;
  c.targets = 5;
  EXPECT_THROW(plan(g.snapshot, g.ground_truth, c), ConfigError);
}

TEST(Step, IntermittenceRemovesTwentyPercentForOneSnapshot) {
  const LfrGraph g = cliques(10, 10);
  TransformConfig c = short_cfg(TransformKind::Intermittence);
  c.phi_int = 0.2;
  c.start = c.end = 5;
  const DynamicGraph d = evolve(g.snapshot, g.ground_truth, c);
  EXPECT_EQ(d.snapshots[4].node_count(), 100u);
  EXPECT_EQ(d.snapshots[5].node_count(), 80u);
  EXPECT_EQ(d.snapshots[6].node_count(), 100u);
  EXPECT_EQ(d.snapshots[6].with_index(0), g.snapshot);
}

TEST(Step, InstantaneousMergeRaisesEveryPlannedEdgeToOne) {
  const LfrGraph g = lfr(250, 5);
  TransformConfig c = short_cfg(TransformKind::Merge);
  c.tau = 1.0;
  c.start = c.end = 5;
  EvolutionState s = plan(g.snapshot, g.ground_truth, c);
  for (int t = 1; t <= 5; ++t) s = step(std::move(s), t, c);
  const auto edges = edge_map(s.current);
  for (const MergePlan& m : s.plan.merges) {
    ASSERT_FALSE(m.cross.empty());
    for (const EdgeKey& e : m.cross) EXPECT_DOUBLE_EQ(edges.at(e), 1.0);
  }
  EXPECT_GT(modularity(s.current, *s.plan.final_gt), modularity(s.current, g.ground_truth));
}

TEST(Step, RemovalExhaustionIsEvolutionError) {
  const LfrGraph g = cliques(4, 8);
  TransformConfig c = short_cfg(TransformKind::Removal);
  c.phi_rem_lo = c.phi_rem_hi = 1.0;
  EXPECT_THROW(evolve(g.snapshot, g.ground_truth, c), EvolutionError);
}

TEST(Evolve, ShapeGroundTruthAndMetadata) {
  const LfrGraph g = lfr(150, 7);
  for (const TransformKind k : kAllTransforms) {
    const TransformConfig c = short_cfg(k);
    const DynamicGraph d = evolve(g.snapshot, g.ground_truth, c);
    ASSERT_EQ(d.snapshots.size(), 31u) << to_string(k);
    EXPECT_NO_THROW(d.validate());
    EXPECT_EQ(d.snapshots[0], g.snapshot);
    for (int t = 0; t < c.start; ++t) {
      EXPECT_EQ(d.snapshots[t].with_index(0), g.snapshot) << to_string(k) << " t=" << t;
      EXPECT_EQ(d.ground_truth[t], g.ground_truth);
    }
    for (std::size_t t = 0; t < d.snapshots.size(); ++t) {
      EXPECT_TRUE(d.ground_truth[t].covers(d.snapshots[t])) << to_string(k) << " t=" << t;
    }
    EXPECT_EQ(d.meta.at("transform"), std::string(to_string(k)));
    EXPECT_EQ(d.meta.at("start"), "5");
    EXPECT_EQ(d.final_ground_truth.has_value(), scenario_of(k) == Scenario::Morphing) << to_string(k);
  }
}

TEST(Evolve, DeterministicInSeed) {
  const LfrGraph g = lfr(150, 8);
  for (const TransformKind k : kAllTransforms) {
    const DynamicGraph a = evolve(g.snapshot, g.ground_truth, short_cfg(k, 3));
    const DynamicGraph b = evolve(g.snapshot, g.ground_truth, short_cfg(k, 3));
    EXPECT_EQ(a.snapshots, b.snapshots) << to_string(k);
    EXPECT_EQ(a.ground_truth, b.ground_truth) << to_string(k);
    EXPECT_EQ(a.final_ground_truth, b.final_ground_truth) << to_string(k);
    EXPECT_NE(a.snapshots, evolve(g.snapshot, g.ground_truth, short_cfg(k, 4)).snapshots) << to_string(k);
  }
}

TEST(Evolve, NoiseKeepsInitialGroundTruthOnSurvivors) {
  const LfrGraph g = lfr(200, 9);
  for (const TransformKind k : {TransformKind::Expansion, TransformKind::Intermittence, TransformKind::Switch}) {
    const DynamicGraph d = evolve(g.snapshot, g.ground_truth, short_cfg(k));
    for (const Snapshot& s : d.snapshots) {
      const auto survivors = intersect(s.nodes(), g.snapshot.nodes());
      EXPECT_EQ(restrict(d.ground_truth[s.t()], survivors), restrict(g.ground_truth, survivors)) << to_string(k);
    }
  }
}

TEST(Evolve, ExpansionGrowsAndExtendsGroundTruth) {
  const LfrGraph g = lfr(200, 10);
  const TransformConfig c = short_cfg(TransformKind::Expansion);
  const DynamicGraph d = evolve(g.snapshot, g.ground_truth, c);
  const auto per_step = static_cast<std::size_t>(std::ceil(c.growth * 200));
  for (int t = c.start; t <= c.end; ++t) {
    EXPECT_EQ(d.snapshots[t].node_count(), d.snapshots[t - 1].node_count() + per_step);
  }
  EXPECT_EQ(d.snapshots.back().node_count(), d.snapshots[c.end].node_count());
  const auto base = g.snapshot.nodes();
  EXPECT_EQ(restrict(d.ground_truth.back(), base), g.ground_truth);
  const auto existing = g.ground_truth.communities();
  for (const CommunityId c2 : d.ground_truth.back().communities()) {
    EXPECT_TRUE(std::binary_search(existing.begin(), existing.end(), c2));
  }
}

TEST(Evolve, IntermittentNodesReturnWithTheirEdges) {
  const LfrGraph g = lfr(200, 11);
  const TransformConfig c = short_cfg(TransformKind::Intermittence);
  const DynamicGraph d = evolve(g.snapshot, g.ground_truth, c);
  const auto base = edge_map(g.snapshot);
  for (int t = c.start; t < c.n_snapshots; ++t) {
    const Snapshot& now = d.snapshots[t];
    const Snapshot& after = d.snapshots[t + 1];
    // Every snapshot is the base graph induced on its active nodes.
    std::map<EdgeKey, double> induced;
    for (const auto& [key, w] : base) {
      if (after.contains(key.first) && after.contains(key.second)) induced[key] = w;
    }
    EXPECT_EQ(edge_map(after), induced) << "t=" << t + 1;
    for (const NodeId n : d.snapshots[t - 1].nodes()) {
      if (!now.contains(n)) EXPECT_TRUE(after.contains(n)) << "node " << n << " removed at " << t;
    }
  }
}

TEST(Evolve, NoEdgesTouchInactiveNodes) {
  const LfrGraph g = lfr(200, 12);
  for (const TransformKind k : {TransformKind::Intermittence, TransformKind::Switch, TransformKind::Removal}) {
    TransformConfig c = short_cfg(k);
    EvolutionState s = plan(g.snapshot, g.ground_truth, c);
    for (int t = 1; t <= c.n_snapshots; ++t) {
      s = step(std::move(s), t, c);
      for (const auto& [n, off] : s.inactive) EXPECT_FALSE(s.current.contains(n));
      for (const auto& [key, w] : s.edges) {
        EXPECT_TRUE(s.nodes.contains(key.first) && s.nodes.contains(key.second));
        EXPECT_GT(w, 0.0);
        EXPECT_LE(w, 1.0);
      }
    }
  }
}

TEST(Evolve, MixingPreservesWeightedDegrees) {
  const LfrGraph g = lfr(200, 13);
  const TransformConfig c = short_cfg(TransformKind::Mixing);
  const DynamicGraph d = evolve(g.snapshot, g.ground_truth, c);
  EXPECT_NE(d.snapshots.back().edges().size(), 0u);
  EXPECT_NE(edge_map(d.snapshots.back()), edge_map(g.snapshot));
  for (std::size_t t = 1; t < d.snapshots.size(); ++t) {
    for (const NodeId n : g.snapshot.nodes()) {
      ASSERT_NEAR(weighted_degree_of(d.snapshots[t], n), weighted_degree_of(d.snapshots[t - 1], n), 1e-9);
    }
  }
}

TEST(Evolve, RemovalShrinksEverySnapshotOfTheWindow) {
  const LfrGraph g = lfr(250, 14);
  TransformConfig c;
  c.kind = TransformKind::Removal;
  c.phi_rem_lo = c.phi_rem_hi = 0.01;
  c.seed = 2;
  const DynamicGraph d = evolve(g.snapshot, g.ground_truth, c);
  ASSERT_EQ(d.snapshots.size(), 151u);
  for (int t = c.start; t <= c.n_snapshots; ++t) {
    if (t <= c.end) {
      EXPECT_LT(d.snapshots[t].node_count(), d.snapshots[t - 1].node_count()) << t;
    } else {
      EXPECT_EQ(d.snapshots[t].node_count(), d.snapshots[t - 1].node_count()) << t;
    }
  }
}

TEST(Evolve, GradualMergeTightensAcrossTheWindow) {
  const LfrGraph g = lfr(250, 15);
  TransformConfig c;
  c.kind = TransformKind::Merge;
  c.seed = 3;
  const DynamicGraph d = evolve(g.snapshot, g.ground_truth, c);
  const Partition& gtN = *d.final_ground_truth;
  auto cross_weight = [&](const Snapshot& s) {
    double w = 0.0;
    for (const Edge& e : s.edges()) {
      if (g.ground_truth.community_of(e.u) != g.ground_truth.community_of(e.v) &&
          gtN.community_of(e.u) == gtN.community_of(e.v)) {
        w += e.w;
      }
    }
    return w;
  };
  int rising = 0;
  for (int t = 1; t <= c.n_snapshots; ++t) {
    const double prev = cross_weight(d.snapshots[t - 1]), now = cross_weight(d.snapshots[t]);
    if (t < c.start || t > c.end) {
      EXPECT_EQ(now, prev) << t;
    } else {
      EXPECT_GE(now, prev) << t;
      if (now > prev) ++rising;
    }
  }
  EXPECT_GE(rising, 50);
  EXPECT_GT(modularity(d.snapshots.back(), gtN), modularity(d.snapshots.back(), g.ground_truth));
  const int switch_t = std::stoi(d.meta.at("gt_switch_t"));
  EXPECT_GT(switch_t, c.start);
  EXPECT_LT(switch_t, c.end);
  EXPECT_EQ(d.ground_truth[switch_t - 1], g.ground_truth);
  EXPECT_EQ(d.ground_truth[switch_t], gtN);
}
