#include <gtest/gtest.h>

#include <limits>
#include <set>

#include "evocd/algorithms.hpp"
#include "evocd/errors.hpp"
#include "evocd/lfr.hpp"
#include "evocd/metrics.hpp"
#include "evocd/transforms.hpp"
#include "test_support.hpp"

using namespace evocd;
using evocd::testing::two_triangles;

namespace {

LfrGraph small_lfr(std::uint64_t seed) {
  LfrParams p;
  p.n = 150;
  p.max_comm = 50;
  p.seed = seed;
  return generate_lfr(p);
}

// The same snapshot repeated `count` times.
DynamicGraph repeated(const Snapshot& s, int count) {
  DynamicGraph g;
  for (int t = 0; t < count; ++t) g.snapshots.push_back(s.with_index(t));
  return g;
}

constexpr double kNeverUnbind = -std::numeric_limits<double>::infinity();

}  // namespace

TEST(AlgorithmNames, RoundTrip) {
  for (const Algorithm a : {Algorithm::GMA, Algorithm::AlphaGMA, Algorithm::SGMA, Algorithm::NeGMA}) {
    EXPECT_EQ(parse_algorithm(to_string(a)), a);
  }
  EXPECT_EQ(parse_algorithm("alphaGMA"), Algorithm::AlphaGMA);
  EXPECT_THROW(parse_algorithm("leiden"), ConfigError);
}

TEST(MemoryUpdate, BlendExamples) {
  MemoryGraph mem(0.0);
  memory_update(mem, Snapshot(0, {0, 1, 2}, {{0, 1, 0.5}}), 0.8);
  // Both present: 0.8 * 0.5 + 0.2 * 0.3.
  Snapshot out = memory_update(mem, Snapshot(1, {0, 1, 2}, {{0, 1, 0.3}, {1, 2, 0.3}}), 0.8);
  EXPECT_NEAR(out.edges()[0].w, 0.46, 1e-15);
  // No memory of (1,2): the current weight passes through.
  EXPECT_NEAR(out.edges()[1].w, 0.3, 1e-15);

  MemoryGraph vanish(0.0);
  memory_update(vanish, Snapshot(0, {0, 1}, {{0, 1, 0.5}}), 0.8);
  out = memory_update(vanish, Snapshot(1, {0, 1}, {}), 0.8);
  ASSERT_EQ(out.edge_count(), 1u);
  EXPECT_NEAR(out.edges()[0].w, 0.40, 1e-15);
  EXPECT_NEAR(vanish.weight(1, 0), 0.40, 1e-15);
}

TEST(MemoryUpdate, EvictionThreshold) {
  MemoryGraph evicting(1e-4), keeping(0.0);
  const Snapshot first(0, {0, 1}, {{0, 1, 1.0}});
  memory_update(evicting, first, 0.5);
  memory_update(keeping, first, 0.5);
  const Snapshot empty(1, {0, 1}, {});
  for (int i = 0; i < 20; ++i) {
    memory_update(evicting, empty, 0.5);
    memory_update(keeping, empty, 0.5);
  }
  // 0.5^20 < 1e-4.
  EXPECT_TRUE(evicting.empty());
  EXPECT_EQ(keeping.size(), 1u);
  EXPECT_NEAR(keeping.weight(0, 1), std::pow(0.5, 20), 1e-18);
}

TEST(MemoryUpdate, AbsentNodeKeepsRememberedEdges) {
  MemoryGraph mem;
  memory_update(mem, Snapshot(0, {0, 1, 2}, {{0, 1, 1.0}, {1, 2, 1.0}}), 0.8);
  // Node 2 is inactive: its edge survives at alpha * w_prev and the node is
  // carried in the smoothed snapshot.
  const Snapshot out = memory_update(mem, Snapshot(1, {0, 1}, {{0, 1, 1.0}}), 0.8);
  EXPECT_TRUE(out.contains(2));
  EXPECT_NEAR(mem.weight(1, 2), 0.8, 1e-15);
}

TEST(AlphaGma, ZeroAlphaIsGma) {
  const LfrGraph base = small_lfr(2);
  TransformConfig tc;
  tc.kind = TransformKind::Intermittence;
  tc.n_snapshots = 12;
  tc.start = 2;
  tc.end = 10;
  tc.seed = 5;
  const DynamicGraph g = evolve(base.snapshot, base.ground_truth, tc);
  AlgoConfig gma, alpha;
  gma.seed = alpha.seed = 77;
  alpha.algorithm = Algorithm::AlphaGMA;
  alpha.alpha = 0.0;
  EXPECT_EQ(run_sequence(g, gma), run_sequence(g, alpha));
}

TEST(AlphaGma, ResultRestrictedToActiveNodes) {
  MemoryGraph mem;
  AlgoConfig cfg;
  cfg.algorithm = Algorithm::AlphaGMA;
  run_alpha_gma(mem, two_triangles(0), cfg);
  const Snapshot fewer(1, {0, 1, 2, 3}, {{0, 1, 1.0}, {1, 2, 1.0}, {0, 2, 1.0}});
  const Partition p = run_alpha_gma(mem, fewer, cfg);
  EXPECT_TRUE(p.covers(fewer));
}

TEST(AlphaGma, StaticSequenceTracksGma) {
  // Blending a weight with itself leaves it unchanged, so only the seeds matter.
  const LfrGraph base = small_lfr(4);
  AlgoConfig gma, alpha;
  gma.seed = alpha.seed = 9;
  alpha.algorithm = Algorithm::AlphaGMA;
  const auto g = repeated(base.snapshot, 8);
  const PartitionSeries a = run_sequence(g, alpha), b = run_sequence(g, gma);
  ASSERT_EQ(a.size(), b.size());
  for (std::size_t i = 0; i < a.size(); ++i) EXPECT_TRUE(same_grouping(a[i].second, b[i].second)) << "t=" << i;
}

TEST(Sgma, FirstSnapshotIsGmaAndRerunDoesNotLowerModularity) {
  const LfrGraph base = small_lfr(6);
  AlgoConfig cfg;
  cfg.seed = 3;
  const Partition gma = run_gma(base.snapshot, cfg);
  EXPECT_EQ(run_sgma(base.snapshot, Partition(), cfg), gma);
  const Partition again = run_sgma(base.snapshot.with_index(1), gma, cfg);
  EXPECT_GE(modularity(base.snapshot, again), modularity(base.snapshot, gma) - 1e-12);
}

TEST(Sgma, NewNodesStartAsSingletons) {
  const Snapshot s(1, {0, 1, 2, 3, 4, 5, 6},
                   {{0, 1, 1.0}, {1, 2, 1.0}, {0, 2, 1.0}, {3, 4, 1.0}, {4, 5, 1.0}, {3, 5, 1.0}, {5, 6, 1.0}});
  const Partition prev({{0, 0}, {1, 0}, {2, 0}, {3, 1}, {4, 1}, {5, 1}});
  const Partition p = run_sgma(s, prev, AlgoConfig{});
  EXPECT_TRUE(p.covers(s));
  EXPECT_EQ(p.community_of(6), p.community_of(5));
}

TEST(NegmaInit, WeightedVotePicksHeaviestLabel) {
  const Snapshot prev_s(0, {1, 2, 3}, {{2, 3, 1.0}});
  const Partition prev({{1, 10}, {2, 20}, {3, 20}});
  const Snapshot s(1, {1, 2, 3, 9}, {{2, 3, 1.0}, {1, 9, 0.9}, {2, 9, 0.5}, {3, 9, 0.3}});
  EXPECT_EQ(negma_init(s, prev_s, prev, kNeverUnbind, 1).community_of(9), 10);
}

TEST(NegmaInit, VoteTiesGoToSmallerLabel) {
  const Snapshot prev_s(0, {1, 2}, {{1, 2, 1.0}});
  const Partition prev({{1, 5}, {2, 3}});
  const Snapshot s(1, {1, 2, 9}, {{1, 2, 1.0}, {1, 9, 0.5}, {2, 9, 0.5}});
  for (std::uint64_t seed = 0; seed < 4; ++seed) {
    EXPECT_EQ(negma_init(s, prev_s, prev, kNeverUnbind, seed).community_of(9), 3);
  }
}

TEST(NegmaInit, VotesSeeEarlierNewNodes) {
  // 8 only touches 9 and vice versa besides 9's edge to community 4.
  const Snapshot prev_s(0, {1, 2}, {{1, 2, 1.0}});
  const Partition prev({{1, 4}, {2, 4}});
  const Snapshot s(1, {1, 2, 8, 9}, {{1, 2, 1.0}, {1, 9, 1.0}, {8, 9, 1.0}});
  // Whatever the order, 9 joins 4; 8 either sees 9 (joins 4) or nobody yet
  // (fresh label).
  const Partition p = negma_init(s, prev_s, prev, kNeverUnbind, 0);
  EXPECT_EQ(p.community_of(9), 4);
}

TEST(NegmaInit, UnchangedSnapshotKeepsPrevious) {
  const LfrGraph base = small_lfr(8);
  const Partition prev = run_gma(base.snapshot, AlgoConfig{});
  EXPECT_EQ(negma_init(base.snapshot.with_index(1), base.snapshot, prev, 0.0, 1), prev);
}

TEST(NegmaInit, WeakenedCommunityIsDissolved) {
  // Three unit triangles; the first one's edges drop to the weight floor.
  auto triangles = [](double first) {
    std::vector<Edge> e;
    for (NodeId c = 0; c < 3; ++c) {
      const double w = c == 0 ? first : 1.0;
      e.push_back({3 * c, 3 * c + 1, w});
      e.push_back({3 * c + 1, 3 * c + 2, w});
      e.push_back({3 * c, 3 * c + 2, w});
    }
    return e;
  };
  const std::vector<NodeId> nodes{0, 1, 2, 3, 4, 5, 6, 7, 8};
  const Snapshot prev_s(0, nodes, triangles(1.0));
  const Snapshot s(1, nodes, triangles(0.001));
  const Partition prev({{0, 0}, {1, 0}, {2, 0}, {3, 1}, {4, 1}, {5, 1}, {6, 2}, {7, 2}, {8, 2}});
  const Partition p = negma_init(s, prev_s, prev, 0.0, 1);
  const std::set<CommunityId> labels{p.community_of(0), p.community_of(1), p.community_of(2)};
  EXPECT_EQ(labels.size(), 3u);
  EXPECT_FALSE(labels.contains(0) || labels.contains(1) || labels.contains(2));
  for (NodeId n = 3; n < 9; ++n) EXPECT_EQ(p.community_of(n), prev.community_of(n));
}

TEST(Negma, NeverUnbindMatchesSgmaWithoutNewNodes) {
  const LfrGraph base = small_lfr(10);
  TransformConfig tc;
  tc.kind = TransformKind::Split;
  tc.n_snapshots = 10;
  tc.start = 2;
  tc.end = 8;
  tc.tau = 0.2;
  tc.seed = 1;
  const DynamicGraph g = evolve(base.snapshot, base.ground_truth, tc);
  AlgoConfig cfg;
  cfg.seed = 21;
  cfg.theta_q = kNeverUnbind;
  Partition prev = run_gma(g.snapshots[0], cfg);
  for (std::size_t t = 1; t < g.snapshots.size(); ++t) {
    const Partition a = run_negma(g.snapshots[t], g.snapshots[t - 1], prev, cfg);
    const Partition b = run_sgma(g.snapshots[t], prev, cfg);
    EXPECT_EQ(a, b) << "t=" << t;
    prev = b;
  }
}

TEST(RunSequence, DeterministicAndTimed) {
  const LfrGraph base = small_lfr(12);
  TransformConfig tc;
  tc.kind = TransformKind::Birth;
  tc.n_snapshots = 15;
  tc.start = 3;
  tc.end = 12;
  tc.tau = 0.2;
  tc.seed = 2;
  const DynamicGraph g = evolve(base.snapshot, base.ground_truth, tc);
  for (const Algorithm a : {Algorithm::GMA, Algorithm::AlphaGMA, Algorithm::SGMA, Algorithm::NeGMA}) {
    AlgoConfig cfg;
    cfg.algorithm = a;
    cfg.seed = 5;
    SequenceStats stats;
    const PartitionSeries first = run_sequence(g, cfg, &stats);
    EXPECT_EQ(first, run_sequence(g, cfg)) << to_string(a);
    EXPECT_EQ(first.size(), g.snapshots.size());
    EXPECT_EQ(stats.seconds.size(), g.snapshots.size());
    EXPECT_EQ(stats.monitor.violations, 0u);
    for (std::size_t t = 0; t < first.size(); ++t) EXPECT_TRUE(first[t].second.covers(g.snapshots[t]));
  }
}

TEST(RunSequence, EveryAlgorithmImprovesOnItsInit) {
  const LfrGraph base = small_lfr(14);
  const Snapshot next = base.snapshot.with_index(1);
  AlgoConfig cfg;
  const Partition prev = run_gma(base.snapshot, cfg);
  const Partition init = negma_init(next, base.snapshot, prev, 0.0, 3);
  EXPECT_GE(modularity(next, run_negma(next, base.snapshot, prev, cfg)), modularity(next, init) - 1e-12);
  EXPECT_GE(modularity(next, run_sgma(next, prev, cfg)), modularity(next, prev) - 1e-12);
}
