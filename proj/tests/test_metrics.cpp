#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <map>

#include "evocd/errors.hpp"
#include "evocd/metrics.hpp"
#include "evocd/rng.hpp"
#include "ami_oracle.hpp"
#include "test_support.hpp"

using namespace evocd;
using evocd::testing::AmiOracle;
using evocd::testing::for_each_set_partition;
using evocd::testing::partition_from_labels;
using evocd::testing::random_partition;

namespace {

std::vector<std::vector<int>> all_partitions(int n) {
  std::vector<std::vector<int>> out;
  for_each_set_partition(n, [&](const std::vector<int>& labels) { out.push_back(labels); });
  return out;
}

Partition relabelled(const Partition& p, CommunityId offset, CommunityId scale) {
  std::vector<Partition::Entry> e;
  for (const auto& [n, c] : p.entries()) e.emplace_back(n, offset + scale * c);
  return Partition(std::move(e));
}

PartitionSeries series_of(std::initializer_list<Partition> ps, int first_t = 0) {
  PartitionSeries s;
  int t = first_t;
  for (const Partition& p : ps) s.emplace_back(t++, p);
  return s;
}

std::vector<NodeId> iota_nodes(int n) {
  std::vector<NodeId> v(n);
  for (int i = 0; i < n; ++i) v[i] = i;
  return v;
}

}  // namespace

TEST(Ami, IdentityIsOne) {
  Rng rng(1);
  const auto nodes = iota_nodes(60);
  for (int k = 1; k <= 6; ++k) {
    const Partition p = random_partition(rng, nodes, k);
    EXPECT_DOUBLE_EQ(ami(p, p), 1.0);
  }
  EXPECT_DOUBLE_EQ(ami(Partition::uniform(nodes), Partition::uniform(nodes, 4)), 1.0);
}

TEST(Ami, SymmetricAndPermutationInvariant) {
  Rng rng(2);
  const auto nodes = iota_nodes(80);
  for (int i = 0; i < 50; ++i) {
    const Partition a = random_partition(rng, nodes, 2 + static_cast<int>(rng.below(5)));
    const Partition b = random_partition(rng, nodes, 2 + static_cast<int>(rng.below(5)));
    EXPECT_NEAR(ami(a, b), ami(b, a), 1e-12);
    EXPECT_NEAR(ami(a, b), ami(relabelled(a, 100, -1), relabelled(b, 7, 3)), 1e-12);
  }
}

TEST(Ami, DegenerateCases) {
  const auto nodes = iota_nodes(6);
  const Partition one = Partition::uniform(nodes);
  const Partition two({{0, 0}, {1, 0}, {2, 0}, {3, 1}, {4, 1}, {5, 1}});
  EXPECT_NEAR(ami(one, two), 0.0, 1e-15);
  EXPECT_NEAR(ami(two, one), 0.0, 1e-15);
  EXPECT_THROW(ami(Partition({{0, 0}}), Partition({{1, 0}})), DomainError);
}

TEST(Ami, UsesDomainIntersection) {
  const Partition a({{0, 0}, {1, 0}, {2, 1}, {3, 1}, {9, 5}});
  const Partition b({{0, 3}, {1, 3}, {2, 4}, {3, 4}, {7, 3}});
  EXPECT_DOUBLE_EQ(ami(a, b), 1.0);
}

TEST(Ami, MatchesBruteForceOnAllSmallPartitions) {
  AmiOracle oracle;
  for (int n = 1; n <= 6; ++n) {
    const auto parts = all_partitions(n);
    for (const auto& a : parts) {
      const Partition pa = partition_from_labels(a);
      for (const auto& b : parts) {
        ASSERT_NEAR(ami(pa, partition_from_labels(b)), oracle.ami(a, b), 1e-9) << "n=" << n;
      }
    }
  }
}

TEST(Ami, MatchesBruteForceForSevenAndEightElements) {
  AmiOracle oracle;
  Rng rng(3);
  for (int n = 7; n <= 8; ++n) {
    const auto parts = all_partitions(n);
    std::vector<std::vector<int>> probes;
    for (int i = 0; i < 6; ++i) probes.push_back(parts[rng.below(parts.size())]);
    for (const auto& a : parts) {
      const Partition pa = partition_from_labels(a);
      for (const auto& b : probes) {
        ASSERT_NEAR(ami(pa, partition_from_labels(b)), oracle.ami(a, b), 1e-9) << "n=" << n;
      }
    }
  }
}

TEST(Ami, IndependentRandomPartitionsScoreNearZero) {
  Rng rng(4);
  const auto nodes = iota_nodes(200);
  double sum = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    const double v = ami(random_partition(rng, nodes, 4), random_partition(rng, nodes, 4));
    EXPECT_LE(std::abs(v), 0.05);
    sum += v;
  }
  EXPECT_LE(std::abs(sum / 100.0), 0.05);
}

TEST(ExpectedMutualInformation, SingletonsCarryAllInformation) {
  // With one side all singletons the MI is fixed at the other side's entropy.
  const std::vector<std::int64_t> rows{3, 2, 1}, cols(6, 1);
  EXPECT_NEAR(expected_mutual_information(rows, cols, 6), entropy(rows, 6), 1e-12);
}

TEST(Stability, Examples) {
  const auto nodes = iota_nodes(50);
  Rng rng(5);
  const Partition p = random_partition(rng, nodes, 3);
  const SeriesScore constant = stability(series_of({p, p, p, p}));
  EXPECT_DOUBLE_EQ(constant.mean, 1.0);
  EXPECT_EQ(constant.per_t.size(), 3u);
  EXPECT_EQ(constant.per_t.front().first, 1);

  const auto big = iota_nodes(200);
  const Partition x = random_partition(rng, big, 4), y = random_partition(rng, big, 4);
  EXPECT_NEAR(stability(series_of({x, y, x, y, x, y, x, y})).mean, 0.0, 0.05);

  EXPECT_THROW(stability(series_of({p})), DomainError);
}

TEST(Stability, SkipsPairsWithoutCommonNodes) {
  const Partition a({{0, 0}, {1, 0}}), b({{5, 0}, {6, 1}}), c({{5, 2}, {6, 3}});
  const SeriesScore s = stability(series_of({a, b, c}));
  ASSERT_EQ(s.per_t.size(), 1u);
  EXPECT_EQ(s.per_t[0].first, 2);
  EXPECT_THROW(stability(series_of({a, b})), DomainError);
}

TEST(Correctness, NoiseExamples) {
  Rng rng(6);
  const auto nodes = iota_nodes(100);
  const Partition gt = random_partition(rng, nodes, 5);
  EXPECT_DOUBLE_EQ(correctness_noise(gt, series_of({gt, gt, gt})).mean, 1.0);
  const Partition single = Partition::singletons(nodes);
  EXPECT_NEAR(correctness_noise(gt, series_of({single, single})).mean, 0.0, 1e-9);
}

TEST(Correctness, MorphingUsesLastPartition) {
  Rng rng(7);
  const auto nodes = iota_nodes(60);
  const Partition gtN = random_partition(rng, nodes, 3);
  const Partition other = random_partition(rng, nodes, 3);
  EXPECT_DOUBLE_EQ(correctness_morphing(gtN, series_of({other, other, gtN})), 1.0);
  EXPECT_LT(correctness_morphing(gtN, series_of({gtN, other})), 0.2);
}

TEST(CrossingPoint, Examples) {
  const auto nodes = iota_nodes(6);
  const Partition gt0({{0, 0}, {1, 0}, {2, 0}, {3, 1}, {4, 1}, {5, 1}});
  const Partition gtN = Partition::uniform(nodes);
  EXPECT_EQ(crossing_point(gt0, gtN, series_of({gtN, gtN, gtN}, 4)), 4);
  EXPECT_FALSE(crossing_point(gt0, gtN, series_of({gt0, gt0, gt0})).has_value());
  EXPECT_EQ(crossing_point(gt0, gtN, series_of({gt0, gt0, gtN, gtN})), 2);
  EXPECT_EQ(crossing_point(gt0, gtN, series_of({gtN, gt0, gt0, gtN}), 1), 3);
}

TEST(Delay, Examples) {
  EXPECT_DOUBLE_EQ(delay(10, 10, 20), 0.0);
  EXPECT_DOUBLE_EQ(delay(std::nullopt, 10, 20), 10.0);
  EXPECT_DOUBLE_EQ(delay(14, 10, 20), 4.0);
  EXPECT_THROW(delay(9, 10, 20), DomainError);
}

TEST(Delay, MonotoneInCrossingPoint) {
  for (int cp = 10; cp <= 20; ++cp) {
    EXPECT_LE(delay(cp, 10, 20), delay(cp + 1 <= 20 ? std::optional<int>(cp + 1) : std::nullopt, 10, 20));
    EXPECT_LE(delay(cp, 10, 20), delay(std::nullopt, 10, 20));
  }
}

TEST(Median, OddAndEven) {
  const std::vector<double> odd{3, 1, 2}, even{4, 1, 3, 2};
  EXPECT_DOUBLE_EQ(median(odd), 2.0);
  EXPECT_DOUBLE_EQ(median(even), 2.5);
  EXPECT_THROW(median(std::vector<double>{}), DomainError);
}

TEST(Bootstrap, Examples) {
  const std::vector<double> constant(17, 0.42);
  const MedianCi c = bootstrap_median_ci(constant);
  EXPECT_DOUBLE_EQ(c.median, 0.42);
  EXPECT_DOUBLE_EQ(c.lo, 0.42);
  EXPECT_DOUBLE_EQ(c.hi, 0.42);

  std::vector<double> hundred;
  for (int i = 1; i <= 100; ++i) hundred.push_back(i);
  const MedianCi h = bootstrap_median_ci(hundred, 0.99);
  EXPECT_DOUBLE_EQ(h.median, 50.5);
  EXPECT_LE(h.lo, 50.5);
  EXPECT_GE(h.hi, 50.5);
  EXPECT_LT(h.hi - h.lo, 40.0);

  const MedianCi again = bootstrap_median_ci(hundred, 0.99);
  EXPECT_EQ(h.lo, again.lo);
  EXPECT_EQ(h.hi, again.hi);

  EXPECT_THROW(bootstrap_median_ci(std::vector<double>{}), DomainError);
}

TEST(Bootstrap, IntervalContainsMedian) {
  Rng rng(8);
  for (int i = 0; i < 50; ++i) {
    std::vector<double> v(1 + rng.below(30));
    for (double& x : v) x = rng.uniform() * 10.0 - 5.0;
    const MedianCi ci = bootstrap_median_ci(v, 0.99, 1000, rng.next());
    EXPECT_LE(ci.lo, ci.median);
    EXPECT_GE(ci.hi, ci.median);
  }
}
