#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "evocd/graph.hpp"

namespace evocd {

// Contingency counts of two labelings of the same n items.
struct Contingency {
  std::vector<std::int64_t> rows;     // community sizes of the first labeling
  std::vector<std::int64_t> cols;     // community sizes of the second labeling
  std::vector<std::int64_t> cells;    // rows.size() x cols.size(), row-major
  std::int64_t n = 0;
};

/// Contingency table of a and b over the intersection of their domains.
Contingency contingency(const Partition& a, const Partition& b);

double entropy(std::span<const std::int64_t> sizes, std::int64_t n);
double mutual_information(const Contingency& t);
/// Expected mutual information under the hypergeometric (fixed marginals)
/// model, summed exactly.
double expected_mutual_information(std::span<const std::int64_t> rows,
                                   std::span<const std::int64_t> cols, std::int64_t n);

/// Adjusted mutual information with arithmetic-mean normalisation, computed
/// on the intersection of the two domains. Identical groupings score 1
/// (including the zero-entropy case). Throws DomainError when the
/// intersection is empty.
double ami(const Partition& a, const Partition& b);

struct SeriesScore {
  double mean = 0.0;
  std::vector<std::pair<int, double>> per_t;
};

/// S^t = AMI(C^{t-1}, C^t) for consecutive entries; S is their mean.
/// Pairs without common nodes are skipped. Throws DomainError when fewer
/// than two partitions (or no comparable pair) are given.
SeriesScore stability(const PartitionSeries& series);

/// K^t = AMI(GT^0, C^t); K is the mean over the series.
SeriesScore correctness_noise(const Partition& gt0, const PartitionSeries& series);

/// K = AMI(GT^N, C^N) on the last entry of the series.
double correctness_morphing(const Partition& gtN, const PartitionSeries& series);

/// First t >= from_t with AMI(GT^N, C^t) > AMI(GT^0, C^t).
std::optional<int> crossing_point(const Partition& gt0, const Partition& gtN,
                                  const PartitionSeries& series, int from_t = INT32_MIN);

/// cp - start, or max_t - start when no crossing point exists.
double delay(std::optional<int> cp, int start, int max_t);

double median(std::span<const double> values);

struct MedianCi {
  double median = 0.0;
  double lo = 0.0;
  double hi = 0.0;
};

/// Sample median with a percentile-bootstrap confidence interval.
MedianCi bootstrap_median_ci(std::span<const double> values, double level = 0.99,
                             int resamples = 10000, std::uint64_t seed = 0x5eed);

}  // namespace evocd
