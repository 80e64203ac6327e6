#include "evocd/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <unordered_map>

#include "evocd/errors.hpp"
#include "evocd/rng.hpp"

namespace evocd {

Contingency contingency(const Partition& a, const Partition& b) {
  std::unordered_map<CommunityId, std::size_t> row_of, col_of;
  std::vector<std::pair<std::size_t, std::size_t>> pairs;
  const auto ea = a.entries();
  const auto eb = b.entries();
  // Both entry lists are sorted by node: merge-walk the intersection.
  std::size_t i = 0, j = 0;
  while (i < ea.size() && j < eb.size()) {
    if (ea[i].first < eb[j].first) {
      ++i;
    } else if (eb[j].first < ea[i].first) {
      ++j;
    } else {
      const auto r = row_of.emplace(ea[i].second, row_of.size()).first->second;
      const auto c = col_of.emplace(eb[j].second, col_of.size()).first->second;
      pairs.emplace_back(r, c);
      ++i;
      ++j;
    }
  }
  Contingency t;
  t.rows.assign(row_of.size(), 0);
  t.cols.assign(col_of.size(), 0);
  t.cells.assign(row_of.size() * col_of.size(), 0);
  for (const auto& [r, c] : pairs) {
    ++t.rows[r];
    ++t.cols[c];
    ++t.cells[r * col_of.size() + c];
  }
  t.n = static_cast<std::int64_t>(pairs.size());
  return t;
}

double entropy(std::span<const std::int64_t> sizes, std::int64_t n) {
  if (n <= 0) return 0.0;
  double h = 0.0;
  for (const std::int64_t s : sizes) {
    if (s <= 0) continue;
    const double p = static_cast<double>(s) / static_cast<double>(n);
    h -= p * std::log(p);
  }
  return h;
}

double mutual_information(const Contingency& t) {
  if (t.n <= 0) return 0.0;
  const double n = static_cast<double>(t.n);
  double mi = 0.0;
  for (std::size_t r = 0; r < t.rows.size(); ++r) {
    for (std::size_t c = 0; c < t.cols.size(); ++c) {
      const auto nij = t.cells[r * t.cols.size() + c];
      if (nij == 0) continue;
      const double x = static_cast<double>(nij);
      mi += (x / n) * std::log(n * x / (static_cast<double>(t.rows[r]) * static_cast<double>(t.cols[c])));
    }
  }
  return std::max(mi, 0.0);
}

double expected_mutual_information(std::span<const std::int64_t> rows,
                                   std::span<const std::int64_t> cols, std::int64_t n) {
  if (n <= 0) return 0.0;
  std::vector<double> log_fact(static_cast<std::size_t>(n) + 1, 0.0);
  for (std::int64_t k = 2; k <= n; ++k) log_fact[k] = log_fact[k - 1] + std::log(static_cast<double>(k));
  const double N = static_cast<double>(n);
  double emi = 0.0;
  for (const std::int64_t a : rows) {
    for (const std::int64_t b : cols) {
      const std::int64_t lo = std::max<std::int64_t>(1, a + b - n);
      const std::int64_t hi = std::min(a, b);
      const double fixed =
          log_fact[a] + log_fact[b] + log_fact[n - a] + log_fact[n - b] - log_fact[n];
      for (std::int64_t k = lo; k <= hi; ++k) {
        const double x = static_cast<double>(k);
        const double log_p = fixed - log_fact[k] - log_fact[a - k] - log_fact[b - k] -
                             log_fact[n - a - b + k];
        emi += (x / N) * std::log(N * x / (static_cast<double>(a) * static_cast<double>(b))) *
               std::exp(log_p);
      }
    }
  }
  return emi;
}

double ami(const Partition& a, const Partition& b) {
  const Contingency t = contingency(a, b);
  if (t.n == 0) throw DomainError("ami: partitions share no nodes");

  // Identical groupings (every row maps onto exactly one column and back).
  bool identical = t.rows.size() == t.cols.size();
  for (std::size_t r = 0; identical && r < t.rows.size(); ++r) {
    for (std::size_t c = 0; c < t.cols.size(); ++c) {
      const auto nij = t.cells[r * t.cols.size() + c];
      if (nij != 0 && (nij != t.rows[r] || nij != t.cols[c])) {
        identical = false;
        break;
      }
    }
  }
  if (identical) return 1.0;

  const double mi = mutual_information(t);
  const double ha = entropy(t.rows, t.n);
  const double hb = entropy(t.cols, t.n);
  const double emi = expected_mutual_information(t.rows, t.cols, t.n);
  double denom = 0.5 * (ha + hb) - emi;
  constexpr double eps = std::numeric_limits<double>::epsilon();
  if (std::abs(denom) < eps) denom = denom < 0.0 ? -eps : eps;
  return (mi - emi) / denom;
}

SeriesScore stability(const PartitionSeries& series) {
  if (series.size() < 2) throw DomainError("stability needs at least two partitions");
  SeriesScore out;
  double sum = 0.0;
  for (std::size_t k = 1; k < series.size(); ++k) {
    const auto common = intersect(series[k - 1].second.domain(), series[k].second.domain());
    if (common.empty()) continue;
    const double s = ami(series[k - 1].second, series[k].second);
    out.per_t.emplace_back(series[k].first, s);
    sum += s;
  }
  if (out.per_t.empty()) throw DomainError("stability: no consecutive partitions share nodes");
  out.mean = sum / static_cast<double>(out.per_t.size());
  return out;
}

SeriesScore correctness_noise(const Partition& gt0, const PartitionSeries& series) {
  if (series.empty()) throw DomainError("correctness needs a nonempty series");
  SeriesScore out;
  double sum = 0.0;
  const auto truth = gt0.domain();
  for (const auto& [t, p] : series) {
    if (intersect(truth, p.domain()).empty()) continue;
    const double k = ami(gt0, p);
    out.per_t.emplace_back(t, k);
    sum += k;
  }
  if (out.per_t.empty()) throw DomainError("correctness: no partition shares nodes with GT");
  out.mean = sum / static_cast<double>(out.per_t.size());
  return out;
}

double correctness_morphing(const Partition& gtN, const PartitionSeries& series) {
  if (series.empty()) throw DomainError("correctness needs a nonempty series");
  return ami(gtN, series.back().second);
}

std::optional<int> crossing_point(const Partition& gt0, const Partition& gtN,
                                  const PartitionSeries& series, int from_t) {
  for (const auto& [t, p] : series) {
    if (t < from_t) continue;
    if (ami(gtN, p) > ami(gt0, p)) return t;
  }
  return std::nullopt;
}

double delay(std::optional<int> cp, int start, int max_t) {
  if (start > max_t) throw DomainError("delay: start after max_t");
  if (!cp) return static_cast<double>(max_t - start);
  if (*cp < start) {
    throw DomainError("delay: crossing point " + std::to_string(*cp) +
                      " precedes transformation start " + std::to_string(start));
  }
  return static_cast<double>(*cp - start);
}

double median(std::span<const double> values) {
  if (values.empty()) throw DomainError("median of empty input");
  std::vector<double> v(values.begin(), values.end());
  std::sort(v.begin(), v.end());
  const std::size_t m = v.size() / 2;
  return v.size() % 2 == 1 ? v[m] : 0.5 * (v[m - 1] + v[m]);
}

MedianCi bootstrap_median_ci(std::span<const double> values, double level, int resamples,
                             std::uint64_t seed) {
  if (values.empty()) throw DomainError("bootstrap of empty input");
  if (!(level > 0.0 && level < 1.0)) throw DomainError("bootstrap level must lie in (0,1)");
  if (resamples < 1000) throw DomainError("bootstrap needs at least 1000 resamples");

  MedianCi out;
  out.median = median(values);
  Rng rng(seed);
  std::vector<double> sample(values.size());
  std::vector<double> medians;
  medians.reserve(resamples);
  for (int r = 0; r < resamples; ++r) {
    for (double& x : sample) x = values[rng.below(values.size())];
    medians.push_back(median(sample));
  }
  std::sort(medians.begin(), medians.end());
  // Nearest-rank percentiles of the bootstrap distribution.
  const double tail = 0.5 * (1.0 - level);
  auto rank = [&](double q) {
    const auto k = static_cast<std::size_t>(std::ceil(q * static_cast<double>(resamples)));
    return medians[std::clamp<std::size_t>(k == 0 ? 0 : k - 1, 0, medians.size() - 1)];
  };
  out.lo = rank(tail);
  out.hi = rank(1.0 - tail);
  return out;
}

}  // namespace evocd
