#include "evocd/lfr.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <string>
#include <unordered_set>

#include "evocd/errors.hpp"
#include "evocd/rng.hpp"

namespace evocd {

void LfrParams::validate() const {
  auto fail = [](const std::string& what) { throw ConfigError("invalid LFR parameters: " + what); };
  if (n < 2) fail("n must be at least 2");
  if (!(mu > 0.0 && mu < 1.0)) fail("mu must lie in (0,1)");
  if (!(deg_exponent > 1.0)) fail("deg_exponent must exceed 1");
  if (!(comm_exponent > 1.0)) fail("comm_exponent must exceed 1");
  if (!(avg_degree >= 1.0)) fail("avg_degree must be at least 1");
  if (max_degree < avg_degree) fail("max_degree must be at least avg_degree");
  if (max_degree >= n) fail("max_degree must be below n");
  const int stub_floor = std::max(3, static_cast<int>(std::floor(avg_degree * (1.0 - mu))));
  if (min_comm < stub_floor) {
    fail("min_comm must be >= max(3, floor(avg_degree*(1-mu))) = " + std::to_string(stub_floor));
  }
  if (max_comm < min_comm) fail("max_comm must be >= min_comm");
  if (max_comm > n) fail("max_comm must be <= n");
  if (std::lround((1.0 - mu) * max_degree) > max_comm - 1) {
    fail("internal degree of a max_degree node exceeds max_comm - 1");
  }
}

namespace {

// Mean of the continuous power law x^-gamma on [lo, hi].
double power_law_mean(double gamma, double lo, double hi) {
  if (std::abs(gamma - 2.0) < 1e-12) return std::log(hi / lo) / (1.0 / lo - 1.0 / hi);
  if (std::abs(gamma - 1.0) < 1e-12) return (hi - lo) / std::log(hi / lo);
  const double a = 1.0 - gamma;
  const double b = 2.0 - gamma;
  return (a / b) * (std::pow(hi, b) - std::pow(lo, b)) / (std::pow(hi, a) - std::pow(lo, a));
}

double sample_power_law(Rng& rng, double gamma, double lo, double hi) {
  const double a = 1.0 - gamma;
  const double u = rng.uniform();
  const double lo_a = std::pow(lo, a);
  return std::pow(lo_a + u * (std::pow(hi, a) - lo_a), 1.0 / a);
}

std::vector<int> sample_degrees(const LfrParams& p, Rng& rng) {
  const double hi = p.max_degree;
  double lo = 1.0, up = hi;
  if (power_law_mean(p.deg_exponent, lo, hi) > p.avg_degree) {
    throw GenerationError("avg_degree is below the smallest achievable power-law mean");
  }
  for (int iter = 0; iter < 200; ++iter) {
    const double mid = 0.5 * (lo + up);
    (power_law_mean(p.deg_exponent, mid, hi) < p.avg_degree ? lo : up) = mid;
  }
  const double xmin = 0.5 * (lo + up);
  std::vector<int> degrees(p.n);
  for (int& d : degrees) {
    d = static_cast<int>(std::lround(sample_power_law(rng, p.deg_exponent, xmin, hi)));
    d = std::clamp(d, 1, p.max_degree);
  }
  return degrees;
}

std::vector<int> sample_community_sizes(const LfrParams& p, Rng& rng) {
  std::vector<double> weights;
  for (int s = p.min_comm; s <= p.max_comm; ++s) weights.push_back(std::pow(s, -p.comm_exponent));
  std::vector<int> sizes;
  int total = 0;
  while (total < p.n) {
    const int s = p.min_comm + static_cast<int>(rng.weighted_index(weights));
    if (total + s <= p.n) {
      sizes.push_back(s);
      total += s;
      continue;
    }
    const int rest = p.n - total;
    if (rest >= p.min_comm) {
      sizes.push_back(rest);
      total += rest;
      break;
    }
    // Spread the remainder over communities that still have room.
    for (int k = 0; k < rest; ++k) {
      std::vector<std::size_t> open;
      for (std::size_t c = 0; c < sizes.size(); ++c) {
        if (sizes[c] < p.max_comm) open.push_back(c);
      }
      if (open.empty()) throw GenerationError("community sizes cannot sum to n within max_comm");
      ++sizes[open[rng.below(open.size())]];
    }
    total = p.n;
  }
  return sizes;
}

std::uint64_t pair_key(NodeId a, NodeId b) {
  const auto [u, v] = canonical(a, b);
  return (static_cast<std::uint64_t>(u) << 32) | static_cast<std::uint64_t>(v);
}

// Configuration-model pairing of `stubs`. `allowed(u, v)` rejects pairs that
// may not become edges (same community for external stubs, etc.). Invalid
// pairs are repaired by rewiring against random valid edges; the stubs that
// could not be placed are returned.
template <typename Allowed>
std::vector<NodeId> match_stubs(std::vector<NodeId> stubs, Allowed allowed, Rng& rng,
                        std::unordered_set<std::uint64_t>& existing,
                        std::vector<std::pair<NodeId, NodeId>>& out) {
  rng.shuffle(std::span<NodeId>(stubs));
  std::vector<std::pair<NodeId, NodeId>> placed;
  std::vector<std::pair<NodeId, NodeId>> bad;
  auto valid = [&](NodeId a, NodeId b) {
    return a != b && allowed(a, b) && !existing.contains(pair_key(a, b));
  };
  for (std::size_t i = 0; i + 1 < stubs.size(); i += 2) {
    const NodeId a = stubs[i], b = stubs[i + 1];
    if (valid(a, b)) {
      existing.insert(pair_key(a, b));
      placed.emplace_back(a, b);
    } else {
      bad.emplace_back(a, b);
    }
  }
  std::vector<NodeId> unplaced;
  if (stubs.size() % 2 != 0) unplaced.push_back(stubs.back());
  for (const auto& [a, b] : bad) {
    bool fixed = false;
    for (int attempt = 0; attempt < 200 && !placed.empty() && !fixed; ++attempt) {
      const std::size_t k = rng.below(placed.size());
      auto [c, d] = placed[k];
      if (rng.bernoulli(0.5)) std::swap(c, d);
      // (a,b) + (c,d) -> (a,c) + (b,d)
      if (a == c || b == d || !valid(a, c) || !valid(b, d) || pair_key(a, c) == pair_key(b, d)) {
        continue;
      }
      existing.erase(pair_key(c, d));
      existing.insert(pair_key(a, c));
      existing.insert(pair_key(b, d));
      placed[k] = {a, c};
      placed.emplace_back(b, d);
      fixed = true;
    }
    if (!fixed) {
      unplaced.push_back(a);
      unplaced.push_back(b);
    }
  }
  out.insert(out.end(), placed.begin(), placed.end());
  return unplaced;
}

}  // namespace

LfrGraph generate_lfr(const LfrParams& params) {
  params.validate();
  Rng rng(params.seed);
  const int n = params.n;

  std::vector<int> degree = sample_degrees(params, rng);
  std::vector<int> internal(n), external(n);
  for (int i = 0; i < n; ++i) {
    internal[i] = static_cast<int>(std::lround((1.0 - params.mu) * degree[i]));
    external[i] = degree[i] - internal[i];
  }

  // Redraw community sizes until the largest one can host the largest
  // internal degree; after the attempts run out the cap below applies.
  const int top_internal = *std::max_element(internal.begin(), internal.end());
  std::vector<int> sizes = sample_community_sizes(params, rng);
  for (int attempt = 0; attempt < 1000 && *std::max_element(sizes.begin(), sizes.end()) <= top_internal;
       ++attempt) {
    sizes = sample_community_sizes(params, rng);
  }
  const int largest = *std::max_element(sizes.begin(), sizes.end());
  for (int i = 0; i < n; ++i) {
    if (internal[i] > largest - 1) {
      // Cap at the largest community; the surplus becomes external.
      external[i] += internal[i] - (largest - 1);
      internal[i] = largest - 1;
    }
  }

  // Place nodes, largest internal degree first, into communities big enough
  // for their internal stubs. A full community evicts a random member.
  std::vector<int> order(n);
  for (int i = 0; i < n; ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(),
                   [&](int a, int b) { return internal[a] > internal[b]; });
  std::vector<std::vector<int>> members(sizes.size());
  std::vector<int> community(n, -1);
  std::deque<int> queue(order.begin(), order.end());
  std::size_t budget = 100 * static_cast<std::size_t>(n);
  while (!queue.empty()) {
    if (budget-- == 0) throw GenerationError("community assignment did not converge");
    const int node = queue.front();
    queue.pop_front();
    std::vector<std::size_t> eligible, open;
    for (std::size_t c = 0; c < sizes.size(); ++c) {
      if (sizes[c] - 1 < internal[node]) continue;
      eligible.push_back(c);
      if (static_cast<int>(members[c].size()) < sizes[c]) open.push_back(c);
    }
    if (eligible.empty()) throw GenerationError("no community can host internal degree");
    std::size_t c;
    if (!open.empty()) {
      c = open[rng.below(open.size())];
    } else {
      c = eligible[rng.below(eligible.size())];
      const std::size_t victim = rng.below(members[c].size());
      const int evicted = members[c][victim];
      members[c].erase(members[c].begin() + static_cast<std::ptrdiff_t>(victim));
      community[evicted] = -1;
      queue.push_back(evicted);
    }
    members[c].push_back(node);
    community[node] = static_cast<int>(c);
  }

  std::unordered_set<std::uint64_t> existing;
  std::vector<std::pair<NodeId, NodeId>> pairs;

  for (std::size_t c = 0; c < members.size(); ++c) {
    auto& group = members[c];
    std::sort(group.begin(), group.end());
    int sum = 0;
    for (int v : group) sum += internal[v];
    if (sum % 2 != 0) {
      const int room = static_cast<int>(group.size()) - 1;
      std::vector<int> movable, growable;
      for (int v : group) {
        if (internal[v] >= room) continue;
        growable.push_back(v);
        if (external[v] > 0) movable.push_back(v);
      }
      if (!movable.empty()) {
        // Turning an external stub into an internal one keeps the degree.
        const int v = movable[rng.below(movable.size())];
        ++internal[v];
        --external[v];
      } else if (!growable.empty()) {
        ++internal[growable[rng.below(growable.size())]];
      }
    }
    std::vector<NodeId> stubs;
    for (int v : group) stubs.insert(stubs.end(), internal[v], v);
    // Internal stubs a dense community cannot host become external ones.
    for (const NodeId v : match_stubs(
             std::move(stubs), [](NodeId, NodeId) { return true; }, rng, existing, pairs)) {
      --internal[v];
      ++external[v];
    }
  }

  int external_sum = 0;
  for (int v = 0; v < n; ++v) external_sum += external[v];
  if (external_sum % 2 != 0) ++external[rng.below(n)];
  std::vector<NodeId> stubs;
  for (int v = 0; v < n; ++v) stubs.insert(stubs.end(), external[v], v);
  const std::size_t external_stubs = stubs.size();
  const std::size_t unplaced =
      match_stubs(
          std::move(stubs), [&](NodeId a, NodeId b) { return community[a] != community[b]; },
          rng, existing, pairs)
          .size();

  if (static_cast<double>(unplaced) > 0.01 * static_cast<double>(external_stubs) + 2.0) {
    throw GenerationError("stub matching failed: " + std::to_string(unplaced) + " of " +
                          std::to_string(external_stubs) +
                          " external stubs unplaced (mu too large for the community sizes)");
  }

  std::vector<Edge> edges;
  edges.reserve(pairs.size());
  for (const auto& [a, b] : pairs) {
    const auto [u, v] = canonical(a, b);
    edges.push_back({u, v, 0.0});
  }
  std::sort(edges.begin(), edges.end(),
            [](const Edge& x, const Edge& y) { return std::tie(x.u, x.v) < std::tie(y.u, y.v); });
  for (Edge& e : edges) e.w = rng.uniform_open_closed();

  std::vector<NodeId> nodes(n);
  std::vector<Partition::Entry> assignment;
  for (int v = 0; v < n; ++v) {
    nodes[v] = v;
    assignment.emplace_back(v, community[v]);
  }
  return {Snapshot(0, std::move(nodes), std::move(edges)), Partition(std::move(assignment))};
}

double empirical_mixing(const Snapshot& s, const Partition& p) {
  if (!(s.total_weight() > 0.0)) return 0.0;
  double cross = 0.0;
  for (const Edge& e : s.edges()) {
    if (p.community_of(e.u) != p.community_of(e.v)) cross += e.w;
  }
  return cross / s.total_weight();
}

}  // namespace evocd
