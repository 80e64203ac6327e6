#include "evocd/louvain.hpp"

#include <algorithm>
#include <numeric>
#include <unordered_map>

#include "evocd/errors.hpp"
#include "evocd/rng.hpp"

namespace evocd {

WorkGraph WorkGraph::from_snapshot(const Snapshot& s) {
  WorkGraph g;
  const std::size_t n = s.node_count();
  g.offsets.assign(n + 1, 0);
  g.loops.assign(n, 0.0);
  g.degree.assign(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    const auto nb = s.neighbors(i);
    g.offsets[i + 1] = g.offsets[i] + nb.size();
    g.adjacency.insert(g.adjacency.end(), nb.begin(), nb.end());
    g.degree[i] = s.degree_at(i);
  }
  g.total = s.total_weight();
  return g;
}

WorkGraph WorkGraph::aggregate(std::span<const std::uint32_t> community, std::size_t count) const {
  WorkGraph out;
  out.loops.assign(count, 0.0);
  out.degree.assign(count, 0.0);
  out.total = total;

  std::vector<std::pair<std::uint64_t, double>> links;
  for (std::size_t i = 0; i < size(); ++i) {
    const std::uint32_t ci = community[i];
    out.loops[ci] += loops[i];
    for (const Neighbor& nb : neighbors(i)) {
      if (nb.index <= i) continue;
      const std::uint32_t cj = community[nb.index];
      if (ci == cj) {
        out.loops[ci] += nb.w;
      } else {
        const auto lo = std::min(ci, cj), hi = std::max(ci, cj);
        links.emplace_back((static_cast<std::uint64_t>(lo) << 32) | hi, nb.w);
      }
    }
  }
  std::sort(links.begin(), links.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });
  std::vector<std::pair<std::uint64_t, double>> merged;
  for (const auto& link : links) {
    if (!merged.empty() && merged.back().first == link.first) {
      merged.back().second += link.second;
    } else {
      merged.push_back(link);
    }
  }

  std::vector<std::size_t> count_per(count, 0);
  for (const auto& [key, w] : merged) {
    ++count_per[key >> 32];
    ++count_per[key & 0xffffffffu];
  }
  out.offsets.assign(count + 1, 0);
  for (std::size_t c = 0; c < count; ++c) out.offsets[c + 1] = out.offsets[c] + count_per[c];
  out.adjacency.resize(out.offsets[count]);
  std::vector<std::size_t> cursor(out.offsets.begin(), out.offsets.end() - 1);
  for (const auto& [key, w] : merged) {
    const auto a = static_cast<std::uint32_t>(key >> 32);
    const auto b = static_cast<std::uint32_t>(key & 0xffffffffu);
    out.adjacency[cursor[a]++] = {b, w};
    out.adjacency[cursor[b]++] = {a, w};
    out.degree[a] += w;
    out.degree[b] += w;
  }
  for (std::size_t c = 0; c < count; ++c) out.degree[c] += 2.0 * out.loops[c];
  return out;
}

double modularity(const WorkGraph& g, std::span<const std::uint32_t> community) {
  if (!(g.total > 0.0)) throw DomainError("modularity undefined: total weight is 0");
  std::unordered_map<std::uint32_t, std::pair<double, double>> per;  // inner (once), degree
  for (std::size_t i = 0; i < g.size(); ++i) {
    auto& [inner, degree] = per[community[i]];
    degree += g.degree[i];
    inner += g.loops[i];
    for (const Neighbor& nb : g.neighbors(i)) {
      if (nb.index > i && community[nb.index] == community[i]) inner += nb.w;
    }
  }
  double q = 0.0;
  for (const auto& [c, totals] : per) {
    const double share = totals.second / (2.0 * g.total);
    q += totals.first / g.total - share * share;
  }
  return q;
}

LouvainState::LouvainState(const WorkGraph& g, std::vector<std::uint32_t> community)
    : graph_(&g),
      community_(std::move(community)),
      inner_(g.size(), 0.0),
      total_(g.size(), 0.0),
      m2_(2.0 * g.total) {
  for (std::size_t i = 0; i < g.size(); ++i) {
    const std::uint32_t c = community_[i];
    total_[c] += g.degree[i];
    inner_[c] += 2.0 * g.loops[i];
    for (const Neighbor& nb : g.neighbors(i)) {
      if (community_[nb.index] == c) inner_[c] += nb.w;
    }
  }
}

double LouvainState::link_weight(std::size_t node, std::uint32_t c) const {
  double k = 0.0;
  for (const Neighbor& nb : graph_->neighbors(node)) {
    if (community_[nb.index] == c) k += nb.w;
  }
  return k;
}

double LouvainState::gain(double k_i, double k_target, double k_own, double target_total,
                          double own_total_without) const noexcept {
  return 2.0 * (k_target - k_own) / m2_ -
         2.0 * k_i * (target_total - own_total_without) / (m2_ * m2_);
}

double LouvainState::move_gain(std::size_t node, std::uint32_t target) const {
  const std::uint32_t own = community_[node];
  if (target == own || !(m2_ > 0.0)) return 0.0;
  const double k_i = graph_->degree[node];
  return gain(k_i, link_weight(node, target), link_weight(node, own), total_[target],
              total_[own] - k_i);
}

void LouvainState::apply_move(std::size_t node, std::uint32_t target, double k_target,
                              double k_own) {
  const std::uint32_t own = community_[node];
  if (target == own) return;
  const double k_i = graph_->degree[node];
  const double loop = graph_->loops[node];
  inner_[own] -= 2.0 * k_own + 2.0 * loop;
  total_[own] -= k_i;
  inner_[target] += 2.0 * k_target + 2.0 * loop;
  total_[target] += k_i;
  community_[node] = target;
}

void LouvainState::move(std::size_t node, std::uint32_t target) {
  apply_move(node, target, link_weight(node, target), link_weight(node, community_[node]));
}

double LouvainState::contribution(std::uint32_t c) const {
  if (!(m2_ > 0.0)) return 0.0;
  const double share = total_[c] / m2_;
  return inner_[c] / m2_ - share * share;
}

double LouvainState::modularity() const {
  double q = 0.0;
  for (std::uint32_t c = 0; c < total_.size(); ++c) {
    if (total_[c] != 0.0 || inner_[c] != 0.0) q += contribution(c);
  }
  return q;
}

namespace {

// One local-moving phase. Returns whether any node moved.
bool local_moving(LouvainState& state, Rng& rng, LouvainMonitor* monitor) {
  const WorkGraph& g = state.graph();
  const std::size_t n = g.size();
  std::vector<std::uint32_t> order(n);
  std::iota(order.begin(), order.end(), 0u);
  std::vector<double> link(n, 0.0);
  std::vector<std::uint32_t> touched;
  bool any = false;

  for (;;) {
    rng.shuffle(std::span<std::uint32_t>(order));
    bool moved = false;
    for (const std::uint32_t i : order) {
      const std::uint32_t own = state.community_of(i);
      for (const Neighbor& nb : g.neighbors(i)) {
        const std::uint32_t c = state.community_of(nb.index);
        if (link[c] == 0.0) touched.push_back(c);
        link[c] += nb.w;
      }
      const double k_i = g.degree[i];
      const double k_own = link[own];
      const double own_without = state.total(own) - k_i;
      std::uint32_t best = own;
      double best_gain = 0.0;
      for (const std::uint32_t c : touched) {
        if (c == own) continue;
        const double gain = state.gain(k_i, link[c], k_own, state.total(c), own_without);
        if (gain > best_gain) {
          best_gain = gain;
          best = c;
        }
      }
      if (best != own && best_gain > kMinGain) {
        double before = 0.0;
        if (monitor) before = state.contribution(own) + state.contribution(best);
        state.apply_move(i, best, link[best], k_own);
        if (monitor) {
          ++monitor->moves;
          if (state.contribution(own) + state.contribution(best) < before) ++monitor->violations;
        }
        moved = true;
      }
      for (const std::uint32_t c : touched) link[c] = 0.0;
      touched.clear();
    }
    if (!moved) break;
    any = true;
  }
  return any;
}

}  // namespace

Partition louvain(const Snapshot& s, const Partition& init, std::uint64_t seed,
                  LouvainMonitor* monitor) {
  if (!init.covers(s)) throw DomainError("louvain: initial partition does not cover the snapshot");
  if (!(s.total_weight() > 0.0)) return init;

  const std::size_t n = s.node_count();
  const WorkGraph base = WorkGraph::from_snapshot(s);

  // Dense community ids in order of first appearance along the node order.
  std::vector<CommunityId> labels;
  std::vector<std::uint32_t> community(n);
  {
    std::unordered_map<CommunityId, std::uint32_t> dense;
    const auto entries = init.entries();
    for (std::size_t i = 0; i < n; ++i) {
      const auto [it, inserted] =
          dense.emplace(entries[i].second, static_cast<std::uint32_t>(labels.size()));
      if (inserted) labels.push_back(entries[i].second);
      community[i] = it->second;
    }
  }

  Rng rng(seed);
  std::vector<std::uint32_t> node_to_super(n);
  std::iota(node_to_super.begin(), node_to_super.end(), 0u);
  WorkGraph level_graph;
  const WorkGraph* g = &base;
  double level_q = 0.0;
  if (monitor) level_q = modularity(base, community);

  for (;;) {
    LouvainState state(*g, std::move(community));
    local_moving(state, rng, monitor);

    std::vector<std::uint32_t> renumber(g->size(), UINT32_MAX);
    std::vector<CommunityId> next_labels;
    std::vector<std::uint32_t> assignment(g->size());
    for (std::size_t i = 0; i < g->size(); ++i) {
      std::uint32_t& r = renumber[state.community_of(i)];
      if (r == UINT32_MAX) {
        r = static_cast<std::uint32_t>(next_labels.size());
        next_labels.push_back(labels[state.community_of(i)]);
      }
      assignment[i] = r;
    }
    for (auto& super : node_to_super) super = assignment[super];
    labels = std::move(next_labels);

    if (monitor) {
      ++monitor->levels;
      const double q = modularity(base, node_to_super);
      if (q < level_q - 1e-12) ++monitor->violations;
      level_q = q;
    }

    const std::size_t count = labels.size();
    if (count == g->size()) break;
    level_graph = g->aggregate(assignment, count);
    g = &level_graph;
    community.resize(count);
    std::iota(community.begin(), community.end(), 0u);
  }

  std::vector<Partition::Entry> out;
  out.reserve(n);
  const auto nodes = s.nodes();
  for (std::size_t i = 0; i < n; ++i) out.emplace_back(nodes[i], labels[node_to_super[i]]);
  return Partition(std::move(out));
}

}  // namespace evocd
