#include "evocd/algorithms.hpp"

#include <algorithm>
#include <cctype>
#include <chrono>
#include <unordered_map>

#include "evocd/errors.hpp"
#include "evocd/rng.hpp"

namespace evocd {

std::string_view to_string(Algorithm a) noexcept {
  switch (a) {
    case Algorithm::GMA: return "GMA";
    case Algorithm::AlphaGMA: return "aGMA";
    case Algorithm::SGMA: return "sGMA";
    case Algorithm::NeGMA: return "NeGMA";
  }
  return "?";
}

Algorithm parse_algorithm(std::string_view name) {
  std::string lower;
  for (char ch : name) lower.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(ch))));
  if (lower == "gma") return Algorithm::GMA;
  if (lower == "agma" || lower == "alphagma" || lower == "alpha-gma") return Algorithm::AlphaGMA;
  if (lower == "sgma") return Algorithm::SGMA;
  if (lower == "negma") return Algorithm::NeGMA;
  throw ConfigError("unknown algorithm: " + std::string(name));
}

void AlgoConfig::validate() const {
  if (!(alpha >= 0.0 && alpha < 1.0)) throw ConfigError("alpha must lie in [0,1)");
  if (!(memory_epsilon >= 0.0)) throw ConfigError("memory_epsilon must be non-negative");
}

double MemoryGraph::weight(NodeId a, NodeId b) const {
  const auto it = weights_.find(canonical(a, b));
  return it == weights_.end() ? 0.0 : it->second;
}

Snapshot memory_update(MemoryGraph& mem, const Snapshot& s_hat, double alpha) {
  if (!(alpha >= 0.0 && alpha < 1.0)) throw ConfigError("alpha must lie in [0,1)");
  std::map<std::pair<NodeId, NodeId>, double> next;
  for (const Edge& e : s_hat.edges()) {
    const auto key = std::pair{e.u, e.v};
    const auto it = mem.weights_.find(key);
    const double w = (it == mem.weights_.end() || it->second == 0.0)
                         ? e.w
                         : (1.0 - alpha) * e.w + alpha * it->second;
    next.emplace(key, w);
  }
  for (const auto& [key, w_prev] : mem.weights_) {
    if (next.contains(key)) continue;
    const double w = alpha * w_prev;
    if (w > 0.0 && w >= mem.evict_below_) next.emplace(key, w);
  }
  mem.weights_ = std::move(next);

  std::vector<NodeId> nodes(s_hat.nodes().begin(), s_hat.nodes().end());
  std::vector<Edge> edges;
  edges.reserve(mem.weights_.size());
  for (const auto& [key, w] : mem.weights_) {
    edges.push_back({key.first, key.second, std::min(w, 1.0)});
    nodes.push_back(key.first);
    nodes.push_back(key.second);
  }
  return Snapshot(s_hat.t(), std::move(nodes), std::move(edges));
}

Partition run_gma(const Snapshot& s, const AlgoConfig& cfg, LouvainMonitor* monitor) {
  return louvain(s, Partition::singletons(s.nodes()), cfg.seed, monitor);
}

Partition run_alpha_gma(MemoryGraph& mem, const Snapshot& s_hat, const AlgoConfig& cfg,
                        LouvainMonitor* monitor) {
  const Snapshot smoothed = memory_update(mem, s_hat, cfg.alpha);
  return restrict(run_gma(smoothed, cfg, monitor), s_hat);
}

namespace {

// Labels of `prev` for surviving nodes; new nodes get fresh labels.
std::vector<Partition::Entry> carry_over(const Snapshot& s, const Partition& prev,
                                         CommunityId& next_label) {
  std::vector<Partition::Entry> entries;
  entries.reserve(s.node_count());
  for (const NodeId n : s.nodes()) {
    const auto c = prev.find(n);
    entries.emplace_back(n, c ? *c : next_label++);
  }
  return entries;
}

}  // namespace

Partition run_sgma(const Snapshot& s, const Partition& prev, const AlgoConfig& cfg,
                   LouvainMonitor* monitor) {
  CommunityId next_label = prev.max_label() + 1;
  return louvain(s, Partition(carry_over(s, prev, next_label)), cfg.seed, monitor);
}

Partition negma_init(const Snapshot& s, const Snapshot& s_prev, const Partition& prev,
                     double theta_q, std::uint64_t seed) {
  CommunityId next_label = prev.max_label() + 1;
  const auto nodes = s.nodes();
  std::vector<std::optional<CommunityId>> label(nodes.size());
  std::vector<std::uint32_t> fresh_nodes;
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    label[i] = prev.find(nodes[i]);
    if (!label[i]) fresh_nodes.push_back(static_cast<std::uint32_t>(i));
  }

  Rng rng(seed);
  rng.shuffle(std::span<std::uint32_t>(fresh_nodes));
  for (const std::uint32_t i : fresh_nodes) {
    std::map<CommunityId, double> votes;
    for (const Neighbor& nb : s.neighbors(i)) {
      if (label[nb.index]) votes[*label[nb.index]] += nb.w;
    }
    if (votes.empty()) {
      label[i] = next_label++;
      continue;
    }
    // std::map iterates labels in increasing order, so `>` keeps the
    // smallest label among equal totals.
    auto best = votes.begin();
    for (auto it = votes.begin(); it != votes.end(); ++it) {
      if (it->second > best->second) best = it;
    }
    label[i] = best->first;
  }

  std::vector<Partition::Entry> entries;
  entries.reserve(nodes.size());
  for (std::size_t i = 0; i < nodes.size(); ++i) entries.emplace_back(nodes[i], *label[i]);
  Partition tentative(std::move(entries));

  if (!(s.total_weight() > 0.0) || !(s_prev.total_weight() > 0.0) || !prev.covers(s_prev)) {
    return tentative;
  }
  const auto before = community_modularities(s_prev, prev);
  const auto after = community_modularities(s, tentative);
  std::vector<CommunityId> dissolved;
  for (const auto& [c, q_now] : after) {
    const auto it = before.find(c);
    if (it == before.end()) continue;
    if (q_now - it->second < theta_q) dissolved.push_back(c);
  }
  if (dissolved.empty()) return tentative;

  std::vector<Partition::Entry> gated;
  gated.reserve(nodes.size());
  for (const auto& [n, c] : tentative.entries()) {
    const bool unbind = std::binary_search(dissolved.begin(), dissolved.end(), c);
    gated.emplace_back(n, unbind ? next_label++ : c);
  }
  return Partition(std::move(gated));
}

Partition run_negma(const Snapshot& s, const Snapshot& s_prev, const Partition& prev,
                    const AlgoConfig& cfg, LouvainMonitor* monitor) {
  const Partition init = negma_init(s, s_prev, prev, cfg.theta_q, derive_seed(cfg.seed, 0x6e6567));
  return louvain(s, init, cfg.seed, monitor);
}

PartitionSeries run_sequence(const DynamicGraph& g, const AlgoConfig& cfg, SequenceStats* stats) {
  cfg.validate();
  PartitionSeries series;
  series.reserve(g.snapshots.size());
  MemoryGraph memory(cfg.evict_memory ? cfg.memory_epsilon : 0.0);
  LouvainMonitor* monitor = stats ? &stats->monitor : nullptr;

  for (std::size_t k = 0; k < g.snapshots.size(); ++k) {
    const Snapshot& s = g.snapshots[k];
    AlgoConfig step = cfg;
    step.seed = derive_seed(cfg.seed, s.t());
    const auto started = std::chrono::steady_clock::now();
    Partition p;
    switch (cfg.algorithm) {
      case Algorithm::GMA:
        p = run_gma(s, step, monitor);
        break;
      case Algorithm::AlphaGMA:
        p = run_alpha_gma(memory, s, step, monitor);
        break;
      case Algorithm::SGMA:
        p = k == 0 ? run_gma(s, step, monitor) : run_sgma(s, series.back().second, step, monitor);
        break;
      case Algorithm::NeGMA:
        p = k == 0 ? run_gma(s, step, monitor)
                   : run_negma(s, g.snapshots[k - 1], series.back().second, step, monitor);
        break;
    }
    const auto elapsed = std::chrono::steady_clock::now() - started;
    if (stats) stats->seconds.push_back(std::chrono::duration<double>(elapsed).count());
    series.emplace_back(s.t(), std::move(p));
  }
  return series;
}

}  // namespace evocd
