#include "evocd/graph.hpp"

#include <algorithm>
#include <string>
#include <unordered_map>

#include "evocd/errors.hpp"

namespace evocd {

Snapshot::Snapshot(int t, std::vector<NodeId> nodes, std::vector<Edge> edges)
    : t_(t), nodes_(std::move(nodes)), edges_(std::move(edges)) {
  std::sort(nodes_.begin(), nodes_.end());
  nodes_.erase(std::unique(nodes_.begin(), nodes_.end()), nodes_.end());

  for (Edge& e : edges_) {
    if (e.u == e.v) throw DomainError("self-loop on node " + std::to_string(e.u));
    if (!(e.w > 0.0 && e.w <= 1.0)) {
      throw DomainError("edge weight outside (0,1]: " + std::to_string(e.w));
    }
    std::tie(e.u, e.v) = canonical(e.u, e.v);
  }
  std::sort(edges_.begin(), edges_.end(), [](const Edge& a, const Edge& b) {
    return std::tie(a.u, a.v) < std::tie(b.u, b.v);
  });
  for (std::size_t i = 1; i < edges_.size(); ++i) {
    if (edges_[i].u == edges_[i - 1].u && edges_[i].v == edges_[i - 1].v) {
      throw DomainError("duplicate edge (" + std::to_string(edges_[i].u) + "," +
                        std::to_string(edges_[i].v) + ")");
    }
  }

  const std::size_t n = nodes_.size();
  std::vector<std::size_t> count(n, 0);
  std::vector<std::pair<std::uint32_t, std::uint32_t>> ends;
  ends.reserve(edges_.size());
  for (const Edge& e : edges_) {
    const auto iu = index_of(e.u);
    const auto iv = index_of(e.v);
    if (!iu || !iv) {
      throw DomainError("edge endpoint not in node set: (" + std::to_string(e.u) + "," +
                        std::to_string(e.v) + ")");
    }
    ends.emplace_back(static_cast<std::uint32_t>(*iu), static_cast<std::uint32_t>(*iv));
    ++count[*iu];
    ++count[*iv];
  }

  offsets_.assign(n + 1, 0);
  for (std::size_t i = 0; i < n; ++i) offsets_[i + 1] = offsets_[i] + count[i];
  adjacency_.resize(offsets_[n]);
  degree_.assign(n, 0.0);
  std::vector<std::size_t> cursor(offsets_.begin(), offsets_.end() - 1);
  for (std::size_t k = 0; k < edges_.size(); ++k) {
    const auto [iu, iv] = ends[k];
    const double w = edges_[k].w;
    adjacency_[cursor[iu]++] = {iv, w};
    adjacency_[cursor[iv]++] = {iu, w};
    degree_[iu] += w;
    degree_[iv] += w;
    total_weight_ += w;
  }
}

std::optional<std::size_t> Snapshot::index_of(NodeId n) const noexcept {
  const auto it = std::lower_bound(nodes_.begin(), nodes_.end(), n);
  if (it == nodes_.end() || *it != n) return std::nullopt;
  return static_cast<std::size_t>(it - nodes_.begin());
}

Snapshot Snapshot::with_index(int t) const {
  Snapshot copy = *this;
  copy.t_ = t;
  return copy;
}

Partition::Partition(std::vector<Entry> assignment) : entries_(std::move(assignment)) {
  std::sort(entries_.begin(), entries_.end());
  for (std::size_t i = 1; i < entries_.size(); ++i) {
    if (entries_[i].first == entries_[i - 1].first) {
      throw DomainError("node assigned twice: " + std::to_string(entries_[i].first));
    }
  }
}

Partition::Partition(const std::map<NodeId, CommunityId>& assignment)
    : entries_(assignment.begin(), assignment.end()) {}

Partition Partition::singletons(std::span<const NodeId> nodes) {
  std::vector<Entry> entries;
  entries.reserve(nodes.size());
  for (NodeId n : nodes) entries.emplace_back(n, n);
  return Partition(std::move(entries));
}

Partition Partition::uniform(std::span<const NodeId> nodes, CommunityId c) {
  std::vector<Entry> entries;
  entries.reserve(nodes.size());
  for (NodeId n : nodes) entries.emplace_back(n, c);
  return Partition(std::move(entries));
}

std::optional<CommunityId> Partition::find(NodeId n) const noexcept {
  const auto it = std::lower_bound(entries_.begin(), entries_.end(), n,
                                   [](const Entry& e, NodeId key) { return e.first < key; });
  if (it == entries_.end() || it->first != n) return std::nullopt;
  return it->second;
}

CommunityId Partition::community_of(NodeId n) const {
  const auto c = find(n);
  if (!c) throw DomainError("node not in partition: " + std::to_string(n));
  return *c;
}

std::vector<NodeId> Partition::domain() const {
  std::vector<NodeId> out;
  out.reserve(entries_.size());
  for (const auto& [n, c] : entries_) out.push_back(n);
  return out;
}

std::vector<CommunityId> Partition::communities() const {
  std::vector<CommunityId> out;
  out.reserve(entries_.size());
  for (const auto& [n, c] : entries_) out.push_back(c);
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

std::map<CommunityId, std::vector<NodeId>> Partition::members() const {
  std::map<CommunityId, std::vector<NodeId>> out;
  for (const auto& [n, c] : entries_) out[c].push_back(n);
  return out;
}

bool Partition::covers(const Snapshot& s) const noexcept {
  const auto nodes = s.nodes();
  if (nodes.size() != entries_.size()) return false;
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    if (nodes[i] != entries_[i].first) return false;
  }
  return true;
}

CommunityId Partition::max_label() const noexcept {
  CommunityId best = -1;
  for (const auto& [n, c] : entries_) best = std::max(best, c);
  return best;
}

bool same_grouping(const Partition& a, const Partition& b) {
  if (a.size() != b.size()) return false;
  std::unordered_map<CommunityId, CommunityId> forward;
  std::unordered_map<CommunityId, CommunityId> backward;
  const auto ea = a.entries();
  const auto eb = b.entries();
  for (std::size_t i = 0; i < ea.size(); ++i) {
    if (ea[i].first != eb[i].first) return false;
    const auto [fit, fnew] = forward.emplace(ea[i].second, eb[i].second);
    if (!fnew && fit->second != eb[i].second) return false;
    const auto [bit, bnew] = backward.emplace(eb[i].second, ea[i].second);
    if (!bnew && bit->second != ea[i].second) return false;
  }
  return true;
}

void DynamicGraph::validate() const {
  for (std::size_t k = 0; k < snapshots.size(); ++k) {
    if (snapshots[k].t() != static_cast<int>(k)) {
      throw DomainError("snapshot " + std::to_string(k) + " has index " +
                        std::to_string(snapshots[k].t()));
    }
  }
  if (!ground_truth.empty()) {
    if (ground_truth.size() != snapshots.size()) {
      throw DomainError("ground truth length does not match snapshot count");
    }
    for (std::size_t k = 0; k < snapshots.size(); ++k) {
      if (!ground_truth[k].covers(snapshots[k])) {
        throw DomainError("ground truth " + std::to_string(k) +
                          " does not cover its snapshot's nodes");
      }
    }
  }
}

double total_weight(const Snapshot& s) noexcept { return s.total_weight(); }

double weighted_degree(const Snapshot& s, NodeId n) {
  const auto idx = s.index_of(n);
  if (!idx) throw DomainError("unknown node " + std::to_string(n));
  return s.degree_at(*idx);
}

namespace {

struct CommunityTotals {
  double inner = 0.0;   // intra-community weight, each edge once
  double degree = 0.0;  // summed weighted degree of members
};

std::map<CommunityId, CommunityTotals> community_totals(const Snapshot& s, const Partition& p) {
  if (!p.covers(s)) throw DomainError("partition does not cover the snapshot's nodes");
  std::map<CommunityId, CommunityTotals> totals;
  const auto entries = p.entries();  // aligned with s.nodes()
  for (std::size_t i = 0; i < entries.size(); ++i) {
    totals[entries[i].second].degree += s.degree_at(i);
  }
  for (const Edge& e : s.edges()) {
    const CommunityId cu = entries[*s.index_of(e.u)].second;
    if (cu == entries[*s.index_of(e.v)].second) totals[cu].inner += e.w;
  }
  return totals;
}

double contribution(const CommunityTotals& c, double wstar) {
  const double share = c.degree / (2.0 * wstar);
  return c.inner / wstar - share * share;
}

void require_edges(const Snapshot& s) {
  if (!(s.total_weight() > 0.0)) throw DomainError("modularity undefined: total weight is 0");
}

}  // namespace

double community_modularity(const Snapshot& s, const Partition& p, CommunityId c) {
  require_edges(s);
  const auto totals = community_totals(s, p);
  const auto it = totals.find(c);
  if (it == totals.end()) throw DomainError("unknown community " + std::to_string(c));
  return contribution(it->second, s.total_weight());
}

std::map<CommunityId, double> community_modularities(const Snapshot& s, const Partition& p) {
  require_edges(s);
  std::map<CommunityId, double> out;
  for (const auto& [c, totals] : community_totals(s, p)) {
    out.emplace(c, contribution(totals, s.total_weight()));
  }
  return out;
}

double modularity(const Snapshot& s, const Partition& p) {
  require_edges(s);
  double q = 0.0;
  for (const auto& [c, totals] : community_totals(s, p)) q += contribution(totals, s.total_weight());
  return q;
}

Partition restrict(const Partition& p, std::span<const NodeId> nodes) {
  std::vector<NodeId> sorted(nodes.begin(), nodes.end());
  std::sort(sorted.begin(), sorted.end());
  std::vector<Partition::Entry> kept;
  for (const auto& entry : p.entries()) {
    if (std::binary_search(sorted.begin(), sorted.end(), entry.first)) kept.push_back(entry);
  }
  return Partition(std::move(kept));
}

Partition restrict(const Partition& p, const Snapshot& s) { return restrict(p, s.nodes()); }

std::vector<NodeId> intersect(std::span<const NodeId> a, std::span<const NodeId> b) {
  std::vector<NodeId> out;
  std::set_intersection(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
  return out;
}

}  // namespace evocd
