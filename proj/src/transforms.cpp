#include "evocd/transforms.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <string>

#include "evocd/errors.hpp"

namespace evocd {

Scenario scenario_of(TransformKind kind) noexcept {
  switch (kind) {
    case TransformKind::Expansion:
    case TransformKind::Intermittence:
    case TransformKind::Switch:
      return Scenario::Noise;
    case TransformKind::Merge:
    case TransformKind::Split:
    case TransformKind::Death:
    case TransformKind::Birth:
      return Scenario::Morphing;
    case TransformKind::Mixing:
    case TransformKind::Removal:
      return Scenario::Disruptive;
  }
  return Scenario::Noise;
}

std::string_view to_string(TransformKind kind) noexcept {
  switch (kind) {
    case TransformKind::Expansion: return "expansion";
    case TransformKind::Intermittence: return "intermittence";
    case TransformKind::Switch: return "switch";
    case TransformKind::Merge: return "merge";
    case TransformKind::Split: return "split";
    case TransformKind::Death: return "death";
    case TransformKind::Birth: return "birth";
    case TransformKind::Mixing: return "mixing";
    case TransformKind::Removal: return "removal";
  }
  return "?";
}

std::string_view to_string(Scenario scenario) noexcept {
  switch (scenario) {
    case Scenario::Noise: return "noise";
    case Scenario::Morphing: return "morphing";
    case Scenario::Disruptive: return "disruptive";
  }
  return "?";
}

TransformKind parse_transform(std::string_view name) {
  std::string lower;
  for (char ch : name) lower.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(ch))));
  for (const TransformKind k : kAllTransforms) {
    if (to_string(k) == lower) return k;
  }
  throw ConfigError("unknown transformation: " + std::string(name));
}

void TransformConfig::validate() const {
  auto fail = [](const std::string& what) { throw ConfigError("invalid transform config: " + what); };
  auto fraction = [&](double x, const char* name) {
    if (!(x >= 0.0 && x <= 1.0)) fail(std::string(name) + " must lie in [0,1]");
  };
  if (n_snapshots < 1) fail("n_snapshots must be at least 1");
  if (start < 1) fail("start must be at least 1 (snapshot 0 is the untouched base)");
  if (start > end) fail("start must not exceed end");
  if (end > n_snapshots) fail("end must not exceed n_snapshots");
  fraction(tau, "tau");
  fraction(phi_int, "phi_int");
  fraction(phi_swi, "phi_swi");
  fraction(phi_rem_lo, "phi_rem_lo");
  fraction(phi_rem_hi, "phi_rem_hi");
  if (phi_rem_lo > phi_rem_hi) fail("phi_rem_lo must not exceed phi_rem_hi");
  fraction(phi_mix, "phi_mix");
  fraction(birth_fraction, "birth_fraction");
  fraction(growth, "growth");
  fraction(mu, "mu");
  if (gamma < 0) fail("gamma must be a natural number");
  if (targets < 1) fail("targets must be at least 1");
  if (!(weight_floor > 0.0 && weight_floor < 1.0)) fail("weight_floor must lie in (0,1)");
}

double switch_return_probability(int t_off, int gamma) noexcept {
  return std::min(1.0, std::exp(static_cast<double>(t_off - gamma)));
}

namespace {

EdgeKey key_of(NodeId a, NodeId b) { return canonical(a, b); }

// k items drawn without replacement, probability proportional to weight.
// Falls back to uniform draws once the remaining weight is zero.
std::vector<NodeId> sample_weighted(Rng& rng, std::vector<NodeId> items, std::vector<double> weights,
                                    std::size_t k) {
  std::vector<NodeId> out;
  k = std::min(k, items.size());
  while (out.size() < k) {
    std::size_t i = rng.weighted_index(weights);
    if (i == weights.size()) i = rng.below(items.size());
    out.push_back(items[i]);
    items.erase(items.begin() + static_cast<std::ptrdiff_t>(i));
    weights.erase(weights.begin() + static_cast<std::ptrdiff_t>(i));
  }
  return out;
}

std::map<NodeId, double> weighted_degrees(const EvolutionState& st) {
  std::map<NodeId, double> deg;
  for (const NodeId n : st.nodes) deg[n] = 0.0;
  for (const auto& [k, w] : st.edges) {
    deg[k.first] += w;
    deg[k.second] += w;
  }
  return deg;
}

std::map<NodeId, int> edge_counts(const EvolutionState& st) {
  std::map<NodeId, int> deg;
  for (const NodeId n : st.nodes) deg[n] = 0;
  for (const auto& [k, w] : st.edges) {
    ++deg[k.first];
    ++deg[k.second];
  }
  return deg;
}

// Members of each GT^0 community among the active nodes.
std::map<CommunityId, std::vector<NodeId>> active_members(const EvolutionState& st) {
  std::map<CommunityId, std::vector<NodeId>> out;
  for (const NodeId n : st.nodes) out[st.labels.at(n)].push_back(n);
  return out;
}

void deactivate(EvolutionState& st, std::span<const NodeId> removed) {
  const std::set<NodeId> gone(removed.begin(), removed.end());
  for (auto it = st.edges.begin(); it != st.edges.end();) {
    if (gone.contains(it->first.first) || gone.contains(it->first.second)) {
      st.parked.insert(*it);
      it = st.edges.erase(it);
    } else {
      ++it;
    }
  }
  for (const NodeId n : removed) {
    st.nodes.erase(n);
    st.inactive[n] = 0;
  }
}

void reactivate(EvolutionState& st, std::span<const NodeId> back) {
  for (const NodeId n : back) {
    st.inactive.erase(n);
    st.nodes.insert(n);
  }
  for (auto it = st.parked.begin(); it != st.parked.end();) {
    if (st.nodes.contains(it->first.first) && st.nodes.contains(it->first.second)) {
      st.edges.insert(*it);
      it = st.parked.erase(it);
    } else {
      ++it;
    }
  }
}

// ceil(phi * |V|) active nodes, excluding `exempt`, drawn with p ∝ 1/degree.
std::vector<NodeId> pick_low_degree(EvolutionState& st, double phi, const std::set<NodeId>& exempt) {
  const auto count = static_cast<std::size_t>(std::ceil(phi * static_cast<double>(st.nodes.size())));
  const auto deg = edge_counts(st);
  std::vector<NodeId> items;
  std::vector<double> weights;
  for (const NodeId n : st.nodes) {
    if (exempt.contains(n)) continue;
    items.push_back(n);
    weights.push_back(1.0 / std::max(1, deg.at(n)));
  }
  return sample_weighted(st.rng, std::move(items), std::move(weights), count);
}

double raised(double w, double tau) { return std::min(1.0, w + tau); }
double lowered(double w, double tau, double floor) { return std::max(w - tau, std::min(w, floor)); }

void plan_merge(EvolutionState& st, const std::map<CommunityId, std::vector<NodeId>>& members,
                const TransformConfig& cfg) {
  std::vector<CommunityId> ids;
  for (const auto& [c, m] : members) ids.push_back(c);
  if (ids.size() < 2 * static_cast<std::size_t>(cfg.targets)) {
    throw ConfigError("merge needs " + std::to_string(2 * cfg.targets) + " communities, base has " +
                      std::to_string(ids.size()));
  }
  st.rng.shuffle(std::span<CommunityId>(ids));
  const auto wdeg = weighted_degrees(st);
  std::map<NodeId, CommunityId> final_labels = st.labels;
  for (int k = 0; k < cfg.targets; ++k) {
    MergePlan mp{std::min(ids[2 * k], ids[2 * k + 1]), std::max(ids[2 * k], ids[2 * k + 1]), {}, false};
    const auto& a = members.at(mp.a);
    const auto& b = members.at(mp.b);
    std::set<NodeId> in_a(a.begin(), a.end()), in_b(b.begin(), b.end());
    std::size_t intra = 0;
    std::set<EdgeKey> cross;
    for (const auto& [e, w] : st.edges) {
      const bool ua = in_a.contains(e.first), va = in_a.contains(e.second);
      const bool ub = in_b.contains(e.first), vb = in_b.contains(e.second);
      if ((ua && va) || (ub && vb)) ++intra;
      if ((ua && vb) || (ub && va)) cross.insert(e);
    }
    const double pairs_a = 0.5 * static_cast<double>(a.size() * (a.size() - 1));
    const double pairs_b = 0.5 * static_cast<double>(b.size() * (b.size() - 1));
    const double density = static_cast<double>(intra) / std::max(1.0, pairs_a + pairs_b);
    const double full = static_cast<double>(a.size() * b.size());
    const auto wanted = static_cast<std::size_t>(std::min(full, std::ceil(density * full)));

    std::vector<double> wa, wb;
    for (const NodeId n : a) wa.push_back(wdeg.at(n));
    for (const NodeId n : b) wb.push_back(wdeg.at(n));
    std::size_t attempts = 0;
    while (cross.size() < wanted && attempts++ < 100 * wanted + 100) {
      std::size_t i = st.rng.weighted_index(wa), j = st.rng.weighted_index(wb);
      if (i == wa.size()) i = st.rng.below(a.size());
      if (j == wb.size()) j = st.rng.below(b.size());
      cross.insert(key_of(a[i], b[j]));
    }
    mp.cross.assign(cross.begin(), cross.end());
    for (const NodeId n : b) final_labels[n] = mp.a;
    st.plan.merges.push_back(std::move(mp));
  }
  st.plan.final_gt = Partition(final_labels);
}

void plan_split(EvolutionState& st, const std::map<CommunityId, std::vector<NodeId>>& members,
                const TransformConfig& cfg) {
  std::vector<CommunityId> eligible;
  for (const auto& [c, m] : members) {
    if (m.size() >= 6) eligible.push_back(c);
  }
  if (eligible.size() < static_cast<std::size_t>(cfg.targets)) {
    throw ConfigError("split needs " + std::to_string(cfg.targets) +
                      " communities of size >= 6, base has " + std::to_string(eligible.size()));
  }
  st.rng.shuffle(std::span<CommunityId>(eligible));
  std::map<NodeId, CommunityId> final_labels = st.labels;
  CommunityId fresh = Partition(st.labels).max_label() + 1;
  for (int k = 0; k < cfg.targets; ++k) {
    const CommunityId c = eligible[k];
    std::vector<NodeId> m = members.at(c);
    st.rng.shuffle(std::span<NodeId>(m));
    const std::size_t half = m.size() / 2;
    for (std::size_t i = 0; i < m.size(); ++i) {
      st.plan.split_side[m[i]] = i < half ? 0 : 1;
      if (i >= half) final_labels[m[i]] = fresh;
    }
    ++fresh;
    st.plan.split_communities.insert(c);
  }
  for (const auto& [e, w] : st.edges) {
    const auto su = st.plan.split_side.find(e.first);
    const auto sv = st.plan.split_side.find(e.second);
    if (su == st.plan.split_side.end() || sv == st.plan.split_side.end()) continue;
    if (st.labels.at(e.first) == st.labels.at(e.second) && su->second != sv->second) {
      st.plan.loosen.insert(e);
    }
  }
  st.plan.final_gt = Partition(final_labels);
}

std::map<NodeId, int> internal_degrees(const EvolutionState& st) {
  std::map<NodeId, int> out;
  for (const NodeId n : st.nodes) out[n] = 0;
  for (const auto& [e, w] : st.edges) {
    if (st.labels.at(e.first) == st.labels.at(e.second)) {
      ++out[e.first];
      ++out[e.second];
    }
  }
  return out;
}

void plan_death(EvolutionState& st, const std::map<CommunityId, std::vector<NodeId>>& members,
                const TransformConfig& cfg) {
  std::vector<CommunityId> ids;
  for (const auto& [c, m] : members) ids.push_back(c);
  if (ids.size() < static_cast<std::size_t>(cfg.targets) + 1) {
    throw ConfigError("death needs " + std::to_string(cfg.targets + 1) + " communities, base has " +
                      std::to_string(ids.size()));
  }
  st.rng.shuffle(std::span<CommunityId>(ids));
  st.plan.dying.insert(ids.begin(), ids.begin() + cfg.targets);
  std::vector<CommunityId> survivors(ids.begin() + cfg.targets, ids.end());
  std::sort(survivors.begin(), survivors.end());

  const auto wdeg = weighted_degrees(st);
  const auto internal = internal_degrees(st);
  std::vector<double> pull;
  for (const CommunityId c : survivors) {
    double total = 0.0;
    for (const NodeId n : members.at(c)) total += wdeg.at(n);
    pull.push_back(total);
  }
  std::map<NodeId, CommunityId> final_labels = st.labels;
  for (const CommunityId c : st.plan.dying) {
    for (const NodeId v : members.at(c)) {
      std::size_t pick = st.rng.weighted_index(pull);
      if (pick == pull.size()) pick = st.rng.below(survivors.size());
      const auto& dest = members.at(survivors[pick]);
      std::vector<double> w;
      for (const NodeId u : dest) w.push_back(wdeg.at(u));
      const auto want = static_cast<std::size_t>(std::max(1, internal.at(v)));
      for (const NodeId u : sample_weighted(st.rng, dest, std::move(w), want)) {
        st.plan.tighten.insert(key_of(v, u));
      }
      final_labels[v] = survivors[pick];
    }
  }
  for (const auto& [e, w] : st.edges) {
    const CommunityId c = st.labels.at(e.first);
    if (c == st.labels.at(e.second) && st.plan.dying.contains(c)) st.plan.loosen.insert(e);
  }
  st.plan.final_gt = Partition(final_labels);
}

void plan_birth(EvolutionState& st, const std::map<CommunityId, std::vector<NodeId>>& members,
                const TransformConfig& cfg) {
  std::vector<NodeId> pool;
  std::vector<int> sizes;
  for (const auto& [c, m] : members) {
    sizes.push_back(static_cast<int>(m.size()));
    const auto share = static_cast<std::size_t>(std::lround(cfg.birth_fraction * static_cast<double>(m.size())));
    const std::size_t take = std::min(std::max<std::size_t>(2, share), m.size() - 1);
    std::vector<NodeId> shuffled = m;
    st.rng.shuffle(std::span<NodeId>(shuffled));
    pool.insert(pool.end(), shuffled.begin(), shuffled.begin() + static_cast<std::ptrdiff_t>(take));
  }
  if (pool.size() < 2) throw ConfigError("birth needs at least one community of size >= 3");
  st.rng.shuffle(std::span<NodeId>(pool));

  // Cut the pool into groups whose sizes follow the base size distribution.
  std::vector<std::vector<NodeId>> groups;
  std::size_t pos = 0;
  while (pos < pool.size()) {
    std::size_t size = static_cast<std::size_t>(sizes[st.rng.below(sizes.size())]);
    const std::size_t rest = pool.size() - pos;
    if (size >= rest || rest - size < 3) size = rest;
    groups.emplace_back(pool.begin() + static_cast<std::ptrdiff_t>(pos),
                        pool.begin() + static_cast<std::ptrdiff_t>(pos + size));
    pos += size;
  }

  const auto internal = internal_degrees(st);
  std::map<NodeId, CommunityId> final_labels = st.labels;
  std::map<NodeId, std::size_t> group_of;
  CommunityId fresh = Partition(st.labels).max_label() + 1;
  for (std::size_t g = 0; g < groups.size(); ++g) {
    for (const NodeId v : groups[g]) {
      group_of[v] = g;
      final_labels[v] = fresh;
    }
    ++fresh;
  }

  for (const auto& [e, w] : st.edges) {
    const auto gu = group_of.find(e.first), gv = group_of.find(e.second);
    const bool eu = gu != group_of.end(), ev = gv != group_of.end();
    if (eu && ev && gu->second == gv->second) {
      st.plan.tighten.insert(e);
    } else if ((eu || ev) && st.labels.at(e.first) == st.labels.at(e.second)) {
      st.plan.loosen.insert(e);
    }
  }

  // Each emigrant gets as many partners in its new community as it had in
  // its old one, capped by the group size.
  for (const auto& group : groups) {
    std::map<NodeId, int> planned;
    for (const NodeId v : group) planned[v] = 0;
    for (const auto& e : st.plan.tighten) {
      if (planned.contains(e.first) && planned.contains(e.second)) {
        ++planned[e.first];
        ++planned[e.second];
      }
    }
    const int cap = static_cast<int>(group.size()) - 1;
    auto target = [&](NodeId v) { return std::min(cap, std::max(1, internal.at(v))); };
    for (const NodeId v : group) {
      std::vector<NodeId> open;
      for (const NodeId u : group) {
        if (u != v && planned[u] < target(u) && !st.plan.tighten.contains(key_of(u, v))) open.push_back(u);
      }
      st.rng.shuffle(std::span<NodeId>(open));
      for (std::size_t i = 0; i < open.size() && planned[v] < target(v); ++i) {
        st.plan.tighten.insert(key_of(v, open[i]));
        ++planned[v];
        ++planned[open[i]];
      }
    }
  }
  st.plan.final_gt = Partition(final_labels);
}

void step_expansion(EvolutionState& st, const TransformConfig& cfg) {
  const auto& pool = st.plan.base_degrees;
  if (pool.empty()) return;
  const auto count = static_cast<std::size_t>(std::ceil(cfg.growth * static_cast<double>(pool.size())));
  auto wdeg = weighted_degrees(st);
  auto members = active_members(st);
  for (std::size_t k = 0; k < count; ++k) {
    const int d = pool[st.rng.below(pool.size())];
    std::vector<CommunityId> ids;
    std::vector<double> sizes;
    for (const auto& [c, m] : members) {
      ids.push_back(c);
      sizes.push_back(static_cast<double>(m.size()));
    }
    if (ids.empty()) return;
    std::size_t h = st.rng.weighted_index(sizes);
    if (h == ids.size()) h = st.rng.below(ids.size());
    const CommunityId host = ids[h];

    std::vector<NodeId> inside = members.at(host), outside;
    for (const auto& [c, m] : members) {
      if (c != host) outside.insert(outside.end(), m.begin(), m.end());
    }
    const auto n_in = std::min<std::size_t>(static_cast<std::size_t>(std::lround((1.0 - cfg.mu) * d)), inside.size());
    const auto n_out = std::min<std::size_t>(static_cast<std::size_t>(d) - std::min<std::size_t>(n_in, d), outside.size());
    auto weights_of = [&](const std::vector<NodeId>& v) {
      std::vector<double> w;
      for (const NodeId n : v) w.push_back(wdeg.at(n));
      return w;
    };
    auto chosen = sample_weighted(st.rng, inside, weights_of(inside), n_in);
    const auto external = sample_weighted(st.rng, outside, weights_of(outside), n_out);
    chosen.insert(chosen.end(), external.begin(), external.end());

    const NodeId fresh = st.next_node++;
    st.nodes.insert(fresh);
    st.labels[fresh] = host;
    wdeg[fresh] = 0.0;
    for (const NodeId u : chosen) {
      const double w = st.rng.uniform_open_closed();
      st.edges[key_of(fresh, u)] = w;
      wdeg[u] += w;
      wdeg[fresh] += w;
    }
    members[host].push_back(fresh);
  }
}

void step_intermittence(EvolutionState& st, const TransformConfig& cfg) {
  const std::vector<NodeId> back = std::move(st.returning);
  reactivate(st, back);
  st.returning = pick_low_degree(st, cfg.phi_int, std::set<NodeId>(back.begin(), back.end()));
  deactivate(st, st.returning);
}

void step_switch(EvolutionState& st, const TransformConfig& cfg) {
  std::vector<NodeId> back;
  for (auto& [n, t_off] : st.inactive) {
    ++t_off;
    if (st.rng.bernoulli(switch_return_probability(t_off, cfg.gamma))) back.push_back(n);
  }
  reactivate(st, back);
  deactivate(st, pick_low_degree(st, cfg.phi_swi, std::set<NodeId>(back.begin(), back.end())));
}

void step_merge(EvolutionState& st, const TransformConfig& cfg) {
  const auto members = active_members(st);
  for (MergePlan& mp : st.plan.merges) {
    if (mp.done) continue;
    const auto& a = members.at(mp.a);
    const auto& b = members.at(mp.b);
    const std::set<NodeId> in_a(a.begin(), a.end()), in_b(b.begin(), b.end());
    double intra = 0.0, cross = 0.0;
    for (const auto& [e, w] : st.edges) {
      const bool ua = in_a.contains(e.first), va = in_a.contains(e.second);
      const bool ub = in_b.contains(e.first), vb = in_b.contains(e.second);
      if ((ua && va) || (ub && vb)) intra += w;
      if ((ua && vb) || (ub && va)) cross += w;
    }
    const double pairs = 0.5 * static_cast<double>(a.size() * (a.size() - 1) + b.size() * (b.size() - 1));
    const double cross_density = cross / static_cast<double>(a.size() * b.size());
    if (cross_density >= intra / std::max(1.0, pairs)) {
      mp.done = true;
      continue;
    }
    for (const EdgeKey& e : mp.cross) {
      const auto it = st.edges.find(e);
      st.edges[e] = it == st.edges.end() ? std::min(cfg.tau, 1.0) : raised(it->second, cfg.tau);
    }
  }
}

void step_reweight(EvolutionState& st, const TransformConfig& cfg) {
  for (const EdgeKey& e : st.plan.loosen) {
    const auto it = st.edges.find(e);
    if (it != st.edges.end()) it->second = lowered(it->second, cfg.tau, cfg.weight_floor);
  }
  for (const EdgeKey& e : st.plan.tighten) {
    if (!st.nodes.contains(e.first) || !st.nodes.contains(e.second)) continue;
    const auto it = st.edges.find(e);
    if (it == st.edges.end()) {
      st.edges.emplace(e, std::min(cfg.tau, 1.0));
    } else {
      it->second = raised(it->second, cfg.tau);
    }
  }
}

void step_mixing(EvolutionState& st, const TransformConfig& cfg) {
  const auto rewires = static_cast<std::size_t>(std::ceil(cfg.phi_mix * static_cast<double>(st.edges.size())));
  const std::size_t swaps = (rewires + 1) / 2;
  for (std::size_t s = 0; s < swaps; ++s) {
    if (st.edges.size() < 2) return;
    std::vector<EdgeKey> keys;
    keys.reserve(st.edges.size());
    for (const auto& [e, w] : st.edges) keys.push_back(e);
    for (int attempt = 0; attempt < 100; ++attempt) {
      const std::size_t i = st.rng.below(keys.size());
      const std::size_t j = st.rng.below(keys.size());
      if (i == j) continue;
      auto [a, b] = keys[i];
      auto [c, d] = keys[j];
      if (st.rng.bernoulli(0.5)) std::swap(a, b);
      if (st.rng.bernoulli(0.5)) std::swap(c, d);
      if (a == c || a == d || b == c || b == d) continue;
      // (a,b) + (c,d) -> (a,d) + (c,b), moving the smaller weight across.
      const double delta = std::min(st.edges.at(keys[i]), st.edges.at(keys[j]));
      const EdgeKey ad = key_of(a, d), cb = key_of(c, b);
      const auto wad = st.edges.find(ad), wcb = st.edges.find(cb);
      const double new_ad = (wad == st.edges.end() ? 0.0 : wad->second) + delta;
      const double new_cb = (wcb == st.edges.end() ? 0.0 : wcb->second) + delta;
      if (new_ad > 1.0 || new_cb > 1.0) continue;
      for (const EdgeKey& k : {keys[i], keys[j]}) {
        const double left = st.edges.at(k) - delta;
        if (left > 0.0) {
          st.edges[k] = left;
        } else {
          st.edges.erase(k);
        }
      }
      st.edges[ad] = new_ad;
      st.edges[cb] = new_cb;
      break;
    }
  }
}

void step_removal(EvolutionState& st, int t) {
  const auto count = static_cast<std::size_t>(std::ceil(st.plan.phi_rem * static_cast<double>(st.nodes.size())));
  if (count >= st.nodes.size()) {
    throw EvolutionError("removal exhausted the node set at snapshot " + std::to_string(t));
  }
  std::vector<NodeId> all(st.nodes.begin(), st.nodes.end());
  st.rng.shuffle(std::span<NodeId>(all));
  all.resize(count);
  deactivate(st, all);
  // Removal is permanent.
  for (const NodeId n : all) st.inactive.erase(n);
  st.parked.clear();
}

Snapshot materialize(const EvolutionState& st, int t) {
  std::vector<Edge> edges;
  edges.reserve(st.edges.size());
  for (const auto& [e, w] : st.edges) edges.push_back({e.first, e.second, w});
  return Snapshot(t, std::vector<NodeId>(st.nodes.begin(), st.nodes.end()), std::move(edges));
}

Partition ground_truth_at(const EvolutionState& st, int t) {
  std::vector<Partition::Entry> entries;
  entries.reserve(st.nodes.size());
  const bool final = st.plan.final_gt && st.plan.switch_t >= 0 && t >= st.plan.switch_t;
  for (const NodeId n : st.nodes) {
    entries.emplace_back(n, final ? st.plan.final_gt->community_of(n) : st.labels.at(n));
  }
  return Partition(std::move(entries));
}

}  // namespace

EvolutionState plan(const Snapshot& base, const Partition& gt0, const TransformConfig& cfg) {
  cfg.validate();
  if (!gt0.covers(base)) throw DomainError("plan: ground truth does not cover the base snapshot");

  EvolutionState st;
  st.rng = Rng(derive_seed(cfg.seed, static_cast<int>(cfg.kind)));
  st.current = base.with_index(0);
  st.gt = gt0;
  st.nodes.insert(base.nodes().begin(), base.nodes().end());
  for (const Edge& e : base.edges()) st.edges.emplace(EdgeKey{e.u, e.v}, e.w);
  for (const auto& [n, c] : gt0.entries()) st.labels.emplace(n, c);
  st.next_node = base.nodes().empty() ? 0 : base.nodes().back() + 1;

  const auto members = gt0.members();
  switch (cfg.kind) {
    case TransformKind::Expansion: {
      const auto deg = edge_counts(st);
      for (const auto& [n, d] : deg) st.plan.base_degrees.push_back(d);
      break;
    }
    case TransformKind::Removal:
      st.plan.phi_rem = cfg.phi_rem_lo + (cfg.phi_rem_hi - cfg.phi_rem_lo) * st.rng.uniform();
      break;
    case TransformKind::Merge: plan_merge(st, members, cfg); break;
    case TransformKind::Split: plan_split(st, members, cfg); break;
    case TransformKind::Death: plan_death(st, members, cfg); break;
    case TransformKind::Birth: plan_birth(st, members, cfg); break;
    case TransformKind::Intermittence:
    case TransformKind::Switch:
    case TransformKind::Mixing:
      break;
  }
  if (st.plan.final_gt) {
    const int window = cfg.end - cfg.start + 1;
    const int full = cfg.tau > 0.0 ? static_cast<int>(std::ceil(1.0 / cfg.tau - 1e-9)) : window;
    const int steps = std::min(window, std::max(1, full));
    st.plan.switch_t = cfg.start + (steps + 1) / 2 - 1;
  }
  return st;
}

EvolutionState step(EvolutionState state, int t, const TransformConfig& cfg) {
  if (t >= cfg.start && t <= cfg.end) {
    switch (cfg.kind) {
      case TransformKind::Expansion: step_expansion(state, cfg); break;
      case TransformKind::Intermittence: step_intermittence(state, cfg); break;
      case TransformKind::Switch: step_switch(state, cfg); break;
      case TransformKind::Merge: step_merge(state, cfg); break;
      case TransformKind::Split:
      case TransformKind::Death:
      case TransformKind::Birth: step_reweight(state, cfg); break;
      case TransformKind::Mixing: step_mixing(state, cfg); break;
      case TransformKind::Removal: step_removal(state, t); break;
    }
    if (t == cfg.end) {
      for (const EdgeKey& e : state.plan.loosen) {
        const auto it = state.edges.find(e);
        if (it != state.edges.end() && it->second <= cfg.weight_floor) state.edges.erase(it);
      }
    }
  } else if (t == cfg.end + 1 && !state.inactive.empty()) {
    std::vector<NodeId> back;
    for (const auto& [n, t_off] : state.inactive) back.push_back(n);
    reactivate(state, back);
    state.returning.clear();
  }
  state.current = materialize(state, t);
  state.gt = ground_truth_at(state, t);
  return state;
}

DynamicGraph evolve(const Snapshot& base, const Partition& gt0, const TransformConfig& cfg) {
  EvolutionState st = plan(base, gt0, cfg);
  DynamicGraph g;
  g.snapshots.reserve(static_cast<std::size_t>(cfg.n_snapshots) + 1);
  g.snapshots.push_back(st.current);
  g.ground_truth.push_back(ground_truth_at(st, 0));
  for (int t = 1; t <= cfg.n_snapshots; ++t) {
    st = step(std::move(st), t, cfg);
    g.snapshots.push_back(st.current);
    g.ground_truth.push_back(st.gt);
  }
  g.final_ground_truth = st.plan.final_gt;
  g.meta["transform"] = std::string(to_string(cfg.kind));
  g.meta["scenario"] = std::string(to_string(scenario_of(cfg.kind)));
  g.meta["start"] = std::to_string(cfg.start);
  g.meta["end"] = std::to_string(cfg.end);
  g.meta["tau"] = std::to_string(cfg.tau);
  g.meta["seed"] = std::to_string(cfg.seed);
  if (st.plan.switch_t >= 0) g.meta["gt_switch_t"] = std::to_string(st.plan.switch_t);
  if (cfg.kind == TransformKind::Removal) g.meta["phi_rem"] = std::to_string(st.plan.phi_rem);
  return g;
}

}  // namespace evocd
