#include "dmsf/engine.hpp"

#include "json.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <unordered_map>

namespace dmsf {

namespace {

constexpr int64_t kInf = std::numeric_limits<int64_t>::max();
// Virtual joining edges sit above every caller rank.
constexpr int64_t kVirtualRank = std::numeric_limits<int64_t>::max() / 4;

int64_t sat_mul(int64_t a, int64_t b) {
  if (a == 0 || b == 0) return 0;
  if (a > kInf / b) return kInf;
  return a * b;
}

struct CoreFailure {
  enum Kind { kPruner, kOverrun, kInjected } kind;
};

std::unique_ptr<DecrementalMsf> make_sub(Graph g, const EngineConfig& cfg) {
  if (g.num_edges() <= cfg.base_case_edges) return std::make_unique<MultigraphMsf>(std::move(g));
  EngineConfig c = cfg;
  c.depth = cfg.depth + 1;
  c.inject_failure = nullptr;
  return std::make_unique<DynamicMsfEngine>(std::move(g), std::move(c));
}

// Inner algorithm of a few-non-tree instance. Graphs above the base case get
// the recursive engine behind the phase-rebuilding wrapper.
DecrementalFactory few_inner_factory(const EngineConfig& cfg) {
  return [cfg](Graph g) -> std::unique_ptr<DecrementalMsf> {
    if (g.num_edges() <= cfg.base_case_edges) return std::make_unique<MultigraphMsf>(std::move(g));
    EngineParams ep = engine_params(g.num_nodes(), g.num_edges(), cfg, *cfg.decomposer);
    return std::make_unique<PhasedDecremental>(std::move(g), engine_factory(cfg), std::max<int64_t>(2, ep.T));
  };
}

}  // namespace

DecrementalFactory engine_factory(EngineConfig cfg) {
  return [cfg = std::move(cfg)](Graph g) { return make_sub(std::move(g), cfg); };
}

EngineParams engine_params(int n, int64_t m, const EngineConfig& cfg, const ExpansionDecomposer& dec) {
  EngineParams ep;
  ep.gamma = std::max(1.0, dec.gamma(std::max(1, n)));
  const int64_t gi = std::max<int64_t>(1, static_cast<int64_t>(std::ceil(ep.gamma)));
  ep.alpha = Ratio(1, gi * gi * gi);
  ep.d = static_cast<int>(std::max<int64_t>(3, gi));
  ep.s_low = gi;
  // A single M-cluster has at most 1.5 s_low edges, so it must fit in a leaf.
  ep.s_high = std::max<int64_t>(n / gi, 2 * gi);
  ep.alpha0 = cfg.alpha0 ? *cfg.alpha0 : BigRatio(conductance_guarantee(ep.alpha, ep.s_low).numerator(),
                                                  conductance_guarantee(ep.alpha, ep.s_low).denominator());
  ep.pi = 1;
  ep.B = sat_mul(sat_mul(cfg.c_B, ep.pi), ep.d);
  ep.T = cfg.deletion_budget ? *cfg.deletion_budget
                             : std::max<int64_t>(1, static_cast<int64_t>(m / (3.0 * ep.pi * ep.d * ep.gamma)));
  ep.p = cfg.p;
  return ep;
}

CompressedCluster compressed_cluster(const Hierarchy& h, int ci, std::span<const EdgeId> m_small,
                                     std::span<const NodeId> u) {
  if (ci < 0 || ci >= static_cast<int>(h.clusters.size())) throw std::invalid_argument("compressed_cluster: no such cluster");
  const Cluster& c = h.clusters[static_cast<size_t>(ci)];
  if (c.leaf) throw std::invalid_argument("compressed_cluster: cluster is a leaf");
  CompressedCluster cc;
  cc.cluster = ci;
  cc.super_of.assign(c.nodes.size(), -1);
  auto index = [&](NodeId x) -> int {
    auto it = std::lower_bound(c.nodes.begin(), c.nodes.end(), x);
    if (it == c.nodes.end() || *it != x) return -1;
    return static_cast<int>(it - c.nodes.begin());
  };
  for (int k : c.children) {
    const Cluster& kid = h.clusters[static_cast<size_t>(k)];
    if (kid.leaf) {
      cc.small_children.push_back(k);
      continue;
    }
    for (NodeId x : kid.nodes) cc.super_of[static_cast<size_t>(index(x))] = cc.num_super;
    cc.large_children.push_back(k);
    ++cc.num_super;
  }
  std::vector<char> in_u(c.nodes.size(), 0);
  for (NodeId x : u) {
    int i = index(x);
    if (i < 0 || cc.super_of[static_cast<size_t>(i)] < 0)
      throw std::invalid_argument("compressed_cluster: U outside the large children");
    in_u[static_cast<size_t>(i)] = 1;
  }
  cc.m_small.assign(m_small.begin(), m_small.end());
  for (EdgeId e : c.own) {
    if (!h.g.alive(e)) continue;
    int a = index(h.g.edge(e).u), b = index(h.g.edge(e).v);
    if (in_u[static_cast<size_t>(a)] || in_u[static_cast<size_t>(b)]) {
      cc.incident.push_back(e);
      continue;
    }
    cc.own.push_back(e);
    int k = (cc.super_of[static_cast<size_t>(a)] >= 0) + (cc.super_of[static_cast<size_t>(b)] >= 0);
    cc.part[k + 1].push_back(e);
  }
  return cc;
}

// ---------------------------------------------------------------------------
// Core: connected graph, max degree 3, ranks 1..m.

struct DynamicMsfEngine::Core {
  const EngineConfig& cfg;
  std::shared_ptr<const ExpansionDecomposer> dec;
  Graph g;
  std::vector<EdgeId> to_caller;
  EngineParams params;
  std::optional<Hierarchy> h;
  int64_t deletions = 0;
  int64_t build_work = 0;

  struct Small {
    int cluster = -1;
    std::unique_ptr<DecrementalMsf> a;
    std::unordered_map<EdgeId, EdgeId> local;
    std::vector<EdgeId> global;
  };
  struct Prune {
    int cluster = -1;
    std::unique_ptr<Pruner> p;
    const DynamicPruner* inner = nullptr;
    std::unordered_map<EdgeId, EdgeId> local;
    std::vector<NodeId> nodes;
  };
  struct Side {
    std::unordered_map<EdgeId, EdgeId> to;
    std::vector<EdgeId> from;
    void bind(EdgeId core, EdgeId loc) {
      to[core] = loc;
      if (static_cast<size_t>(loc) >= from.size()) from.resize(static_cast<size_t>(loc) + 1, kNoEdge);
      from[static_cast<size_t>(loc)] = core;
    }
  };
  struct Large {
    int cluster = -1;
    int num_super = 0;
    std::unordered_map<NodeId, NodeId> cnode;  // core node -> compressed node
    std::unique_ptr<FewNonTreeMsf> a1;
    std::unique_ptr<SCoveredMsf> a2;
    std::unique_ptr<MultigraphMsf> a3;
    Side s[4];
  };

  std::vector<Small> small;
  std::vector<int> small_of;
  std::vector<Prune> pruners;
  std::vector<int> pruner_of;
  std::vector<Large> large;
  std::vector<int> large_of;

  std::vector<int8_t> part;  // own edges of large clusters: 1..3, 4 once incident to P
  std::vector<char> m_small, in_h, junk;
  std::vector<EdgeId> h_main, h_orig;
  std::unique_ptr<FewNonTreeMsf> ah;
  std::vector<EdgeId> h_to_core;
  std::vector<int> copies;  // core edge -> its copies in msf(H)
  int64_t junk_count = 0, incident_count = 0;
  int64_t k_h = 1, b_h = 1;

  // Per-update scratch.
  std::vector<EdgeId> pending;
  EngineStats last;

  Core(const EngineConfig& c, std::shared_ptr<const ExpansionDecomposer> d) : cfg(c), dec(std::move(d)) {}

  int64_t sub_work() const {
    int64_t w = build_work;
    for (const auto& s : small) w += s.a->work();
    for (const auto& p : pruners)
      if (p.inner) w += p.inner->work();
    for (const auto& l : large) w += l.a1->work() + l.a2->work() + l.a3->work();
    if (ah) w += ah->work();
    return w;
  }

  template <class F>
  auto metered(const DecrementalMsf& a, F&& f) {
    int64_t before = a.work();
    auto r = f();
    if (cfg.work_budget && a.work() - before > *cfg.work_budget) throw CoreFailure{CoreFailure::kOverrun};
    return r;
  }

  void want_in_h(EdgeId e) {
    if (junk[e]) {
      junk[e] = 0;
      --junk_count;
    }
    if (in_h[e]) return;
    in_h[e] = 1;
    pending.push_back(e);
  }

  void absorb(const Side& s, const MsfDelta& d, EdgeId deleted, EdgeId skip) {
    for (EdgeId x : d.added) want_in_h(s.from[static_cast<size_t>(x)]);
    for (EdgeId x : d.removed) {
      EdgeId f = s.from[static_cast<size_t>(x)];
      if (f == deleted || f == skip) continue;
      if (m_small[f]) throw std::logic_error("engine: an M_small edge left a compressed forest");
      if (!junk[f]) {
        junk[f] = 1;
        ++junk_count;
      }
    }
  }

  void build();
  MsfDelta erase(EdgeId e);
  void record_h(const MsfDelta& d, std::unordered_map<EdgeId, int>& before);
  std::vector<EdgeId> forest() const {
    std::vector<EdgeId> out;
    for (EdgeId e = 0; e < static_cast<EdgeId>(copies.size()); ++e)
      if (copies[e] > 0) out.push_back(e);
    return out;
  }
};

void DynamicMsfEngine::Core::build() {
  const int n = g.num_nodes();
  const int64_t m = g.num_edges();
  const size_t cap = static_cast<size_t>(g.edge_capacity());
  params = engine_params(n, m, cfg, *dec);
  copies.assign(cap, 0);
  if (m == 0) return;

  MsfDecompParams mp;
  mp.p = cfg.p;
  mp.alpha = params.alpha;
  mp.d = params.d;
  mp.s_low = params.s_low;
  mp.s_high = params.s_high;
  mp.seed = cfg.seed;
  h = msf_decompose(g, mp, *dec);
  build_work += h->work;
  const auto& cl = h->clusters;
  const size_t nc = cl.size();

  // Small clusters.
  small_of.assign(nc, -1);
  m_small.assign(cap, 0);
  for (size_t ci = 0; ci < nc; ++ci) {
    if (!cl[ci].leaf) continue;
    Small s;
    s.cluster = static_cast<int>(ci);
    std::unordered_map<NodeId, NodeId> loc;
    for (size_t i = 0; i < cl[ci].nodes.size(); ++i) loc[cl[ci].nodes[i]] = static_cast<NodeId>(i);
    Graph sg(static_cast<int>(cl[ci].nodes.size()));
    for (EdgeId e : cl[ci].edges) {
      EdgeId x = sg.add_edge(loc.at(g.edge(e).u), loc.at(g.edge(e).v), h->g.weight(e));
      s.local[e] = x;
      s.global.push_back(e);
    }
    if (sg.num_edges() >= m) s.a = std::make_unique<MultigraphMsf>(std::move(sg));
    else s.a = make_sub(std::move(sg), cfg);
    for (EdgeId x : s.a->forest()) m_small[s.global[static_cast<size_t>(x)]] = 1;
    small_of[ci] = static_cast<int>(small.size());
    small.push_back(std::move(s));
  }

  // Pruners on non-root large clusters.
  pruner_of.assign(nc, -1);
  int64_t pi = 1, max_del = kInf;
  for (size_t ci = 1; ci < nc; ++ci) {
    if (cl[ci].leaf) continue;
    Prune p;
    p.cluster = static_cast<int>(ci);
    p.nodes = cl[ci].nodes;
    std::unordered_map<NodeId, NodeId> loc;
    for (size_t i = 0; i < p.nodes.size(); ++i) loc[p.nodes[i]] = static_cast<NodeId>(i);
    Graph pg(static_cast<int>(p.nodes.size()));
    for (EdgeId e : cl[ci].edges) p.local[e] = pg.add_edge(loc.at(g.edge(e).u), loc.at(g.edge(e).v), g.weight(e));
    if (cfg.pruner == PrunerKind::kComponent) {
      p.p = std::make_unique<ComponentPruner>(std::move(pg));
    } else {
      DynamicPrunerConfig pc;
      pc.alpha0 = params.alpha0;
      if (cfg.deletion_budget) pc.max_deletions = std::max<int64_t>(1, *cfg.deletion_budget);
      auto lv = std::make_unique<LasVegasPruner>(std::move(pg), pc);
      p.inner = &lv->inner();
      pi = std::max(pi, lv->inner().step_budget());
      max_del = std::min(max_del, lv->inner().max_deletions());
      p.p = std::move(lv);
    }
    pruner_of[ci] = static_cast<int>(pruners.size());
    pruners.push_back(std::move(p));
  }
  if (cfg.pruner == PrunerKind::kComponent) {
    for (size_t ci = 1; ci < nc; ++ci)
      if (!cl[ci].leaf) pi = std::max<int64_t>(pi, static_cast<int64_t>(cl[ci].edges.size() + cl[ci].nodes.size()));
  }
  params.pi = pi;
  params.B = std::max<int64_t>(1, sat_mul(sat_mul(cfg.c_B, pi), params.d));
  if (!cfg.deletion_budget) {
    double t = static_cast<double>(m) / (3.0 * static_cast<double>(pi) * params.d * params.gamma);
    params.T = std::max<int64_t>(1, std::min<int64_t>(max_del, static_cast<int64_t>(t)));
  }

  // Compressed clusters.
  part.assign(cap, 0);
  large_of.assign(nc, -1);
  for (size_t ci = 0; ci < nc; ++ci) {
    if (cl[ci].leaf) continue;
    std::vector<EdgeId> ms;
    for (int k : cl[ci].children)
      if (cl[static_cast<size_t>(k)].leaf)
        for (EdgeId x : small[static_cast<size_t>(small_of[static_cast<size_t>(k)])].a->forest())
          ms.push_back(small[static_cast<size_t>(small_of[static_cast<size_t>(k)])].global[static_cast<size_t>(x)]);
    CompressedCluster cc = compressed_cluster(*h, static_cast<int>(ci), ms, {});
    Large L;
    L.cluster = static_cast<int>(ci);
    L.num_super = cc.num_super;
    NodeId next = cc.num_super;
    for (size_t i = 0; i < cl[ci].nodes.size(); ++i)
      L.cnode[cl[ci].nodes[i]] = cc.super_of[i] >= 0 ? cc.super_of[i] : next++;
    const int cn = next;
    Graph g1(cn), g2(cn), g3(cc.num_super);
    auto ends = [&](EdgeId e) { return std::pair{L.cnode.at(g.edge(e).u), L.cnode.at(g.edge(e).v)}; };
    for (EdgeId e : cc.m_small) {
      auto [a, b] = ends(e);
      L.s[1].bind(e, g1.add_edge(a, b, h->g.weight(e)));
      L.s[2].bind(e, g2.add_edge(a, b, h->g.weight(e)));
    }
    for (int i = 1; i <= 3; ++i)
      for (EdgeId e : cc.part[i]) {
        part[e] = static_cast<int8_t>(i);
        auto [a, b] = ends(e);
        if (i == 1) L.s[1].bind(e, g1.add_edge(a, b, h->g.weight(e)));
        if (i == 2) L.s[2].bind(e, g2.add_edge(a, b, h->g.weight(e)));
        if (i == 3 && a != b) L.s[3].bind(e, g3.add_edge(a, b, h->g.weight(e)));
      }
    FewNonTreeConfig fc;
    fc.k = std::max<int64_t>(1, static_cast<int64_t>(cc.part[1].size()) + 1);
    fc.B = 1;
    fc.p = cfg.p;
    fc.inner = few_inner_factory(cfg);
    L.a1 = std::make_unique<FewNonTreeMsf>(std::move(g1), std::move(fc));
    std::vector<NodeId> s(static_cast<size_t>(cc.num_super));
    std::iota(s.begin(), s.end(), 0);
    L.a2 = std::make_unique<SCoveredMsf>(std::move(g2), std::move(s), 3);
    L.a3 = std::make_unique<MultigraphMsf>(std::move(g3));
    large_of[ci] = static_cast<int>(large.size());
    large.push_back(std::move(L));
  }

  // Sketch graph.
  in_h.assign(cap, 0);
  junk.assign(cap, 0);
  h_main.assign(cap, kNoEdge);
  h_orig.assign(cap, kNoEdge);
  Graph hg(n);
  int64_t reweighted = 0;
  auto add_main = [&](EdgeId e) {
    if (in_h[e]) return;
    in_h[e] = 1;
    h_main[e] = hg.add_edge(g.edge(e).u, g.edge(e).v, h->g.weight(e));
    h_to_core.push_back(e);
  };
  for (EdgeId e : h->reweighted) {
    h_orig[e] = hg.add_edge(g.edge(e).u, g.edge(e).v, g.weight(e));
    h_to_core.push_back(e);
    ++reweighted;
  }
  for (EdgeId e = 0; e < static_cast<EdgeId>(cap); ++e)
    if (m_small[e]) add_main(e);
  for (const Large& L : large) {
    for (EdgeId x : L.a1->forest()) add_main(L.s[1].from[static_cast<size_t>(x)]);
    for (EdgeId x : L.a2->forest()) add_main(L.s[2].from[static_cast<size_t>(x)]);
    for (EdgeId x : L.a3->forest()) add_main(L.s[3].from[static_cast<size_t>(x)]);
  }
  b_h = std::min<int64_t>(params.B, std::max<int64_t>(1, m + reweighted));
  k_h = std::max<int64_t>(1, m + reweighted);
  FewNonTreeConfig hc;
  hc.k = k_h;
  hc.B = b_h;
  hc.p = cfg.p;
  hc.inner = few_inner_factory(cfg);
  ah = std::make_unique<FewNonTreeMsf>(std::move(hg), std::move(hc));
  for (EdgeId x : ah->forest()) ++copies[h_to_core[static_cast<size_t>(x)]];
  build_work += static_cast<int64_t>(cap) + n;
}

void DynamicMsfEngine::Core::record_h(const MsfDelta& d, std::unordered_map<EdgeId, int>& before) {
  for (EdgeId x : d.removed) {
    EdgeId c = h_to_core[static_cast<size_t>(x)];
    before.emplace(c, copies[c]);
    --copies[c];
  }
  for (EdgeId x : d.added) {
    EdgeId c = h_to_core[static_cast<size_t>(x)];
    before.emplace(c, copies[c]);
    ++copies[c];
  }
}

MsfDelta DynamicMsfEngine::Core::erase(EdgeId e) {
  ++deletions;
  pending.clear();
  last.last_h_deletions = last.last_h_insertions = 0;
  const auto& cl = h->clusters;
  const int own = h->owner[e];
  const bool was_small_tree = m_small[e] != 0;

  // Small-cluster engine.
  std::vector<EdgeId> small_added;
  if (cl[static_cast<size_t>(own)].leaf) {
    Small& s = small[static_cast<size_t>(small_of[static_cast<size_t>(own)])];
    MsfDelta d = metered(*s.a, [&] { return s.a->erase(s.local.at(e)); });
    for (EdgeId x : d.added) {
      EdgeId f = s.global[static_cast<size_t>(x)];
      m_small[f] = 1;
      small_added.push_back(f);
      want_in_h(f);
    }
    m_small[e] = 0;
  }

  // Pruners, deepest first.
  std::vector<std::pair<int, std::vector<NodeId>>> grown;
  bool pruner_failed = false;
  for (int c = own; c > 0; c = cl[static_cast<size_t>(c)].parent) {
    if (cl[static_cast<size_t>(c)].leaf) continue;
    Prune& p = pruners[static_cast<size_t>(pruner_of[static_cast<size_t>(c)])];
    PruneStep st;
    try {
      st = p.p->erase(p.local.at(e));
    } catch (const std::overflow_error&) {
      // Parameters too large for exact arithmetic; the core is rebuilt anyway.
      throw CoreFailure{CoreFailure::kPruner};
    }
    if (cfg.work_budget && st.work > *cfg.work_budget) throw CoreFailure{CoreFailure::kOverrun};
    if (st.failed) pruner_failed = true;
    if (!st.added.empty()) {
      std::vector<NodeId> xs;
      for (NodeId x : st.added) xs.push_back(p.nodes[static_cast<size_t>(x)]);
      grown.emplace_back(cl[static_cast<size_t>(c)].parent, std::move(xs));
    }
  }
  if (pruner_failed) throw CoreFailure{CoreFailure::kPruner};
  g.remove_edge(e);

  // Compressed clusters.
  if (!cl[static_cast<size_t>(own)].leaf && part[e] >= 1 && part[e] <= 3) {
    Large& L = large[static_cast<size_t>(large_of[static_cast<size_t>(own)])];
    const int i = part[e];
    auto it = L.s[i].to.find(e);
    if (it != L.s[i].to.end()) {
      EdgeId x = it->second;
      MsfDelta d;
      if (i == 1) d = metered(*L.a1, [&] { return L.a1->erase(x); });
      if (i == 2) d = metered(*L.a2, [&] { return L.a2->erase(x); });
      if (i == 3) d = metered(*L.a3, [&] { return L.a3->erase(x); });
      absorb(L.s[i], d, e, kNoEdge);
    }
  }
  const int parent = cl[static_cast<size_t>(own)].parent;
  if (cl[static_cast<size_t>(own)].leaf && parent >= 0 && (was_small_tree || !small_added.empty())) {
    Large& L = large[static_cast<size_t>(large_of[static_cast<size_t>(parent)])];
    if (was_small_tree) {
      absorb(L.s[1], metered(*L.a1, [&] { return L.a1->erase(L.s[1].to.at(e)); }), e, kNoEdge);
      absorb(L.s[2], metered(*L.a2, [&] { return L.a2->erase(L.s[2].to.at(e)); }), e, kNoEdge);
    }
    for (EdgeId f : small_added) {
      auto [a, b] = std::pair{L.cnode.at(g.edge(f).u), L.cnode.at(g.edge(f).v)};
      BatchEdge be{a, b, h->g.weight(f)};
      auto r1 = metered(*L.a1, [&] { return L.a1->insert_batch(std::span<const BatchEdge>(&be, 1)); });
      L.s[1].bind(f, r1.first.front());
      absorb(L.s[1], r1.second, e, kNoEdge);
      auto r2 = metered(*L.a2, [&] { return L.a2->insert(a, b, be.w); });
      L.s[2].bind(f, r2.first);
      absorb(L.s[2], r2.second, e, kNoEdge);
    }
  }
  for (auto& [c, xs] : grown) {
    Large& L = large[static_cast<size_t>(large_of[static_cast<size_t>(c)])];
    for (NodeId x : xs)
      for (const Arc& arc : g.adj(x)) {
        EdgeId f = arc.e;
        if (h->owner[f] != c || part[f] < 2 || part[f] > 3) continue;
        const int i = part[f];
        part[f] = 4;
        ++incident_count;
        auto it = L.s[i].to.find(f);
        if (it != L.s[i].to.end()) {
          EdgeId loc = it->second;
          MsfDelta d = i == 2 ? metered(*L.a2, [&] { return L.a2->erase(loc); })
                              : metered(*L.a3, [&] { return L.a3->erase(loc); });
          L.s[i].to.erase(it);
          absorb(L.s[i], d, e, f);
        }
        want_in_h(f);
      }
  }
  if (cfg.inject_failure && cfg.inject_failure(deletions)) throw CoreFailure{CoreFailure::kInjected};

  // Sketch graph: the deleted edge's copies, then one batch.
  std::unordered_map<EdgeId, int> before;
  before.emplace(e, copies[e]);
  for (EdgeId x : {in_h[e] ? h_main[e] : kNoEdge, h_orig[e]}) {
    if (x == kNoEdge) continue;
    record_h(metered(*ah, [&] { return ah->erase(x); }), before);
    ++last.last_h_deletions;
  }
  in_h[e] = 0;
  if (junk[e]) {
    junk[e] = 0;
    --junk_count;
  }
  if (part[e] == 4) --incident_count;
  part[e] = 0;
  std::erase(pending, e);
  for (size_t at = 0; at < pending.size(); at += static_cast<size_t>(b_h)) {
    std::vector<BatchEdge> batch;
    for (size_t j = at; j < pending.size() && j < at + static_cast<size_t>(b_h); ++j) {
      EdgeId f = pending[j];
      batch.push_back(BatchEdge{g.edge(f).u, g.edge(f).v, h->g.weight(f)});
    }
    auto r = metered(*ah, [&] { return ah->insert_batch(batch); });
    for (size_t j = 0; j < r.first.size(); ++j) {
      EdgeId f = pending[at + j];
      h_main[f] = r.first[j];
      if (h_to_core.size() <= static_cast<size_t>(r.first[j])) h_to_core.resize(static_cast<size_t>(r.first[j]) + 1);
      h_to_core[static_cast<size_t>(r.first[j])] = f;
    }
    record_h(r.second, before);
  }
  last.last_h_insertions = static_cast<int64_t>(pending.size());

  MsfDelta out;
  for (auto [c, was] : before) {
    if (was > 0 && copies[c] == 0) out.removed.push_back(c);
    if (was == 0 && copies[c] > 0) out.added.push_back(c);
  }
  std::sort(out.added.begin(), out.added.end());
  std::sort(out.removed.begin(), out.removed.end());
  return out;
}

// ---------------------------------------------------------------------------

DynamicMsfEngine::DynamicMsfEngine(Graph g, EngineConfig cfg) : g_(std::move(g)), cfg_(std::move(cfg)) {
  if (!cfg_.decomposer) cfg_.decomposer = std::make_shared<RecursiveCutDecomposer>();
  if (!cfg_.depth_probe) cfg_.depth_probe = std::make_shared<int>(0);
  *cfg_.depth_probe = std::max(*cfg_.depth_probe, cfg_.depth);
  build();
  forest_.assign(static_cast<size_t>(g_.edge_capacity()), 0);
  for (EdgeId e : forest()) forest_[e] = 1;
}

DynamicMsfEngine::~DynamicMsfEngine() = default;

void DynamicMsfEngine::build() {
  // Base graph: alive non-loop edges plus virtual edges joining the components.
  const int n = g_.num_nodes();
  Graph base(n);
  std::vector<EdgeId> base_to_caller;
  UnionFind uf(n);
  for (EdgeId e : g_.alive_edges()) {
    const Edge& ed = g_.edge(e);
    if (ed.w.rank >= kVirtualRank || ed.w.rank <= kGadgetRankBase / 2)
      throw std::invalid_argument("DynamicMsfEngine: rank outside the supported range");
    base.add_edge(ed.u, ed.v, ed.w);
    base_to_caller.push_back(e);
    uf.unite(ed.u, ed.v);
  }
  NodeId prev = kNoNode;
  int64_t virt = 0;
  for (NodeId v = 0; v < n; ++v) {
    if (uf.find(v) != v) continue;
    if (prev != kNoNode) {
      base.add_edge(prev, v, Weight{kVirtualRank + virt, 0, virt});
      ++virt;
      base_to_caller.push_back(kNoEdge);
    }
    prev = v;
  }
  const Graph* src = &base;
  std::vector<EdgeId> reduced_to_base;
  DegreeReduced dr;
  if (base.max_degree() > 3) {
    dr = degree_reduce(base);
    src = &dr.g;
    reduced_to_base = dr.to_original;
  }
  std::vector<EdgeId> edges = src->alive_edges();
  std::sort(edges.begin(), edges.end(), [&](EdgeId a, EdgeId b) { return src->weight(a) < src->weight(b); });

  core_ = std::make_unique<Core>(cfg_, cfg_.decomposer);
  Core& c = *core_;
  c.g = Graph(src->num_nodes());
  for (size_t i = 0; i < edges.size(); ++i) {
    const Edge& ed = src->edge(edges[i]);
    EdgeId id = static_cast<EdgeId>(i);
    c.g.add_edge(ed.u, ed.v, Weight{static_cast<int64_t>(i) + 1, 0, id});
    EdgeId b = reduced_to_base.empty() ? edges[i] : reduced_to_base[static_cast<size_t>(edges[i])];
    c.to_caller.push_back(b == kNoEdge ? kNoEdge : base_to_caller[static_cast<size_t>(b)]);
  }
  from_caller_.assign(static_cast<size_t>(g_.edge_capacity()), kNoEdge);
  for (size_t i = 0; i < c.to_caller.size(); ++i)
    if (c.to_caller[i] != kNoEdge) from_caller_[static_cast<size_t>(c.to_caller[i])] = static_cast<EdgeId>(i);
  c.build();
  work_ += c.sub_work();
}

bool DynamicMsfEngine::in_forest(EdgeId e) const {
  return e >= 0 && static_cast<size_t>(e) < forest_.size() && forest_[e];
}

std::vector<EdgeId> DynamicMsfEngine::forest() const {
  std::vector<EdgeId> out;
  for (EdgeId c : core_->forest()) {
    EdgeId x = core_->to_caller[static_cast<size_t>(c)];
    if (x != kNoEdge) out.push_back(x);
  }
  std::sort(out.begin(), out.end());
  return out;
}

MsfDelta DynamicMsfEngine::to_caller(const MsfDelta& d) const {
  MsfDelta out;
  for (EdgeId c : d.added)
    if (EdgeId x = core_->to_caller[static_cast<size_t>(c)]; x != kNoEdge) out.added.push_back(x);
  for (EdgeId c : d.removed)
    if (EdgeId x = core_->to_caller[static_cast<size_t>(c)]; x != kNoEdge) out.removed.push_back(x);
  return out;
}

MsfDelta DynamicMsfEngine::reconcile(const std::vector<char>& before) {
  MsfDelta out;
  std::vector<char> now(before.size(), 0);
  for (EdgeId e : forest()) now[e] = 1;
  for (EdgeId e = 0; e < static_cast<EdgeId>(before.size()); ++e) {
    if (before[e] && !now[e]) out.removed.push_back(e);
    if (!before[e] && now[e]) out.added.push_back(e);
  }
  forest_ = std::move(now);
  return out;
}

MsfDelta DynamicMsfEngine::restart() {
  ++totals_.restarts;
  build();
  return reconcile(forest_);
}

MsfDelta DynamicMsfEngine::erase(EdgeId e) {
  if (!g_.alive(e)) throw std::invalid_argument("DynamicMsfEngine::erase: dead edge");
  const int64_t w0 = work_;
  ++totals_.deletions;
  const EdgeId ce = from_caller_[static_cast<size_t>(e)];
  MsfDelta out;
  if (ce == kNoEdge) {
    g_.remove_edge(e);
  } else if (core_->deletions >= core_->params.T) {
    if (!cfg_.auto_restart) throw BudgetExhausted("DynamicMsfEngine: deletion budget exhausted");
    g_.remove_edge(e);
    ++totals_.budget_restarts;
    out = restart();
  } else {
    const int64_t cw = core_->sub_work();
    try {
      MsfDelta d = core_->erase(ce);
      g_.remove_edge(e);
      out = to_caller(d);
      for (EdgeId x : out.removed) forest_[x] = 0;
      for (EdgeId x : out.added) forest_[x] = 1;
      work_ += core_->sub_work() - cw;
      const auto& l = core_->last;
      totals_.last_h_deletions = l.last_h_deletions;
      totals_.last_h_insertions = l.last_h_insertions;
      totals_.max_h_deletions = std::max(totals_.max_h_deletions, l.last_h_deletions);
      totals_.max_h_insertions = std::max(totals_.max_h_insertions, l.last_h_insertions);
      if (l.last_h_deletions > 2 || l.last_h_insertions > core_->params.B) ++totals_.churn_violations;
    } catch (const CoreFailure& f) {
      ++totals_.failures;
      if (f.kind == CoreFailure::kPruner) ++totals_.pruner_failures;
      if (f.kind == CoreFailure::kOverrun) ++totals_.overrun_failures;
      if (f.kind == CoreFailure::kInjected) ++totals_.injected_failures;
      work_ += core_->sub_work() - cw;
      if (!cfg_.auto_restart) throw EngineFailure("DynamicMsfEngine: failure during update");
      g_.remove_edge(e);
      out = restart();
    }
  }
  if (e < static_cast<EdgeId>(forest_.size())) forest_[e] = 0;
  totals_.last_work = work_ - w0;
  // Sparsity is monitored after every update, including rebuilds.
  EngineStats s = stats();
  totals_.h_nontree_max = std::max(totals_.h_nontree_max, s.h_nontree);
  if (s.h_nontree > s.sparsity_bound || s.h_nontree > s.sparsity_terms) ++totals_.sparsity_violations;
  if (cfg_.self_check) {
    std::vector<EdgeId> want = kruskal(g_), got = forest();
    if (want != got) throw std::logic_error("DynamicMsfEngine: forest differs from Kruskal");
  }
  return out;
}

const EngineParams& DynamicMsfEngine::params() const { return core_->params; }

const Hierarchy* DynamicMsfEngine::hierarchy() const { return core_->h ? &*core_->h : nullptr; }

int64_t DynamicMsfEngine::deletions_left() const { return std::max<int64_t>(0, core_->params.T - core_->deletions); }

EngineStats DynamicMsfEngine::stats() const {
  EngineStats s = totals_;
  const Core& c = *core_;
  s.work = work_;
  s.depth = *cfg_.depth_probe;
  if (!c.h) return s;
  s.h_edges = c.ah->graph().num_edges();
  s.h_nontree = static_cast<int64_t>(c.ah->num_nontree());
  s.junk = c.junk_count;
  s.incident = c.incident_count;
  s.reweighted = static_cast<int64_t>(c.h->reweighted.size());
  s.small_clusters = static_cast<int64_t>(c.small.size());
  s.large_clusters = static_cast<int64_t>(c.large.size());
  const double n = c.g.num_nodes();
  s.sparsity_bound = kSketchConstant * n / c.params.gamma + 3.0 * static_cast<double>(c.params.T);
  s.sparsity_terms = static_cast<double>(s.reweighted) +
                     3.0 * (3.0 * n / static_cast<double>(c.params.s_low) + static_cast<double>(c.params.T)) +
                     static_cast<double>(s.incident + s.junk);
  return s;
}

std::string DynamicMsfEngine::stats_json() const {
  EngineStats s = stats();
  const EngineParams& p = params();
  nlohmann::json j;
  j["deletions"] = s.deletions;
  j["restarts"] = s.restarts;
  j["failures"] = {{"total", s.failures},
                   {"pruner", s.pruner_failures},
                   {"overrun", s.overrun_failures},
                   {"injected", s.injected_failures}};
  j["budget_restarts"] = s.budget_restarts;
  j["recursion_depth"] = s.depth;
  j["sketch"] = {{"edges", s.h_edges},     {"nontree", s.h_nontree},          {"nontree_max", s.h_nontree_max},
                 {"junk", s.junk},          {"incident", s.incident},          {"reweighted", s.reweighted},
                 {"bound", s.sparsity_bound}, {"bound_terms", s.sparsity_terms}, {"violations", s.sparsity_violations}};
  j["churn"] = {{"last_deletions", s.last_h_deletions},
                {"last_insertions", s.last_h_insertions},
                {"max_deletions", s.max_h_deletions},
                {"max_insertions", s.max_h_insertions},
                {"violations", s.churn_violations}};
  j["clusters"] = {{"small", s.small_clusters}, {"large", s.large_clusters}};
  j["params"] = {{"gamma", p.gamma}, {"d", p.d},     {"s_low", p.s_low}, {"s_high", p.s_high},
                 {"pi", p.pi},       {"B", p.B},     {"T", p.T},         {"p", p.p},
                 {"alpha", std::to_string(p.alpha.numerator()) + "/" + std::to_string(p.alpha.denominator())}};
  j["budgets"] = {{"deletions_left", deletions_left()}};
  j["work"] = {{"total", s.work}, {"last", s.last_work}};
  return j.dump();
}

}  // namespace dmsf
