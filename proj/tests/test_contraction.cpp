#include "doctest.h"

#include "dmsf/contraction.hpp"
#include "generators.hpp"

#include <map>
#include <random>
#include <set>

using namespace dmsf;

namespace {

Graph weighted_path(std::initializer_list<int64_t> ranks) {
  Graph g(static_cast<int>(ranks.size()) + 1);
  NodeId x = 0;
  for (int64_t r : ranks) {
    g.add_edge(x, x + 1, r);
    ++x;
  }
  return g;
}

using PathSet = std::set<std::vector<EdgeId>>;

PathSet canonical(const std::vector<ConnectingPath>& ps) {
  PathSet out;
  for (const auto& p : ps) {
    auto e = p.edges;
    std::sort(e.begin(), e.end());
    out.insert(e);
  }
  return out;
}

// The four defining conditions, checked per tree of the forest.
std::string check_paths(const Graph& g, std::span<const EdgeId> forest, std::span<const NodeId> terms,
                        const std::vector<ConnectingPath>& ps) {
  std::set<EdgeId> seen;
  std::map<NodeId, int> ends;
  UnionFind uf(g.num_nodes());
  for (const auto& p : ps) {
    if (p.edges.empty()) return "empty path";
    NodeId x = p.u;
    for (EdgeId e : p.edges) {
      if (!seen.insert(e).second) return "paths share an edge";
      x = g.other(e, x);
      uf.unite(g.edge(e).u, g.edge(e).v);
    }
    if (x != p.v) return "path does not end at v";
    ++ends[p.u];
    ++ends[p.v];
  }
  std::set<NodeId> ts(terms.begin(), terms.end());
  UnionFind trees(g.num_nodes());
  for (EdgeId e : forest) trees.unite(g.edge(e).u, g.edge(e).v);
  std::map<int, std::vector<NodeId>> per_tree;
  for (NodeId t : ts) per_tree[trees.find(t)].push_back(t);
  for (auto& [root, list] : per_tree) {
    if (list.size() < 2) continue;
    for (NodeId t : list) {
      if (!ends.count(t)) return "terminal is not an endpoint";
      if (uf.find(t) != uf.find(list[0])) return "union is not connected";
    }
  }
  for (auto [v, c] : ends)
    if (!ts.count(v) && c < 3) return "non-terminal endpoint of fewer than three paths";
  return "";
}

// Super-edge structure of an instance as sets of covered original edges.
// Forest edges hanging off non-terminal leaves are trimmed, then non-terminal
// nodes of forest degree two are spliced out.
std::multiset<std::pair<bool, std::vector<EdgeId>>> smoothed(const ContractedMsf& d, const std::set<NodeId>& terms) {
  const Graph& gc = d.inner().graph();
  std::vector<EdgeId> live = gc.alive_edges();
  auto forest = d.inner().forest();
  std::set<EdgeId> in_f(forest.begin(), forest.end());
  auto is_term = [&](NodeId x) { return terms.count(d.pair().to_original[static_cast<size_t>(x)]) != 0; };
  std::map<NodeId, std::set<EdgeId>> inc;
  for (EdgeId x : in_f) {
    inc[gc.edge(x).u].insert(x);
    inc[gc.edge(x).v].insert(x);
  }
  std::vector<NodeId> leaves;
  for (auto& [v, es] : inc)
    if (!is_term(v) && es.size() == 1) leaves.push_back(v);
  while (!leaves.empty()) {
    NodeId v = leaves.back();
    leaves.pop_back();
    if (inc[v].size() != 1) continue;
    EdgeId x = *inc[v].begin();
    in_f.erase(x);
    NodeId w = gc.other(x, v);
    inc[v].clear();
    inc[w].erase(x);
    if (!is_term(w) && inc[w].size() == 1) leaves.push_back(w);
  }
  UnionFind uf(gc.edge_capacity());
  for (auto& [v, es] : inc)
    if (!is_term(v) && es.size() == 2) uf.unite(*es.begin(), *es.rbegin());
  std::map<int, std::vector<EdgeId>> group;
  std::multiset<std::pair<bool, std::vector<EdgeId>>> out;
  for (EdgeId x : live) {
    auto c = d.covered_by(x);
    if (!d.inner().in_forest(x)) {
      out.insert({false, c});
      continue;
    }
    if (!in_f.count(x)) continue;
    auto& gr = group[uf.find(x)];
    gr.insert(gr.end(), c.begin(), c.end());
  }
  for (auto& [k, es] : group) {
    std::sort(es.begin(), es.end());
    out.insert({true, es});
  }
  return out;
}

std::multiset<std::pair<bool, std::vector<EdgeId>>> scratch(const Graph& g, std::span<const EdgeId> forest,
                                                             const std::set<NodeId>& terms) {
  std::vector<NodeId> t(terms.begin(), terms.end());
  ContractedPair cp = contract(g, forest, t);
  std::multiset<std::pair<bool, std::vector<EdgeId>>> out;
  for (EdgeId x : cp.g.alive_edges()) {
    if (cp.path_of[x] < 0) {
      out.insert({false, {cp.original_nontree[x]}});
    } else {
      auto es = cp.paths[cp.path_of[x]].edges;
      std::sort(es.begin(), es.end());
      out.insert({true, es});
    }
  }
  return out;
}

std::vector<EdgeId> nontree_of(const Graph& g) {
  auto f = kruskal(g);
  std::set<EdgeId> fs(f.begin(), f.end());
  std::vector<EdgeId> n;
  for (EdgeId e : g.alive_edges())
    if (!fs.count(e)) n.push_back(e);
  return n;
}

FewNonTreeConfig few_cfg(int64_t k, int64_t b) {
  FewNonTreeConfig c;
  c.k = k;
  c.B = b;
  return c;
}

}  // namespace

TEST_CASE("connecting paths examples") {
  Graph p = weighted_path({1, 2, 3});
  std::vector<EdgeId> all{0, 1, 2};
  std::vector<NodeId> ad{0, 3};
  auto ps = connecting_paths(p, all, ad);
  REQUIRE(ps.size() == 1);
  CHECK(ps[0].edges.size() == 3);
  CHECK(((ps[0].u == 0 && ps[0].v == 3) || (ps[0].u == 3 && ps[0].v == 0)));

  // Star with centre 0 and leaves 1..3.
  Graph star(4);
  for (NodeId v = 1; v < 4; ++v) star.add_edge(0, v, v);
  std::vector<EdgeId> se{0, 1, 2};
  std::vector<NodeId> two{1, 2};
  auto sp = connecting_paths(star, se, two);
  REQUIRE(sp.size() == 1);
  CHECK(sp[0].edges.size() == 2);
  std::vector<NodeId> three{1, 2, 3};
  auto spider = connecting_paths(star, se, three);
  CHECK(spider.size() == 3);
  for (const auto& q : spider) CHECK((q.u == 0 || q.v == 0));
  CHECK(check_paths(star, se, three, spider) == "");

  std::vector<NodeId> lone{2};
  CHECK(connecting_paths(star, se, lone).empty());
}

TEST_CASE("connecting paths are unique and satisfy the four conditions") {
  std::mt19937_64 rng(3);
  for (int it = 0; it < 200; ++it) {
    int n = 5 + static_cast<int>(rng() % 60);
    Graph g = gen::random_connected(n, static_cast<int>(rng() % 6), rng());
    auto f = kruskal(g);
    // Drop a few forest edges to get several trees.
    std::shuffle(f.begin(), f.end(), rng);
    f.resize(f.size() - std::min<size_t>(f.size(), rng() % 3));
    std::vector<NodeId> t;
    for (NodeId v = 0; v < n; ++v)
      if (rng() % 4 == 0) t.push_back(v);
    auto ps = connecting_paths(g, f, t);
    REQUIRE(check_paths(g, f, t, ps) == "");
    std::shuffle(t.begin(), t.end(), rng);
    std::reverse(f.begin(), f.end());
    CHECK(canonical(connecting_paths(g, f, t)) == canonical(ps));
  }
}

TEST_CASE("contract examples") {
  Graph g = weighted_path({1, 2, 3});
  EdgeId chord = g.add_edge(0, 3, 10);
  std::vector<EdgeId> f{0, 1, 2};
  std::vector<NodeId> s{0, 3};
  ContractedPair cp = contract(g, f, s);
  CHECK(cp.g.num_edges() == 2);
  CHECK(cp.g.num_edges() <= 1 + 2 * 2);
  REQUIRE(cp.forest.size() == 1);
  CHECK(cp.g.weight(cp.forest[0]).rank == 3);
  CHECK(cp.image.count(chord));

  Graph bare = weighted_path({5, 6});
  std::vector<EdgeId> bf{0, 1};
  CHECK(contract(bare, bf, std::vector<NodeId>{}).g.num_edges() == 0);

  std::vector<NodeId> missing{0};
  CHECK_THROWS_AS(contract(g, f, missing), std::invalid_argument);
  std::vector<EdgeId> cyc{0, 1, 2, chord};
  CHECK_THROWS_AS(contract(g, cyc, s), std::invalid_argument);
}

TEST_CASE("contracted graphs are small and keep the MSF") {
  std::mt19937_64 rng(8);
  for (int it = 0; it < 500; ++it) {
    int n = 50;
    Graph g = gen::random_connected(n, 1 + static_cast<int>(rng() % 12), rng());
    auto f = kruskal(g);
    auto nt = nontree_of(g);
    std::set<NodeId> ts;
    for (EdgeId e : nt) {
      ts.insert(g.edge(e).u);
      ts.insert(g.edge(e).v);
    }
    for (int x = 0; x < 3; ++x)
      if (rng() % 2) ts.insert(static_cast<NodeId>(rng() % n));
    std::vector<NodeId> t(ts.begin(), ts.end());
    ContractedPair cp = contract(g, f, t);
    REQUIRE(cp.g.num_edges() <= static_cast<int64_t>(nt.size() + 2 * t.size()));
    CHECK(cp.g.num_edges() == static_cast<int64_t>(nt.size() + cp.forest.size()));
    CHECK(kruskal(cp.g) == cp.forest);
    for (size_t i = 0; i < cp.paths.size(); ++i) {
      Weight mx = g.weight(cp.paths[i].edges[0]);
      for (EdgeId e : cp.paths[i].edges) mx = std::max(mx, g.weight(e));
      CHECK(cp.g.weight(static_cast<EdgeId>(i)) == mx);
    }
  }
}

TEST_CASE("two-phase contractor and cover queries") {
  Graph g = weighted_path({1, 2, 3});
  g.add_node();
  EdgeId branch = g.add_edge(2, 4, 7);
  EdgeId chord = g.add_edge(0, 3, 10);
  TwoPhaseContractor c(g.num_nodes());
  for (EdgeId e : {0, 1, 2, branch}) c.link(e, g.edge(e).u, g.edge(e).v, g.weight(e));
  CHECK_THROWS_AS(c.cover_query(1), std::logic_error);
  std::vector<EdgeId> nt{chord};
  const ContractedPair& cp = c.contract(g, nt);
  auto s = c.cover_query(1);
  REQUIRE(s);
  CHECK(cp.g.edge(*s).u == cp.node_image.at(0));
  CHECK(cp.g.edge(*s).v == cp.node_image.at(3));
  CHECK(!c.cover_query(branch));
  CHECK_THROWS_AS(c.link(99, 0, 4, Weight{1, 0, 99}), std::logic_error);
  c.release();
  CHECK(!c.in_second_phase());
  c.cut(branch);
  CHECK(c.forest_size() == 3);

  std::mt19937_64 rng(13);
  for (int it = 0; it < 20; ++it) {
    Graph h = gen::random_connected(60, 8, rng());
    auto f = kruskal(h);
    auto n = nontree_of(h);
    TwoPhaseContractor tc(h.num_nodes());
    for (EdgeId e : f) tc.link(e, h.edge(e).u, h.edge(e).v, h.weight(e));
    tc.contract(h, n);
    std::vector<NodeId> t;
    for (EdgeId e : n) {
      t.push_back(h.edge(e).u);
      t.push_back(h.edge(e).v);
    }
    auto paths = connecting_paths(h, f, t);
    std::map<EdgeId, std::vector<EdgeId>> path_of;
    for (const auto& p : paths)
      for (EdgeId e : p.edges) path_of[e] = p.edges;
    for (int q = 0; q < 5; ++q) {
      EdgeId e = f[rng() % f.size()];
      auto sup = tc.cover_query(e);
      CHECK(static_cast<bool>(sup) == path_of.count(e));
      if (sup) {
        auto got = tc.pair().paths[tc.pair().path_of[*sup]].edges;
        CHECK(got == path_of[e]);
      }
    }
  }
}

TEST_CASE("contracted changes follow the three deletion cases") {
  std::mt19937_64 rng(21);
  int cases[5] = {};
  for (int s = 0; s < 4; ++s) {
    Graph g = gen::random_connected(40, 14, 100 + s, 3);
    auto f = kruskal(g);
    auto n = nontree_of(g);
    std::set<NodeId> terms;
    for (EdgeId e : n) {
      terms.insert(g.edge(e).u);
      terms.insert(g.edge(e).v);
    }
    TwoPhaseContractor c(g.num_nodes());
    for (EdgeId e : f) c.link(e, g.edge(e).u, g.edge(e).v, g.weight(e));
    ContractedMsf d(g, n, &c, multigraph_factory());
    std::set<EdgeId> forest(f.begin(), f.end());
    for (int step = 0; step < 50 && g.num_edges() > 0; ++step) {
      auto alive = g.alive_edges();
      EdgeId e = alive[rng() % alive.size()];
      bool was_tree = forest.count(e) != 0;
      g.remove_edge(e);
      auto expect = kruskal(g);
      MsfDelta delta = d.erase(e);
      ChangeCase cc = d.last_case();
      ++cases[static_cast<int>(cc)];
      if (!was_tree) {
        CHECK(cc == ChangeCase::kNonTree);
      } else {
        CHECK(cc != ChangeCase::kNonTree);
        CHECK(cc != ChangeCase::kAbsent);
      }
      if (cc == ChangeCase::kCoveredSwap) CHECK(expect.size() == forest.size());
      if (cc == ChangeCase::kCoveredCut || cc == ChangeCase::kUncovered) CHECK(expect.size() + 1 == forest.size());
      for (EdgeId x : delta.removed) forest.erase(x);
      for (EdgeId x : delta.added) forest.insert(x);
      REQUIRE(std::vector<EdgeId>(forest.begin(), forest.end()) == expect);
      for (EdgeId x : expect) CHECK(d.in_forest(x));
      std::vector<EdgeId> fv(forest.begin(), forest.end());
      REQUIRE(smoothed(d, terms) == scratch(g, fv, terms));
    }
  }
  MESSAGE("non-tree ", cases[1], " uncovered ", cases[2], " cut ", cases[3], " swap ", cases[4]);
  CHECK(cases[1] > 0);
  CHECK(cases[2] > 0);
  CHECK(cases[3] > 0);
  CHECK(cases[4] > 0);
}

TEST_CASE("few non-tree MSF examples") {
  Graph tree = gen::path(10);
  FewNonTreeMsf a(tree, few_cfg(4, 10));
  CHECK(a.forest().size() == 9);
  CHECK(a.num_nontree() == 0);
  CHECK(a.levels() == 2);
  CHECK(a.p_prime() == doctest::Approx(0.01 / 16));

  // B parallel copies of edge 0-1, all heavier than everything.
  std::vector<BatchEdge> batch;
  for (int i = 0; i < 4; ++i) batch.push_back({0, 1, Weight{1000 + i, 0, 1000 + i}});
  auto before = a.forest();
  auto [ids, delta] = a.insert_batch(batch);
  CHECK(delta.empty());
  CHECK(a.forest() == before);
  CHECK(a.num_nontree() == 4);
  bool found = false;
  for (auto s : a.slots())
    if (s.level == 0 && s.nontree == 4) found = true;
  CHECK(found);
  CHECK_THROWS_AS(a.insert_batch(batch), std::invalid_argument);

  CHECK_THROWS_AS(a.erase(999), std::invalid_argument);
  Graph dense = gen::complete(6);
  CHECK_THROWS_AS(FewNonTreeMsf(dense, few_cfg(5, 10)), std::invalid_argument);
}

TEST_CASE("few non-tree MSF on mixed streams matches Kruskal") {
  for (uint64_t seed = 0; seed < 3; ++seed) {
    std::mt19937_64 rng(seed);
    Graph g0 = gen::random_connected(128, 16, 500 + seed);
    FewNonTreeConfig cfg = few_cfg(32, 16);
    FewNonTreeMsf fx(g0, cfg);
    CHECK(!fx.batch_precondition());
    for (int step = 0; step < 500; ++step) {
      int64_t room = cfg.k - static_cast<int64_t>(fx.num_nontree());
      if (room > 0 && rng() % 2) {
        std::vector<BatchEdge> b;
        int64_t size = 1 + static_cast<int64_t>(rng() % static_cast<uint64_t>(std::min(room, cfg.B)));
        for (int64_t i = 0; i < size; ++i) {
          NodeId u = static_cast<NodeId>(rng() % 128), v = static_cast<NodeId>(rng() % 128);
          if (u == v) v = (v + 1) % 128;
          b.push_back({u, v, Weight{static_cast<int64_t>(rng() % 100000), 0, -1}});
        }
        fx.insert_batch(b);
      } else {
        auto alive = fx.graph().alive_edges();
        if (alive.empty()) continue;
        fx.erase(alive[rng() % alive.size()]);
      }
      REQUIRE(fx.forest() == kruskal(fx.graph()));
      auto u = fx.nontree_union();
      std::set<EdgeId> us(u.begin(), u.end());
      std::set<EdgeId> expect;
      for (EdgeId e : fx.graph().alive_edges())
        if (!fx.in_forest(e)) expect.insert(e);
      REQUIRE(us == expect);
      for (auto s : fx.slots())
        REQUIRE(static_cast<int64_t>(s.nontree) <= std::min<int64_t>(cfg.B << (s.level + 1), cfg.k));
    }
    CHECK(fx.pool_misses() == 0);
  }
}

namespace {

// Decremental MSF that refuses to run past a fixed number of deletions.
class BoundedStub : public DecrementalMsf {
 public:
  BoundedStub(Graph g, int64_t limit) : inner_(std::move(g)), limit_(limit) {}
  const Graph& graph() const override { return inner_.graph(); }
  bool in_forest(EdgeId e) const override { return inner_.in_forest(e); }
  std::vector<EdgeId> forest() const override { return inner_.forest(); }
  MsfDelta erase(EdgeId e) override {
    if (++count_ > limit_) throw std::logic_error("stub: deletion budget exceeded");
    return inner_.erase(e);
  }
  int64_t work() const override { return inner_.work(); }

 private:
  MultigraphMsf inner_;
  int64_t limit_, count_ = 0;
};

}  // namespace

TEST_CASE("restricted decremental wrapper survives past the bound") {
  const int64_t T = 8;
  DecrementalFactory stub = [T](Graph g) -> std::unique_ptr<DecrementalMsf> {
    return std::make_unique<BoundedStub>(std::move(g), T);
  };
  Graph g = gen::random_connected(40, 40, 77);
  auto wrapped = restricted_from_decremental(stub, T)(g);
  CHECK(wrapped->forest() == kruskal(g));

  auto direct = stub(g);
  std::mt19937_64 rng(5);
  int64_t max_inner = 0;
  for (int i = 0; i < 5 * T; ++i) {
    auto alive = g.alive_edges();
    EdgeId e = alive[rng() % alive.size()];
    g.remove_edge(e);
    if (i < T) {
      int64_t b = direct->work();
      direct->erase(e);
      max_inner = std::max(max_inner, direct->work() - b);
    }
    wrapped->erase(e);
    REQUIRE(wrapped->forest() == kruskal(g));
  }
  auto& pd = dynamic_cast<PhasedDecremental&>(*wrapped);
  CHECK(pd.rebuilds() >= 9);
  CHECK(pd.last_work() <= (g.num_edges() + 80 + pd.half_phase()) / pd.half_phase() + 3 * (max_inner + 64));
  CHECK_THROWS_AS(PhasedDecremental(g, stub, 1), std::invalid_argument);
}
