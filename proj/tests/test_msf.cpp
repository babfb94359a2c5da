#include "doctest.h"

#include "dmsf/msf.hpp"
#include "generators.hpp"

#include <functional>
#include <random>

using namespace dmsf;

namespace {

std::vector<EdgeId> sorted(std::vector<EdgeId> v) {
  std::sort(v.begin(), v.end());
  return v;
}

// Naive DFS path maximum.
std::optional<EdgeId> naive_path_max(const Graph& forest, NodeId u, NodeId v) {
  std::vector<EdgeId> via(static_cast<size_t>(forest.num_nodes()), kNoEdge);
  std::vector<char> seen(static_cast<size_t>(forest.num_nodes()), 0);
  std::vector<NodeId> stack{u};
  seen[u] = 1;
  while (!stack.empty()) {
    NodeId x = stack.back();
    stack.pop_back();
    for (const Arc& a : forest.adj(x)) {
      if (seen[a.to]) continue;
      seen[a.to] = 1;
      via[a.to] = a.e;
      stack.push_back(a.to);
    }
  }
  if (!seen[v]) return std::nullopt;
  std::optional<EdgeId> best;
  for (NodeId x = v; x != u;) {
    EdgeId e = via[x];
    if (!best || forest.weight(*best) < forest.weight(e)) best = e;
    x = forest.other(e, x);
  }
  return best;
}

}  // namespace

TEST_CASE("kruskal examples and sparsification") {
  Graph t(3);
  EdgeId a = t.add_edge(0, 1, 1);
  EdgeId b = t.add_edge(1, 2, 2);
  t.add_edge(0, 2, 3);
  CHECK(kruskal(t) == std::vector<EdgeId>{a, b});
  Graph p = gen::path(6);
  CHECK(kruskal(p) == p.alive_edges());

  std::mt19937_64 rng(1);
  for (int s = 0; s < 100; ++s) {
    Graph g = gen::erdos_renyi(20, 0.3, 50 + s);
    std::vector<EdgeId> e1, e2;
    for (EdgeId e : g.alive_edges()) (rng() & 1 ? e1 : e2).push_back(e);
    auto m1 = kruskal(g, e1), m2 = kruskal(g, e2);
    std::vector<EdgeId> uni = m1;
    uni.insert(uni.end(), m2.begin(), m2.end());
    std::sort(uni.begin(), uni.end());
    for (EdgeId e : kruskal(g)) CHECK(std::binary_search(uni.begin(), uni.end(), e));
  }
}

TEST_CASE("contracting two nodes keeps the MSF inside the original one") {
  std::mt19937_64 rng(2);
  for (int s = 0; s < 100; ++s) {
    Graph g = gen::erdos_renyi(14, 0.35, 900 + s);
    NodeId x = static_cast<NodeId>(rng() % 14), y = static_cast<NodeId>((x + 1 + rng() % 13) % 14);
    Graph c(14);
    std::vector<EdgeId> back;
    for (EdgeId e : g.alive_edges()) {
      NodeId u = g.edge(e).u == y ? x : g.edge(e).u;
      NodeId v = g.edge(e).v == y ? x : g.edge(e).v;
      if (u == v) continue;
      c.add_edge(u, v, g.weight(e));
      back.push_back(e);
    }
    auto full = kruskal(g);
    for (EdgeId e : kruskal(c)) CHECK(std::binary_search(full.begin(), full.end(), back[e]));
  }
}

TEST_CASE("path max on a forest") {
  DynamicForest df(4);
  df.link(0, 1, 10, Weight{1, 0, 10});
  df.link(1, 2, 11, Weight{2, 0, 11});
  df.link(2, 3, 12, Weight{3, 0, 12});
  CHECK(df.path_max(0, 3) == 12);
  CHECK(df.path_max(0, 2) == 11);
  CHECK_THROWS_AS(df.path_max(1, 1), std::invalid_argument);
  CHECK_THROWS_AS(df.path_max(0, 9), std::invalid_argument);
  df.cut(11);
  CHECK(!df.path_max(0, 3));
  CHECK(df.connected(2, 3));
  CHECK(!df.connected(1, 2));
  CHECK(df.path_edges(0, 1) == std::vector<EdgeId>{10});
  CHECK_THROWS_AS(df.link(0, 1, 13, Weight{}), std::logic_error);
}

TEST_CASE("path max against naive DFS on random trees with churn") {
  std::mt19937_64 rng(5);
  const int n = 200;
  Graph tree = gen::random_connected(n, 0, 77);
  DynamicForest df(n);
  for (EdgeId e : tree.alive_edges()) df.link(tree.edge(e).u, tree.edge(e).v, e, tree.weight(e));
  for (int q = 0; q < 1000; ++q) {
    NodeId u = static_cast<NodeId>(rng() % n), v = static_cast<NodeId>(rng() % n);
    if (u == v) continue;
    CHECK(df.path_max(u, v) == naive_path_max(tree, u, v));
    if (q % 10 == 0) {
      auto alive = tree.alive_edges();
      EdgeId e = alive[rng() % alive.size()];
      df.cut(e);
      tree.remove_edge(e);
      // Reconnect with a fresh edge between the two sides when possible.
      NodeId a = static_cast<NodeId>(rng() % n), b = static_cast<NodeId>(rng() % n);
      if (a != b && !naive_path_max(tree, a, b)) {
        EdgeId f = tree.add_edge(a, b, Weight{static_cast<int64_t>(1000 + q), 0, -1});
        df.link(a, b, f, tree.weight(f));
      }
    }
  }
}

TEST_CASE("multigraph MSF examples") {
  Graph g(2);
  EdgeId a = g.add_edge(0, 1, 1);
  EdgeId b = g.add_edge(0, 1, 2);
  MultigraphMsf m(g);
  auto d = m.erase(a);
  CHECK(d.removed == std::vector<EdgeId>{a});
  CHECK(d.added == std::vector<EdgeId>{b});
  auto d2 = m.erase(b);
  CHECK(d2.added.empty());
  CHECK(m.forest().empty());
  CHECK_THROWS_AS(m.erase(b), std::invalid_argument);
}

TEST_CASE("multigraph MSF replay on random updates") {
  for (int s = 0; s < 10; ++s) {
    std::mt19937_64 rng(s);
    Graph g(10);
    for (int k = 0; k < 25; ++k) {
      NodeId u = static_cast<NodeId>(rng() % 10), v = static_cast<NodeId>((u + 1 + rng() % 9) % 10);
      g.add_edge(u, v, static_cast<int64_t>(rng() % 1000));
    }
    Graph oracle = g;
    MultigraphMsf m(g);
    for (int step = 0; step < 100; ++step) {
      auto alive = oracle.alive_edges();
      if (rng() % 2 && !alive.empty()) {
        EdgeId e = alive[rng() % alive.size()];
        oracle.remove_edge(e);
        m.erase(e);
      } else {
        NodeId u = static_cast<NodeId>(rng() % 10), v = static_cast<NodeId>((u + 1 + rng() % 9) % 10);
        Weight w{static_cast<int64_t>(rng() % 1000), 0, -1};
        EdgeId e1 = oracle.add_edge(u, v, w);
        auto [e2, d] = m.insert(u, v, w);
        CHECK(e1 == e2);
      }
      REQUIRE(sorted(m.forest()) == kruskal(oracle));
    }
  }
}

TEST_CASE("S-covered decremental MSF") {
  SUBCASE("empty S on a forest") {
    Graph p = gen::path(5);
    SCoveredMsf m(p, {});
    auto d = m.erase(1);
    CHECK(d.removed == std::vector<EdgeId>{1});
    CHECK(d.added.empty());
  }
  SUBCASE("star of paths with hubs in S") {
    for (int s = 0; s < 10; ++s) {
      std::mt19937_64 rng(40 + s);
      // Hubs 0..3, then paths hanging off hub 0; extra edges join path nodes to hubs.
      Graph g(4);
      std::vector<NodeId> hubs{0, 1, 2, 3};
      int64_t r = 1;
      for (int h = 1; h < 4; ++h) g.add_edge(0, h, r++);
      for (int p = 0; p < 8; ++p) {
        NodeId prev = static_cast<NodeId>(rng() % 4);
        for (int k = 0; k < 6; ++k) {
          NodeId x = g.add_node();
          g.add_edge(prev, x, r++);
          prev = x;
        }
      }
      for (NodeId x = 4; x < g.num_nodes(); ++x)
        if (g.degree(x) < 3) g.add_edge(x, static_cast<NodeId>(rng() % 4), static_cast<int64_t>(1000 + rng() % 1000));
      gen::shuffle_weights(g, s);
      // Only hub-incident edges may end up non-tree; make path edges the lightest.
      for (EdgeId e : g.alive_edges()) {
        Weight w = g.weight(e);
        bool hub = g.edge(e).u < 4 || g.edge(e).v < 4;
        bool both = g.edge(e).u < 4 && g.edge(e).v < 4;
        if (both) w.rank -= 2000000;
        else if (!hub) w.rank -= 1000000;
        g.set_weight(e, w);
      }
      Graph oracle = g;
      SCoveredMsf m(g, hubs);
      for (int step = 0; step < 50; ++step) {
        auto alive = oracle.alive_edges();
        EdgeId e = alive[rng() % alive.size()];
        oracle.remove_edge(e);
        auto before = kruskal(oracle);
        auto d = m.erase(e);
        REQUIRE(sorted(m.forest()) == before);
        if (!d.added.empty()) {
          // The replacement is the lightest edge reconnecting the two sides.
          EdgeId f = d.added[0];
          Graph probe = oracle;
          UnionFind uf(probe.num_nodes());
          for (EdgeId t : m.forest())
            if (t != f) uf.unite(probe.edge(t).u, probe.edge(t).v);
          for (EdgeId c : probe.alive_edges()) {
            if (uf.find(probe.edge(c).u) != uf.find(probe.edge(c).v)) CHECK(!(probe.weight(c) < probe.weight(f)));
          }
        }
      }
    }
  }
  SUBCASE("invariant violation rejected") {
    Graph t(3);
    t.add_edge(0, 1, 1);
    t.add_edge(1, 2, 2);
    t.add_edge(0, 2, 3);
    CHECK_THROWS_AS(SCoveredMsf(t, {}), std::invalid_argument);
    CHECK_NOTHROW(SCoveredMsf(t, {0}));
  }
}
