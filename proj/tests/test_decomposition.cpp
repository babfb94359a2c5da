#include "doctest.h"

#include "dmsf/decomposition.hpp"
#include "dmsf/msf.hpp"
#include "generators.hpp"
#include "oracles.hpp"

#include <random>
#include <set>
#include <sstream>

using namespace dmsf;

namespace {

bool is_partition(const NodePartition& parts, int n) {
  std::vector<int> hit(static_cast<size_t>(n), 0);
  for (const auto& p : parts)
    for (NodeId x : p) {
      if (x < 0 || x >= n) return false;
      ++hit[x];
    }
  return std::all_of(hit.begin(), hit.end(), [](int c) { return c == 1; });
}

bool connected_in(const Graph& g, std::span<const EdgeId> edges, const std::vector<NodeId>& part) {
  std::set<NodeId> in(part.begin(), part.end());
  UnionFind uf(g.num_nodes());
  int joins = 0;
  for (EdgeId e : edges)
    if (in.count(g.edge(e).u) && in.count(g.edge(e).v) && uf.unite(g.edge(e).u, g.edge(e).v)) ++joins;
  return joins + 1 == static_cast<int>(part.size());
}

Graph regular_ranked(int n, uint64_t seed) { return gen::random_regular3(n, seed); }

std::vector<std::vector<EdgeId>> random_deletions(const Graph& g, int count, std::mt19937_64& rng) {
  std::vector<std::vector<EdgeId>> out;
  auto alive = g.alive_edges();
  for (int i = 0; i < count; ++i) {
    std::vector<EdgeId> d;
    int k = 1 + static_cast<int>(rng() % 40);
    for (int j = 0; j < k; ++j) d.push_back(alive[rng() % alive.size()]);
    out.push_back(std::move(d));
  }
  return out;
}

}  // namespace

TEST_CASE("grouping a tree") {
  Graph p10 = gen::path(10);
  auto whole = frederickson_group(p10, 10);
  REQUIRE(whole.size() == 1);
  CHECK(whole[0].size() == 10);

  auto threes = frederickson_group(p10, 3);
  CHECK(is_partition(threes, 10));
  auto all = p10.alive_edges();
  for (const auto& part : threes) {
    CHECK(part.size() >= 1);
    CHECK(part.size() <= 3);
    CHECK(connected_in(p10, all, part));
  }

  Graph star(5);
  for (NodeId v = 1; v < 5; ++v) star.add_edge(0, v, v);
  CHECK_THROWS_AS(frederickson_group(star, 2), std::invalid_argument);
}

TEST_CASE("grouping random degree-3 trees stays within [s/3, s]") {
  std::mt19937_64 rng(4);
  for (int it = 0; it < 300; ++it) {
    int n = 2 + static_cast<int>(rng() % 400);
    Graph g = gen::random_connected(n, 0, rng(), 3);
    int64_t s = 1 + static_cast<int64_t>(rng() % 40);
    auto tree = g.alive_edges();
    int64_t work = 0;
    auto parts = frederickson_group(g, tree, s, &work);
    REQUIRE(is_partition(parts, n));
    CHECK(work <= 4 * (n + static_cast<int64_t>(tree.size())));
    for (const auto& part : parts) {
      CHECK(connected_in(g, tree, part));
      CHECK(static_cast<int64_t>(part.size()) <= s);
      if (n >= s) CHECK(3 * static_cast<int64_t>(part.size()) >= s);
    }
  }
}

TEST_CASE("exact most balanced sparse cut") {
  Graph bar = gen::barbell(4, 1);
  auto c = most_balanced_sparse_cut(bar, Ratio(1, 2));
  REQUIRE(c);
  CHECK(c->side.size() == 4);
  CHECK(c->expansion == Ratio(1, 4));
  CHECK(!most_balanced_sparse_cut(gen::complete(6), Ratio(1)));
  // Disconnected: the component cut has expansion 0.
  Graph two(4);
  two.add_edge(0, 1, 1);
  two.add_edge(2, 3, 2);
  auto z = most_balanced_sparse_cut(two, Ratio(1, 100));
  REQUIRE(z);
  CHECK(z->expansion == Ratio(0));
  CHECK(z->side == std::vector<NodeId>{0, 1});
}

TEST_CASE("recursive cut decomposer meets its published crossing bound") {
  RecursiveCutDecomposer dec;
  std::mt19937_64 rng(2);
  for (int it = 0; it < 60; ++it) {
    int n = 4 + static_cast<int>(rng() % 60);
    Graph g = gen::random_connected(n, static_cast<int>(rng() % (2 * n)), rng());
    Ratio a(1 + static_cast<int64_t>(rng() % 4), 4);
    auto q = dec.decompose(g, a, 0.01, rng);
    REQUIRE(q.parts >= 1);
    for (int x : q.label) CHECK((x >= 0 && x < q.parts));
    CHECK(static_cast<double>(q.crossing) <= boost::rational_cast<double>(a) * dec.gamma(n) * n);
    if (n <= 16) {
      CHECK(q.certified);
      // Every part has no cut below the parameter.
      for (int p = 0; p < q.parts; ++p) {
        std::vector<NodeId> part;
        for (NodeId v = 0; v < n; ++v)
          if (q.label[v] == p) part.push_back(v);
        Subgraph s = induced_subgraph(g, part);
        CHECK(!most_balanced_sparse_cut(s.g, a));
      }
    }
  }
}

TEST_CASE("respecting decomposition") {
  RecursiveCutDecomposer dec;
  std::mt19937_64 rng(7);
  // Whole graph as a single group stays whole.
  Graph c6 = gen::cycle(6, 1);
  auto one = expansion_decompose_respecting(c6, {{0, 1, 2, 3, 4, 5}}, 6, Ratio(1, 2), 0.01, dec, rng);
  CHECK(one.parts.size() == 1);
  CHECK(one.crossing == 0);

  // Two expanders (K5s) joined by an edge, grouped by the joint MSF.
  Graph g = gen::barbell(5, 3);
  auto mst = kruskal(g);
  std::vector<EdgeId> side_edges;
  for (EdgeId e : mst)
    if ((g.edge(e).u < 5) == (g.edge(e).v < 5)) side_edges.push_back(e);
  auto groups = frederickson_group(g, side_edges, 5);
  REQUIRE(groups.size() == 2);
  // The contracted graph is one edge of expansion 1; s·α/3 = 5/3 splits it.
  auto q = expansion_decompose_respecting(g, groups, 5, Ratio(1), 0.01, dec, rng);
  REQUIRE(q.parts.size() == 2);
  CHECK(q.crossing == 1);
  CHECK(static_cast<double>(q.crossing) <= 1.0 * q.gamma * 10);
  for (const auto& part : q.parts) {
    std::set<NodeId> s(part.begin(), part.end());
    for (const auto& u : groups) {
      int in = 0;
      for (NodeId x : u) in += s.count(x) ? 1 : 0;
      CHECK((in == 0 || in == static_cast<int>(u.size())));
    }
  }

  CHECK_THROWS_AS(expansion_decompose_respecting(g, {{0, 1}, {2, 3, 4, 5, 6, 7, 8, 9}}, 8, Ratio(1, 2), 0.01, dec, rng),
                  std::invalid_argument);
  CHECK_THROWS_AS(expansion_decompose_respecting(g, {{0, 1, 2, 3, 4, 5}, {6, 7, 8}}, 6, Ratio(1, 2), 0.01, dec, rng),
                  std::invalid_argument);
  CHECK_THROWS_AS(expansion_decompose_respecting(g, {{0, 1, 2, 3, 4}}, 5, Ratio(1, 2), 0.01, dec, rng),
                  std::invalid_argument);
}

TEST_CASE("small graphs give a single leaf") {
  Graph g = gen::cycle(8, 2);
  MsfDecompParams p;
  p.s_low = 4;
  p.s_high = 8;
  Hierarchy h = msf_decompose(g, p);
  REQUIRE(h.clusters.size() == 1);
  CHECK(h.clusters[0].leaf);
  CHECK(h.reweighted.empty());
  HierarchyReport r = verify_hierarchy(g, h);
  for (int i = 1; i <= 7; ++i) CHECK(r.ok(i));
  CHECK(r.prop[8] == Check::kUnchecked);
}

TEST_CASE("decomposition rejects bad inputs") {
  Graph g = gen::cycle(8, 2);
  g.set_weight(0, Weight{g.weight(1).rank, 0, 0});
  CHECK_THROWS_AS(msf_decompose(g, MsfDecompParams{}), std::invalid_argument);
  MsfDecompParams p;
  p.d = 2;
  CHECK_THROWS_AS(msf_decompose(gen::cycle(8, 2), p), std::invalid_argument);
  CHECK_THROWS_AS(msf_decompose(gen::complete(5), MsfDecompParams{}), std::invalid_argument);
}

TEST_CASE("band arithmetic puts raised edges between bands") {
  Graph g = regular_ranked(200, 5);
  MsfDecompParams p;
  Hierarchy h = msf_decompose(g, p);
  const int64_t m = g.num_edges();
  for (int i = 1; i <= p.d - 2; ++i) {
    Weight raised{h.band_floor(i), 1, 0};
    for (EdgeId e : g.alive_edges()) {
      if (h.m_edge[e]) continue;
      int b = h.band_of[e];
      if (b > i) CHECK(g.weight(e) < raised);
      if (b <= i) CHECK(raised < g.weight(e));
    }
  }
  CHECK(h.band_floor(p.d - 2) == 0);
  CHECK(h.band_floor(0) == m);
}

TEST_CASE("decomposition properties on random 3-regular graphs") {
  std::mt19937_64 rng(11);
  for (uint64_t seed = 0; seed < 6; ++seed) {
    Graph g = regular_ranked(200, 40 + seed);
    MsfDecompParams p;
    p.alpha = Ratio(1, 10);
    p.d = 6;
    p.s_low = 30;
    p.s_high = 40;
    p.seed = seed;
    Hierarchy h = msf_decompose(g, p);
    CHECK(h.clusters.size() > 1);
    auto ds = random_deletions(g, 50, rng);
    HierarchyReport r = verify_hierarchy(g, h, ds);
    for (const auto& note : r.notes) MESSAGE(note);
    for (int i = 1; i <= 7; ++i) CHECK(r.ok(i));
    CHECK(r.prop[3] == Check::kPass);
    CHECK(r.ok(8));
    // Every cluster is connected by its own edge set.
    for (const Cluster& c : h.clusters) CHECK(connected_in(g, c.edges, c.nodes));
    // Non-leaf own edges are exactly the band edges plus the edges between children.
    for (const Cluster& c : h.clusters) {
      if (c.leaf) continue;
      std::set<EdgeId> u(c.band.begin(), c.band.end());
      u.insert(c.cross.begin(), c.cross.end());
      CHECK(std::vector<EdgeId>(u.begin(), u.end()) == c.own);
    }
    std::ostringstream dump;
    dump_hierarchy(dump, h);
    const std::string text = dump.str();
    CHECK(std::count(text.begin(), text.end(), '\n') == static_cast<long>(h.clusters.size()));
  }
}

TEST_CASE("certified decompositions meet the induced conductance guarantee") {
  // With s_low = 30 at n = 200 the contracted graphs have at most 20 nodes, so
  // every inner call is exact.
  RecursiveCutDecomposer exact(20);
  for (uint64_t seed = 0; seed < 4; ++seed) {
    Graph g = regular_ranked(200, 80 + seed);
    MsfDecompParams p;
    p.s_low = 30;
    p.s_high = 40;
    p.seed = seed;
    Hierarchy h = msf_decompose(g, p, exact);
    REQUIRE(h.certified);
    HierarchyReport r = verify_hierarchy(g, h);
    for (int i = 1; i <= 7; ++i) CHECK(r.ok(i));
    MESSAGE("clusters ", h.clusters.size(), " checked ", r.checked_clusters, " min phi cluster ", r.min_phi_cluster,
            " induced ", r.min_phi_induced, " bound ", r.phi_bound);
    if (r.checked_clusters > 0) CHECK(r.prop[8] == Check::kPass);
  }
}

TEST_CASE("negative control: a hand-broken leaf fails property 6") {
  Graph g = regular_ranked(200, 3);
  MsfDecompParams p;
  p.s_low = 30;
  p.s_high = 40;
  Hierarchy h = msf_decompose(g, p);
  // Move all but s_low/3 − 1 nodes of some leaf into a sibling.
  for (size_t ci = 1; ci < h.clusters.size(); ++ci) {
    Cluster& c = h.clusters[ci];
    if (!c.leaf) continue;
    c.nodes.resize(static_cast<size_t>(p.s_low / 3 - 1));
    break;
  }
  HierarchyReport r = verify_hierarchy(g, h);
  CHECK(r.prop[6] == Check::kFail);
}
