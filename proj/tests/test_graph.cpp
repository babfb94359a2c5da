#include "doctest.h"

#include "dmsf/graph.hpp"
#include "dmsf/msf.hpp"
#include "generators.hpp"

#include <random>
#include <sstream>

using namespace dmsf;

namespace {

Graph two_triangles_bridge() {
  Graph g(6);
  g.add_edge(0, 1, 1);
  g.add_edge(1, 2, 2);
  g.add_edge(0, 2, 3);
  g.add_edge(3, 4, 4);
  g.add_edge(4, 5, 5);
  g.add_edge(3, 5, 6);
  g.add_edge(2, 3, 7);
  return g;
}

// Independent enumeration used to freeze the values asserted below.
Ratio enumerate_min_phi(const Graph& g) {
  const int n = g.num_nodes();
  Ratio best(1000000);
  for (int mask = 1; mask < (1 << n) - 1; ++mask) {
    std::vector<NodeId> s;
    for (int v = 0; v < n; ++v)
      if (mask >> v & 1) s.push_back(v);
    Cut c = make_cut(g, s);
    if (std::min(c.volume, 2 * g.num_edges() - c.volume) == 0) continue;
    best = std::min(best, conductance(g, c));
  }
  return best;
}

}  // namespace

TEST_CASE("volume counts alive degree with parallel edges") {
  Graph p = gen::path(3);
  CHECK(volume(p, std::vector<NodeId>{1}) == 2);
  CHECK(volume(p, std::vector<NodeId>{}) == 0);
  Graph t(3);
  t.add_edge(0, 1, 1);
  t.add_edge(0, 1, 2);
  t.add_edge(1, 2, 3);
  t.add_edge(0, 2, 4);
  CHECK(volume(t, std::vector<NodeId>{0}) == 3);
  CHECK_THROWS_AS(volume(t, std::vector<NodeId>{7}), std::invalid_argument);
}

TEST_CASE("conductance and expansion examples") {
  Graph p = gen::path(3);
  CHECK(conductance(p, std::vector<NodeId>{0}) == Ratio(1));
  Graph c4 = gen::cycle(4, 0);
  CHECK(conductance(c4, std::vector<NodeId>{0, 1}) == Ratio(1, 2));
  CHECK(expansion(c4, std::vector<NodeId>{0, 1}) == Ratio(1));
  Graph k4 = gen::complete(4);
  CHECK(conductance(k4, std::vector<NodeId>{0}) == Ratio(1));
  CHECK(expansion(k4, std::vector<NodeId>{0}) == Ratio(3));
  Graph p4 = gen::path(4);
  CHECK(expansion(p4, std::vector<NodeId>{0, 1}) == Ratio(1, 2));
  CHECK_THROWS_AS(conductance(k4, std::vector<NodeId>{}), std::invalid_argument);
  CHECK_THROWS_AS(conductance(k4, std::vector<NodeId>{0, 1, 2, 3}), std::invalid_argument);
  Graph iso(3);
  iso.add_edge(0, 1, 1);
  CHECK_THROWS_AS(conductance(iso, std::vector<NodeId>{2}), std::invalid_argument);
}

TEST_CASE("brute force minimum conductance") {
  Graph c8 = gen::cycle(8, 0);
  auto r = min_conductance_bruteforce(c8);
  REQUIRE(r);
  CHECK(enumerate_min_phi(c8) == Ratio(1, 4));
  CHECK(r->phi == Ratio(1, 4));

  Graph k4 = gen::complete(4);
  CHECK(enumerate_min_phi(k4) == Ratio(2, 3));
  CHECK(min_conductance_bruteforce(k4)->phi == Ratio(2, 3));

  Graph tt = two_triangles_bridge();
  CHECK(enumerate_min_phi(tt) == Ratio(1, 7));
  auto t = min_conductance_bruteforce(tt);
  CHECK(t->phi == Ratio(1, 7));
  CHECK(t->cut.members == std::vector<NodeId>{0, 1, 2});

  Graph big(21);
  CHECK_THROWS_AS(min_conductance_bruteforce(big), std::invalid_argument);
}

TEST_CASE("brute force agrees with enumeration on random graphs") {
  for (int s = 0; s < 30; ++s) {
    Graph g = gen::random_connected(9, 6, 100 + s);
    auto r = min_conductance_bruteforce(g);
    REQUIRE(r);
    CHECK(r->phi == enumerate_min_phi(g));
    CHECK(conductance(g, r->cut) == r->phi);
  }
}

TEST_CASE("cut symmetry and the degree-3 conductance/expansion sandwich") {
  std::mt19937_64 rng(7);
  for (int s = 0; s < 20; ++s) {
    Graph g = gen::random_regular3(12, 300 + s);
    for (int k = 0; k < 50; ++k) {
      std::vector<NodeId> a, b;
      for (int v = 0; v < g.num_nodes(); ++v) (rng() & 1 ? a : b).push_back(v);
      if (a.empty() || b.empty()) continue;
      CHECK(conductance(g, a) == conductance(g, b));
      CHECK(expansion(g, a) == expansion(g, b));
      Ratio phi = conductance(g, a), h = expansion(g, a);
      CHECK(phi >= h / 3);
      CHECK(phi <= h);
    }
  }
}

TEST_CASE("graph removal keeps adjacency consistent") {
  Graph g(3);
  EdgeId a = g.add_edge(0, 1, 1);
  EdgeId b = g.add_edge(0, 1, 2);
  EdgeId c = g.add_edge(1, 2, 3);
  g.remove_edge(a);
  CHECK(g.degree(0) == 1);
  CHECK(g.degree(1) == 2);
  CHECK(g.adj(0)[0].e == b);
  g.remove_edge(c);
  CHECK(g.degree(1) == 1);
  CHECK_THROWS_AS(g.remove_edge(a), std::invalid_argument);
  CHECK_THROWS_AS(g.add_edge(1, 1, 5), std::invalid_argument);
  std::mt19937_64 rng(3);
  Graph r = gen::random_connected(30, 40, 5);
  auto alive = r.alive_edges();
  std::shuffle(alive.begin(), alive.end(), rng);
  for (size_t i = 0; i < alive.size() / 2; ++i) r.remove_edge(alive[i]);
  for (NodeId v = 0; v < r.num_nodes(); ++v) {
    for (size_t k = 0; k < r.adj(v).size(); ++k) {
      const Edge& e = r.edge(r.adj(v)[k].e);
      CHECK(e.alive);
      CHECK(((e.u == v && e.pos_u == static_cast<int>(k)) || (e.v == v && e.pos_v == static_cast<int>(k))));
    }
  }
}

TEST_CASE("degree reduction preserves the MSF over real edges") {
  Graph id = gen::random_regular3(10, 1);
  auto same = degree_reduce(id);
  CHECK(same.g.num_nodes() == id.num_nodes());

  Graph star(6);
  for (int k = 1; k <= 5; ++k) star.add_edge(0, k, k);
  auto red = degree_reduce(star);
  CHECK(red.gadget[0].size() == 3);
  CHECK(red.g.max_degree() <= 3);

  Graph empty;
  CHECK(degree_reduce(empty).g.num_nodes() == 0);

  for (int s = 0; s < 500; ++s) {
    std::mt19937_64 rng(s);
    int n = 2 + static_cast<int>(rng() % 63);
    Graph g = gen::erdos_renyi(n, 0.05 + 0.3 * (rng() % 100) / 100.0, 1000 + s);
    auto r = degree_reduce(g);
    CHECK(r.g.max_degree() <= 3);
    std::vector<EdgeId> mapped;
    for (EdgeId e : kruskal(r.g))
      if (r.to_original[e] != kNoEdge) mapped.push_back(r.to_original[e]);
    std::sort(mapped.begin(), mapped.end());
    CHECK(mapped == kruskal(g));
  }
}

TEST_CASE("degree reduction mirrors updates") {
  Graph g = gen::complete(6);
  auto r = degree_reduce(g);
  std::mt19937_64 rng(11);
  for (int step = 0; step < 40; ++step) {
    auto alive = g.alive_edges();
    if (step % 2 && !alive.empty()) {
      EdgeId e = alive[rng() % alive.size()];
      g.remove_edge(e);
      r.erase(e);
    } else {
      NodeId a = static_cast<NodeId>(rng() % 6), b = static_cast<NodeId>((a + 1 + rng() % 5) % 6);
      EdgeId e = g.add_edge(a, b, 100 + step);
      r.insert(e, a, b, g.weight(e));
    }
    CHECK(r.g.max_degree() <= 3);
    std::vector<EdgeId> mapped;
    for (EdgeId e : kruskal(r.g))
      if (r.to_original[e] != kNoEdge) mapped.push_back(r.to_original[e]);
    std::sort(mapped.begin(), mapped.end());
    CHECK(mapped == kruskal(g));
  }
}

TEST_CASE("edge list round trip") {
  std::istringstream in("3 2\n0 1 5\n1 2 7\n");
  Graph g = read_edge_list(in);
  CHECK(g.num_edges() == 2);
  CHECK(g.weight(1).rank == 7);
  std::ostringstream out;
  write_edge_list(out, g);
  CHECK(out.str() == "3 2\n0 1 5\n1 2 7\n");
  std::istringstream bad("3 2\n0 1 5\n");
  CHECK_THROWS_AS(read_edge_list(bad), std::invalid_argument);
}
