#include "doctest.h"

#include "harness.hpp"

#include "dmsf/msf.hpp"

#include <set>
#include <sstream>

using namespace dmsf;
using namespace dmsf::harness;

namespace {

std::string graph_text(const GraphFile& g) {
  std::ostringstream os;
  write_graph(os, g);
  return os.str();
}

std::string trace_text(const Trace& t) {
  std::ostringstream os;
  write_trace(os, t);
  return os.str();
}

GenOptions opts(const std::string& model, int n, uint64_t seed, int64_t ops) {
  GenOptions o;
  o.model = model;
  o.n = n;
  o.seed = seed;
  o.ops = ops;
  return o;
}

RunOptions run_opts(EngineKind k) {
  RunOptions o;
  o.engine = k;
  o.cfg.pruner = PrunerKind::kComponent;
  o.cfg.deletion_budget = 60;
  o.cfg.base_case_edges = 32;
  return o;
}

}  // namespace

TEST_CASE("cycle with no ops gives the cycle and an empty trace") {
  auto [g, t] = generate(opts("cycle", 8, 3, 0));
  CHECK(g.n == 8);
  CHECK(g.edges.size() == 8);
  Graph x = g.to_graph();
  for (NodeId v = 0; v < 8; ++v) CHECK(x.degree(v) == 2);
  CHECK(t.ops.empty());
  CHECK(trace_text(t) == "8 8 3\n");
}

TEST_CASE("generation is deterministic per seed") {
  for (const char* model : {"random-3-regular", "barbell", "cycle", "er"}) {
    auto [g1, t1] = generate(opts(model, 40, 9, 50));
    auto [g2, t2] = generate(opts(model, 40, 9, 50));
    CHECK(graph_text(g1) == graph_text(g2));
    CHECK(trace_text(t1) == trace_text(t2));
    auto [g3, t3] = generate(opts(model, 40, 10, 50));
    CHECK(trace_text(t1) != trace_text(t3));
  }
}

TEST_CASE("random 3-regular at n = 512 has every degree 3 and distinct weights") {
  auto [g, t] = generate(opts("random-3-regular", 512, 1, 100));
  Graph x = g.to_graph();
  for (NodeId v = 0; v < x.num_nodes(); ++v) CHECK(x.degree(v) == 3);
  std::set<int64_t> w;
  for (const auto& e : g.edges) w.insert(e.w);
  for (const auto& op : t.ops)
    for (const auto& e : op.inserts) w.insert(e.w);
  CHECK(static_cast<int64_t>(w.size()) == static_cast<int64_t>(g.edges.size()) + t.insertions());
}

TEST_CASE("files round-trip and every deletion names an alive edge") {
  GenOptions o = opts("er", 30, 5, 200);
  o.insert_fraction = 0.4;
  o.max_batch = 3;
  auto [g, t] = generate(o);
  std::istringstream gi(graph_text(g)), ti(trace_text(t));
  GraphFile g2 = read_graph(gi);
  Trace t2 = read_trace(ti);
  CHECK(graph_text(g2) == graph_text(g));
  CHECK(trace_text(t2) == trace_text(t));
  CHECK(t.max_batch() <= 3);
  CHECK(t.insertions() > 0);
  VerifyReport r = verify(g, t, run_opts(EngineKind::kOracle));
  CHECK(r.ok);
  CHECK(r.steps == static_cast<int64_t>(t.ops.size()));
}

TEST_CASE("bare I records and comments parse") {
  std::istringstream in("# a comment\n3 1 0\nI 0 2 5\nD 0 1\nB 2\nI 1 2 7\nI 0 1 9\n");
  Trace t = read_trace(in);
  REQUIRE(t.ops.size() == 3);
  CHECK(t.ops[0].inserts.size() == 1);
  CHECK(t.ops[1].kind == TraceOp::kDelete);
  CHECK(t.ops[2].inserts.size() == 2);
  std::istringstream short_batch("3 1 0\nB 2\nI 1 2 7\n");
  CHECK_THROWS(read_trace(short_batch));
  std::istringstream out_of_range("3 1 0\nD 0 5\n");
  CHECK_THROWS(read_trace(out_of_range));
}

TEST_CASE("verify passes for every engine on mixed and decremental streams") {
  for (uint64_t seed : {1, 2}) {
    GenOptions o = opts("random-3-regular", 128, seed, 120);
    auto [g, t] = generate(o);
    for (EngineKind k : {EngineKind::kOracle, EngineKind::kFewNonTree, EngineKind::kDynMsf}) {
      VerifyReport r = verify(g, t, run_opts(k));
      CHECK_MESSAGE(r.ok, r.message);
    }
    o.insert_fraction = 0;
    auto [gd, td] = generate(o);
    RunOptions ro = run_opts(EngineKind::kDynMsf);
    ro.assert_level = 2;
    VerifyReport r = verify(gd, td, ro);
    CHECK_MESSAGE(r.ok, r.message);
    CHECK(r.stats.find("\"restarts\"") != std::string::npos);
  }
}

TEST_CASE("an injected wrong replacement fails at the faulty step with a witness") {
  GenOptions o = opts("random-3-regular", 64, 3, 60);
  o.insert_fraction = 0;
  auto [g, t] = generate(o);
  // First step at or after 10 whose deletion has a replacement.
  Graph x = g.to_graph();
  int64_t expect = -1;
  for (size_t i = 0; i < t.ops.size(); ++i) {
    std::vector<EdgeId> before = kruskal(x);
    EdgeId e = kNoEdge;
    for (const Arc& a : x.adj(t.ops[i].u))
      if (a.to == t.ops[i].v && (e == kNoEdge || a.e < e)) e = a.e;
    x.remove_edge(e);
    std::vector<EdgeId> after = kruskal(x);
    std::set<EdgeId> b(before.begin(), before.end());
    bool replaced = false;
    for (EdgeId f : after) replaced = replaced || !b.count(f);
    if (static_cast<int64_t>(i) + 1 >= 10 && replaced) {
      expect = static_cast<int64_t>(i) + 1;
      break;
    }
  }
  REQUIRE(expect > 0);
  for (EngineKind k : {EngineKind::kOracle, EngineKind::kDynMsf}) {
    RunOptions ro = run_opts(k);
    ro.fault_step = 10;
    VerifyReport r = verify(g, t, ro);
    CHECK_FALSE(r.ok);
    CHECK(r.first_bad == expect);
    CHECK(r.message.find("missing") != std::string::npos);
    CHECK(r.message.find("extra") != std::string::npos);
    MESSAGE(r.message);
  }
}

TEST_CASE("a deletion naming no edge is reported") {
  GraphFile g;
  g.n = 3;
  g.edges = {{0, 1, 1}, {1, 2, 2}};
  Trace t;
  t.n = 3;
  t.m = 2;
  t.ops.push_back({TraceOp::kDelete, 0, 2, {}});
  VerifyReport r = verify(g, t, run_opts(EngineKind::kOracle));
  CHECK_FALSE(r.ok);
  CHECK(r.first_bad == 1);
}

TEST_CASE("bench: header only on an empty trace, deterministic work columns") {
  auto [g0, t0] = generate(opts("cycle", 8, 1, 0));
  std::ostringstream e;
  write_bench_csv(e, bench(g0, t0, run_opts(EngineKind::kDynMsf), 2));
  CHECK(e.str() == "step,op,work,added,removed,wall_ns_p50,wall_ns_p90,wall_ns_max\n");

  auto [g, t] = generate(opts("random-3-regular", 128, 6, 50));
  for (EngineKind k : {EngineKind::kFewNonTree, EngineKind::kDynMsf}) {
    auto rows = bench(g, t, run_opts(k), 3);
    REQUIRE(rows.size() == t.ops.size());
    int64_t total = 0;
    for (const auto& r : rows) {
      total += r.work;
      CHECK(r.wall_p50 <= r.wall_p90);
      CHECK(r.wall_p90 <= r.wall_max);
    }
    CHECK(total > 0);
  }
}

TEST_CASE("assertion level comes from the environment") {
  setenv("DMSF_ASSERT", "2", 1);
  CHECK(assert_level_from_env() == 2);
  setenv("DMSF_ASSERT", "9", 1);
  CHECK(assert_level_from_env() == 2);
  unsetenv("DMSF_ASSERT");
  CHECK(assert_level_from_env() == 1);
}
