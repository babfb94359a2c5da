#include "harness.hpp"

#include "generators.hpp"

#include <algorithm>
#include <istream>
#include <map>
#include <numeric>
#include <ostream>
#include <random>
#include <sstream>
#include <stdexcept>

namespace dmsf::harness {

Graph GraphFile::to_graph() const {
  Graph g(n);
  for (const E& e : edges) g.add_edge(e.u, e.v, e.w);
  return g;
}

int64_t Trace::insertions() const {
  int64_t k = 0;
  for (const TraceOp& op : ops) k += static_cast<int64_t>(op.inserts.size());
  return k;
}

int64_t Trace::max_batch() const {
  int64_t b = 0;
  for (const TraceOp& op : ops) b = std::max(b, static_cast<int64_t>(op.inserts.size()));
  return b;
}

void write_graph(std::ostream& os, const GraphFile& g) {
  os << g.n << ' ' << g.edges.size() << ' ' << g.seed << '\n';
  for (const auto& e : g.edges) os << e.u << ' ' << e.v << ' ' << e.w << '\n';
}

namespace {

std::istringstream next_line(std::istream& is, int64_t& line_no) {
  std::string s;
  while (std::getline(is, s)) {
    ++line_no;
    if (!s.empty() && s[0] != '#') return std::istringstream(s);
  }
  return std::istringstream();
}

[[noreturn]] void bad(const char* what, int64_t line_no) {
  throw std::runtime_error(std::string(what) + " at line " + std::to_string(line_no));
}

void check_node(int n, NodeId x, int64_t line_no) {
  if (x < 0 || x >= n) bad("node out of range", line_no);
}

}  // namespace

GraphFile read_graph(std::istream& is) {
  GraphFile g;
  int64_t line_no = 0, m = 0;
  auto h = next_line(is, line_no);
  if (!(h >> g.n >> m >> g.seed) || g.n < 0 || m < 0) bad("graph: bad header", line_no);
  for (int64_t i = 0; i < m; ++i) {
    auto l = next_line(is, line_no);
    GraphFile::E e{};
    if (!(l >> e.u >> e.v >> e.w)) bad("graph: bad edge line", line_no);
    check_node(g.n, e.u, line_no);
    check_node(g.n, e.v, line_no);
    g.edges.push_back(e);
  }
  return g;
}

void write_trace(std::ostream& os, const Trace& t) {
  os << t.n << ' ' << t.m << ' ' << t.seed << '\n';
  for (const TraceOp& op : t.ops) {
    if (op.kind == TraceOp::kDelete) {
      os << "D " << op.u << ' ' << op.v << '\n';
      continue;
    }
    os << "B " << op.inserts.size() << '\n';
    for (const auto& e : op.inserts) os << "I " << e.u << ' ' << e.v << ' ' << e.w << '\n';
  }
}

Trace read_trace(std::istream& is) {
  Trace t;
  int64_t line_no = 0;
  auto h = next_line(is, line_no);
  if (!(h >> t.n >> t.m >> t.seed)) bad("trace: bad header", line_no);
  auto read_insert = [&](std::istringstream& l) {
    GraphFile::E e{};
    if (!(l >> e.u >> e.v >> e.w)) bad("trace: bad I record", line_no);
    check_node(t.n, e.u, line_no);
    check_node(t.n, e.v, line_no);
    return e;
  };
  for (;;) {
    auto l = next_line(is, line_no);
    std::string tag;
    if (!(l >> tag)) break;
    TraceOp op;
    if (tag == "D") {
      if (!(l >> op.u >> op.v)) bad("trace: bad D record", line_no);
      check_node(t.n, op.u, line_no);
      check_node(t.n, op.v, line_no);
    } else if (tag == "I") {
      op.kind = TraceOp::kBatch;
      op.inserts.push_back(read_insert(l));
    } else if (tag == "B") {
      int64_t k = 0;
      if (!(l >> k) || k < 1) bad("trace: bad B record", line_no);
      op.kind = TraceOp::kBatch;
      for (int64_t i = 0; i < k; ++i) {
        auto li = next_line(is, line_no);
        std::string it;
        if (!(li >> it) || it != "I") bad("trace: batch shorter than announced", line_no);
        op.inserts.push_back(read_insert(li));
      }
    } else {
      bad("trace: unknown record", line_no);
    }
    t.ops.push_back(std::move(op));
  }
  return t;
}

std::string describe(const TraceOp& op) {
  std::ostringstream os;
  if (op.kind == TraceOp::kDelete) {
    os << "D " << op.u << ' ' << op.v;
  } else {
    os << "B " << op.inserts.size();
    for (const auto& e : op.inserts) os << " | I " << e.u << ' ' << e.v << ' ' << e.w;
  }
  return os.str();
}

std::pair<GraphFile, Trace> generate(const GenOptions& o) {
  Graph base;
  if (o.model == "random-3-regular") {
    base = gen::random_regular3(o.n, o.seed);
  } else if (o.model == "barbell") {
    if (o.n < 4 || o.n % 2) throw std::invalid_argument("gen: barbell needs an even n >= 4");
    base = gen::barbell(o.n / 2, o.seed);
  } else if (o.model == "cycle") {
    if (o.n < 3) throw std::invalid_argument("gen: cycle needs n >= 3");
    base = gen::cycle(o.n, o.seed);
  } else if (o.model == "er") {
    if (o.n < 2) throw std::invalid_argument("gen: er needs n >= 2");
    base = gen::erdos_renyi(o.n, o.er_p > 0 ? o.er_p : std::min(1.0, 6.0 / o.n), o.seed);
  } else {
    throw std::invalid_argument("gen: unknown model " + o.model);
  }
  if (o.ops < 0 || o.max_batch < 1) throw std::invalid_argument("gen: ops < 0 or batch < 1");
  const std::vector<EdgeId> alive = base.alive_edges();
  const int64_t m = static_cast<int64_t>(alive.size());

  // One shuffled pool of distinct ranks covers the initial edges and every
  // insertion the trace can make.
  std::mt19937_64 rng(o.seed * 0x2545F4914F6CDD1DULL + 17);
  std::vector<int64_t> ranks(static_cast<size_t>(m + o.ops * o.max_batch));
  std::iota(ranks.begin(), ranks.end(), 1);
  std::shuffle(ranks.begin(), ranks.end(), rng);
  size_t next_rank = 0;

  GraphFile gf;
  gf.n = base.num_nodes();
  gf.seed = o.seed;
  // Mirror keyed by node pair, oldest first, so that D u v is unambiguous.
  std::map<std::pair<NodeId, NodeId>, std::vector<int64_t>> by_pair;
  std::vector<std::pair<NodeId, NodeId>> ends;
  std::vector<int64_t> alive_ids;
  std::vector<size_t> where;
  auto add = [&](NodeId u, NodeId v) {
    const int64_t id = static_cast<int64_t>(ends.size());
    ends.emplace_back(u, v);
    by_pair[{std::min(u, v), std::max(u, v)}].push_back(id);
    where.push_back(alive_ids.size());
    alive_ids.push_back(id);
    return ranks[next_rank++];
  };
  for (EdgeId e : alive) {
    NodeId u = base.edge(e).u, v = base.edge(e).v;
    gf.edges.push_back({u, v, add(u, v)});
  }

  Trace t;
  t.n = gf.n;
  t.m = m;
  t.seed = o.seed;
  for (int64_t s = 0; s < o.ops; ++s) {
    const bool insert = gf.n >= 2 && (alive_ids.empty() || static_cast<double>(rng() % 1000000) <
                                                                   o.insert_fraction * 1000000.0);
    TraceOp op;
    if (insert) {
      op.kind = TraceOp::kBatch;
      const int k = 1 + static_cast<int>(rng() % static_cast<uint64_t>(o.max_batch));
      for (int i = 0; i < k; ++i) {
        NodeId u = static_cast<NodeId>(rng() % static_cast<uint64_t>(gf.n));
        NodeId v = static_cast<NodeId>(rng() % static_cast<uint64_t>(gf.n - 1));
        if (v >= u) ++v;
        op.inserts.push_back({u, v, add(u, v)});
      }
    } else {
      if (alive_ids.empty()) break;
      const int64_t pick = alive_ids[rng() % alive_ids.size()];
      auto [u, v] = ends[static_cast<size_t>(pick)];
      op.u = u;
      op.v = v;
      auto& bucket = by_pair[{std::min(u, v), std::max(u, v)}];
      const int64_t gone = bucket.front();
      bucket.erase(bucket.begin());
      const size_t at = where[static_cast<size_t>(gone)];
      alive_ids[at] = alive_ids.back();
      where[static_cast<size_t>(alive_ids[at])] = at;
      alive_ids.pop_back();
    }
    t.ops.push_back(std::move(op));
  }
  return {std::move(gf), std::move(t)};
}

}  // namespace dmsf::harness
