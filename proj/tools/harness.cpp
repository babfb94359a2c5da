#include "harness.hpp"

#include "dmsf/contraction.hpp"
#include "dmsf/msf.hpp"

#include <algorithm>
#include <chrono>
#include <cstdlib>
#include <deque>
#include <set>
#include <sstream>
#include <stdexcept>

namespace dmsf::harness {

std::optional<EngineKind> parse_engine(const std::string& s) {
  if (s == "dynmsf") return EngineKind::kDynMsf;
  if (s == "fewnontree") return EngineKind::kFewNonTree;
  if (s == "oracle") return EngineKind::kOracle;
  return std::nullopt;
}

int assert_level_from_env() {
  const char* v = std::getenv("DMSF_ASSERT");
  if (!v || !*v) return 1;
  return std::clamp(std::atoi(v), 0, 2);
}

namespace {

std::vector<EdgeId> sorted(std::vector<EdgeId> v) {
  std::sort(v.begin(), v.end());
  return v;
}

MsfDelta diff(const std::vector<EdgeId>& before, const std::vector<EdgeId>& after) {
  MsfDelta d;
  std::set_difference(after.begin(), after.end(), before.begin(), before.end(), std::back_inserter(d.added));
  std::set_difference(before.begin(), before.end(), after.begin(), after.end(), std::back_inserter(d.removed));
  return d;
}

// Recomputes Kruskal after every update.
class OracleRunner : public Runner {
 public:
  explicit OracleRunner(const Graph& g) : g_(g), f_(kruskal(g_)) {}
  MsfDelta erase(EdgeId e) override {
    g_.remove_edge(e);
    return refresh();
  }
  MsfDelta insert(const std::vector<GraphFile::E>& batch) override {
    for (const auto& e : batch) g_.add_edge(e.u, e.v, e.w);
    return refresh();
  }
  std::vector<EdgeId> forest() const override { return f_; }
  int64_t work() const override { return work_; }

 private:
  MsfDelta refresh() {
    std::vector<EdgeId> f = kruskal(g_);
    work_ += g_.num_edges() + g_.num_nodes();
    MsfDelta d = diff(f_, f);
    f_ = std::move(f);
    return d;
  }
  Graph g_;
  std::vector<EdgeId> f_;
  int64_t work_ = 0;
};

// Maps trace ids to the ids of an engine that assigns its own on insertion.
class IdMap {
 public:
  explicit IdMap(int64_t m) {
    for (EdgeId e = 0; e < m; ++e) add(e);
  }
  void add(EdgeId local) {
    const EdgeId trace = static_cast<EdgeId>(to_local_.size());
    to_local_.push_back(local);
    if (static_cast<size_t>(local) >= to_trace_.size()) to_trace_.resize(static_cast<size_t>(local) + 1, kNoEdge);
    to_trace_[static_cast<size_t>(local)] = trace;
  }
  EdgeId local(EdgeId trace) const { return to_local_.at(static_cast<size_t>(trace)); }
  EdgeId trace(EdgeId local) const { return to_trace_.at(static_cast<size_t>(local)); }
  std::vector<EdgeId> trace(const std::vector<EdgeId>& v) const {
    std::vector<EdgeId> out;
    for (EdgeId e : v) out.push_back(trace(e));
    std::sort(out.begin(), out.end());
    return out;
  }
  MsfDelta trace(const MsfDelta& d) const { return {trace(d.added), trace(d.removed)}; }

 private:
  std::vector<EdgeId> to_local_, to_trace_;
};

class FewRunner : public Runner {
 public:
  FewRunner(const Graph& g, FewNonTreeConfig cfg) : a_(g, std::move(cfg)), ids_(g.edge_capacity()) {}
  MsfDelta erase(EdgeId e) override { return ids_.trace(a_.erase(ids_.local(e))); }
  MsfDelta insert(const std::vector<GraphFile::E>& batch) override {
    std::vector<BatchEdge> b;
    for (const auto& e : batch) b.push_back({e.u, e.v, Weight{e.w, 0, -1}});
    auto [fresh, d] = a_.insert_batch(b);
    for (EdgeId x : fresh) ids_.add(x);
    return ids_.trace(d);
  }
  std::vector<EdgeId> forest() const override { return ids_.trace(a_.forest()); }
  int64_t work() const override { return a_.work(); }

 private:
  FewNonTreeMsf a_;
  IdMap ids_;
};

class EngineRunner : public Runner {
 public:
  EngineRunner(const Graph& g, EngineConfig cfg) : a_(g, std::move(cfg)) {}
  MsfDelta erase(EdgeId e) override { return a_.erase(e); }
  MsfDelta insert(const std::vector<GraphFile::E>&) override {
    throw std::logic_error("EngineRunner: the decremental engine takes no insertions");
  }
  std::vector<EdgeId> forest() const override { return a_.forest(); }
  int64_t work() const override { return a_.work(); }
  std::string monitor() const override {
    EngineStats s = a_.stats();
    std::ostringstream os;
    if (s.churn_violations) os << "churn violations " << s.churn_violations << "; ";
    if (s.sparsity_violations) os << "sparsity violations " << s.sparsity_violations << "; ";
    return os.str();
  }
  std::string stats_json() const override { return a_.stats_json(); }

 private:
  DynamicMsfEngine a_;
};

// Replaces the first replacement edge reported at or after a given step with
// the heaviest alive edge outside the forest.
class FaultRunner : public Runner {
 public:
  FaultRunner(std::unique_ptr<Runner> inner, const Graph& truth, int64_t step)
      : inner_(std::move(inner)), truth_(truth), step_(step) {}
  MsfDelta erase(EdgeId e) override { return corrupt(inner_->erase(e)); }
  MsfDelta insert(const std::vector<GraphFile::E>& b) override { return corrupt(inner_->insert(b)); }
  std::vector<EdgeId> forest() const override {
    std::vector<EdgeId> f = inner_->forest();
    if (dropped_ != kNoEdge) {
      std::erase(f, dropped_);
      if (planted_ != kNoEdge) f.push_back(planted_);
      std::sort(f.begin(), f.end());
    }
    return f;
  }
  int64_t work() const override { return inner_->work(); }
  std::string monitor() const override { return inner_->monitor(); }
  std::string stats_json() const override { return inner_->stats_json(); }

 private:
  MsfDelta corrupt(MsfDelta d) {
    ++calls_;
    if (calls_ < step_ || dropped_ != kNoEdge || d.added.empty()) return d;
    dropped_ = d.added.front();
    std::vector<EdgeId> f = inner_->forest();
    std::set<EdgeId> in(f.begin(), f.end());
    for (EdgeId e : truth_.alive_edges())
      if (!in.count(e) && (planted_ == kNoEdge || truth_.weight(planted_) < truth_.weight(e))) planted_ = e;
    std::erase(d.added, dropped_);
    if (planted_ != kNoEdge) {
      d.added.push_back(planted_);
      std::sort(d.added.begin(), d.added.end());
    }
    return d;
  }
  std::unique_ptr<Runner> inner_;
  const Graph& truth_;
  int64_t step_, calls_ = 0;
  EdgeId dropped_ = kNoEdge, planted_ = kNoEdge;
};

// Forest path between u and v as edge ids; empty optional when not connected.
std::optional<std::vector<EdgeId>> forest_path(const Graph& g, const std::vector<EdgeId>& forest, NodeId u, NodeId v) {
  std::vector<std::vector<std::pair<NodeId, EdgeId>>> adj(static_cast<size_t>(g.num_nodes()));
  for (EdgeId e : forest) {
    if (!g.alive(e)) continue;
    adj[g.edge(e).u].push_back({g.edge(e).v, e});
    adj[g.edge(e).v].push_back({g.edge(e).u, e});
  }
  std::vector<EdgeId> via(static_cast<size_t>(g.num_nodes()), kNoEdge);
  std::vector<char> seen(static_cast<size_t>(g.num_nodes()), 0);
  std::deque<NodeId> q{u};
  seen[u] = 1;
  while (!q.empty()) {
    NodeId x = q.front();
    q.pop_front();
    for (auto [y, e] : adj[x])
      if (!seen[y]) {
        seen[y] = 1;
        via[y] = e;
        q.push_back(y);
      }
  }
  if (!seen[v]) return std::nullopt;
  std::vector<EdgeId> path;
  for (NodeId x = v; x != u; x = g.other(via[x], x)) path.push_back(via[x]);
  return path;
}

std::string edge_text(const Graph& g, EdgeId e) {
  std::ostringstream os;
  const Edge& x = g.edge(e);
  os << "#" << e << " (" << x.u << "," << x.v << " w=" << x.w.rank << ")";
  return os.str();
}

EdgeId heaviest(const Graph& g, const std::vector<EdgeId>& path) {
  return *std::max_element(path.begin(), path.end(), [&](EdgeId a, EdgeId b) { return g.weight(a) < g.weight(b); });
}

// A smallest witness for each wrong edge: a cycle on which the edge is the
// heaviest (extra edges) or on which a heavier reported edge sits (missing edges).
std::string counterexample(const Graph& g, const std::vector<EdgeId>& want, const std::vector<EdgeId>& got) {
  std::vector<EdgeId> extra, missing;
  std::set_difference(got.begin(), got.end(), want.begin(), want.end(), std::back_inserter(extra));
  std::set_difference(want.begin(), want.end(), got.begin(), got.end(), std::back_inserter(missing));
  std::ostringstream os;
  os << "reported " << got.size() << " edges, oracle " << want.size() << "\n";
  int shown = 0;
  for (EdgeId e : extra) {
    if (shown++ == 3) break;
    if (!g.alive(e)) {
      os << "  extra " << "#" << e << ": not an alive edge\n";
      continue;
    }
    os << "  extra " << edge_text(g, e);
    auto p = forest_path(g, want, g.edge(e).u, g.edge(e).v);
    if (p && !p->empty()) {
      os << ": heaviest on a cycle with the oracle path";
      for (EdgeId f : *p) os << ' ' << edge_text(g, f);
    }
    os << "\n";
  }
  shown = 0;
  for (EdgeId e : missing) {
    if (shown++ == 3) break;
    os << "  missing " << edge_text(g, e);
    auto p = forest_path(g, got, g.edge(e).u, g.edge(e).v);
    if (!p) {
      os << ": endpoints disconnected in the reported forest";
    } else {
      EdgeId h = heaviest(g, *p);
      os << ": lighter than reported " << edge_text(g, h) << " on their common cycle";
    }
    os << "\n";
  }
  return os.str();
}

EdgeId resolve_delete(const Graph& g, NodeId u, NodeId v) {
  EdgeId best = kNoEdge;
  for (const Arc& a : g.adj(u))
    if (a.to == v && (best == kNoEdge || a.e < best)) best = a.e;
  return best;
}

}  // namespace

std::unique_ptr<Runner> make_runner(const Graph& g, const Trace& t, const RunOptions& o) {
  const int64_t nontree = g.num_edges() - static_cast<int64_t>(kruskal(g).size());
  FewNonTreeConfig fc;
  fc.k = std::max<int64_t>(1, nontree + t.insertions());
  fc.B = std::max<int64_t>(1, t.max_batch());
  switch (o.engine) {
    case EngineKind::kOracle:
      return std::make_unique<OracleRunner>(g);
    case EngineKind::kFewNonTree:
      return std::make_unique<FewRunner>(g, fc);
    case EngineKind::kDynMsf:
      break;
  }
  EngineConfig cfg = o.cfg;
  if (o.assert_level >= 2) cfg.self_check = true;
  if (t.insertions() == 0) return std::make_unique<EngineRunner>(g, cfg);
  // Insertions go through the few-non-tree reduction with the engine inside.
  fc.inner = engine_factory(cfg);
  return std::make_unique<FewRunner>(g, fc);
}

VerifyReport verify(const GraphFile& gf, const Trace& t, const RunOptions& o) {
  VerifyReport r;
  Graph truth = gf.to_graph();
  std::unique_ptr<Runner> run;
  auto fail = [&](int64_t step, const std::string& why) {
    r.ok = false;
    r.first_bad = step;
    r.message = "step " + std::to_string(step) + ": " + why;
    return r;
  };
  try {
    run = make_runner(truth, t, o);
  } catch (const std::exception& ex) {
    return fail(0, std::string("engine rejected the input: ") + ex.what());
  }
  if (o.fault_step) run = std::make_unique<FaultRunner>(std::move(run), truth, *o.fault_step);
  std::vector<EdgeId> prev = kruskal(truth);
  if (sorted(run->forest()) != prev) return fail(0, "initial forest differs\n" + counterexample(truth, prev, sorted(run->forest())));
  for (const TraceOp& op : t.ops) {
    const int64_t step = ++r.steps;
    MsfDelta d;
    try {
      if (op.kind == TraceOp::kDelete) {
        EdgeId e = resolve_delete(truth, op.u, op.v);
        if (e == kNoEdge) return fail(step, describe(op) + " names no alive edge");
        truth.remove_edge(e);
        d = run->erase(e);
      } else {
        for (const auto& e : op.inserts) truth.add_edge(e.u, e.v, e.w);
        d = run->insert(op.inserts);
      }
    } catch (const std::exception& ex) {
      return fail(step, describe(op) + " threw: " + ex.what());
    }
    std::vector<EdgeId> want = kruskal(truth), got = sorted(run->forest());
    if (got != want) return fail(step, describe(op) + ": forest differs\n" + counterexample(truth, want, got));
    if (o.assert_level >= 1) {
      std::set<EdgeId> applied(prev.begin(), prev.end());
      for (EdgeId x : d.removed) applied.erase(x);
      for (EdgeId x : d.added) applied.insert(x);
      if (std::vector<EdgeId>(applied.begin(), applied.end()) != want)
        return fail(step, describe(op) + ": reported delta does not turn the old forest into the new one");
    }
    if (o.assert_level >= 2)
      if (std::string m = run->monitor(); !m.empty()) return fail(step, describe(op) + ": " + m);
    prev = std::move(want);
  }
  r.stats = run->stats_json();
  return r;
}

std::vector<BenchRow> bench(const GraphFile& gf, const Trace& t, const RunOptions& o, int repetitions) {
  if (repetitions < 1) throw std::invalid_argument("bench: repetitions < 1");
  std::vector<BenchRow> rows(t.ops.size());
  std::vector<std::vector<int64_t>> wall(t.ops.size());
  for (int rep = 0; rep < repetitions; ++rep) {
    Graph truth = gf.to_graph();
    std::unique_ptr<Runner> run = make_runner(truth, t, o);
    for (size_t i = 0; i < t.ops.size(); ++i) {
      const TraceOp& op = t.ops[i];
      const int64_t w0 = run->work();
      auto t0 = std::chrono::steady_clock::now();
      MsfDelta d;
      if (op.kind == TraceOp::kDelete) {
        EdgeId e = resolve_delete(truth, op.u, op.v);
        if (e == kNoEdge) throw std::runtime_error("bench: " + describe(op) + " names no alive edge");
        truth.remove_edge(e);
        d = run->erase(e);
      } else {
        for (const auto& e : op.inserts) truth.add_edge(e.u, e.v, e.w);
        d = run->insert(op.inserts);
      }
      auto t1 = std::chrono::steady_clock::now();
      wall[i].push_back(std::chrono::duration_cast<std::chrono::nanoseconds>(t1 - t0).count());
      BenchRow row;
      row.step = static_cast<int64_t>(i) + 1;
      row.op = op.kind == TraceOp::kDelete ? "D" : "B" + std::to_string(op.inserts.size());
      row.work = run->work() - w0;
      row.added = static_cast<int64_t>(d.added.size());
      row.removed = static_cast<int64_t>(d.removed.size());
      if (rep > 0 && (row.work != rows[i].work || row.added != rows[i].added || row.removed != rows[i].removed))
        throw std::runtime_error("bench: work units differ between repetitions at step " + std::to_string(row.step));
      rows[i] = row;
    }
  }
  for (size_t i = 0; i < rows.size(); ++i) {
    auto& w = wall[i];
    std::sort(w.begin(), w.end());
    auto at = [&](double q) { return w[std::min(w.size() - 1, static_cast<size_t>(q * static_cast<double>(w.size())))]; };
    rows[i].wall_p50 = at(0.5);
    rows[i].wall_p90 = at(0.9);
    rows[i].wall_max = w.back();
  }
  return rows;
}

void write_bench_csv(std::ostream& os, const std::vector<BenchRow>& rows) {
  os << "step,op,work,added,removed,wall_ns_p50,wall_ns_p90,wall_ns_max\n";
  for (const auto& r : rows)
    os << r.step << ',' << r.op << ',' << r.work << ',' << r.added << ',' << r.removed << ',' << r.wall_p50 << ','
       << r.wall_p90 << ',' << r.wall_max << '\n';
}

}  // namespace dmsf::harness
