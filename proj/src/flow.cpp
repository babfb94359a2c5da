#include "dmsf/flow.hpp"

#include <algorithm>
#include <deque>
#include <limits>
#include <map>
#include <stdexcept>
#include <unordered_set>

namespace dmsf {

namespace {

constexpr int64_t kMax = std::numeric_limits<int64_t>::max();

int64_t sat_mul(int64_t a, int64_t b) {
  if (a == 0 || b == 0) return 0;
  if (a > kMax / b) return kMax;
  return a * b;
}

int64_t get(const NodeMap& m, NodeId v) {
  auto it = m.find(v);
  return it == m.end() ? 0 : it->second;
}

// ex/ab of a preflow w.r.t. (Δ, T), computed from the edge flows alone.
void settle(const Graph& g, const NodeMap& source, const NodeMap& sink, FlowOutcome& out) {
  NodeMap fv = out.preflow.net_in(g);
  for (auto [v, d] : source) fv[v] += d;
  out.excess.clear();
  out.absorbed.clear();
  out.total_excess = 0;
  for (auto [v, f] : fv) {
    auto it = sink.find(v);
    int64_t t = it == sink.end() ? g.degree(v) : it->second;
    int64_t ex = std::max<int64_t>(f - t, 0);
    int64_t ab = std::min(t, f);
    if (ex > 0) out.excess[v] = ex;
    if (ab > 0) out.absorbed[v] = ab;
    out.total_excess += ex;
  }
  out.congestion = out.preflow.congestion();
}

void check_common(const Graph& g, int64_t F, const NodeMap& source, const NodeMap& sink) {
  if (F < 1) throw std::invalid_argument("flow: F must be positive");
  int64_t total_source = 0, total_sink = 2 * g.num_edges();
  for (auto [v, d] : source) {
    if (!g.has_node(v)) throw std::invalid_argument("flow: unknown source node");
    if (d < 0) throw std::invalid_argument("flow: negative supply");
    if (d > 0 && g.degree(v) == 0) throw std::invalid_argument("flow: isolated node with supply");
    if (d > sat_mul(F, g.degree(v))) throw std::invalid_argument("flow: supply above F*deg");
    total_source += d;
  }
  for (auto [v, t] : sink) {
    if (!g.has_node(v)) throw std::invalid_argument("flow: unknown sink node");
    if (t < 0 || t > g.degree(v)) throw std::invalid_argument("flow: sink outside [0, deg]");
    total_sink -= g.degree(v) - t;
  }
  if (total_source > total_sink) throw std::invalid_argument("flow: total supply exceeds total sink");
}

// Δ' = Δ + T̄ for the extension onto sink deg everywhere.
NodeMap extend_supply(const Graph& g, const NodeMap& source, const NodeMap& sink) {
  NodeMap out;
  for (auto [v, d] : source)
    if (d > 0) out[v] += d;
  for (auto [v, t] : sink)
    if (g.degree(v) - t > 0) out[v] += g.degree(v) - t;
  return out;
}

}  // namespace

int64_t ceil_log2(int64_t x) {
  int64_t k = 0;
  while (k < 62 && (int64_t{1} << k) < x) ++k;
  return k;
}

int64_t unit_flow_label_cap(int64_t h, int64_t m) {
  return sat_mul(sat_mul(41, h), std::max<int64_t>(1, ceil_log2(2 * m)));
}

int64_t FlowInstance::supply(NodeId v) const { return get(source, v); }

int64_t FlowInstance::sink_of(NodeId v) const {
  auto it = sink.find(v);
  return it == sink.end() ? g->degree(v) : it->second;
}

int64_t Preflow::along(const Graph& g, EdgeId e, NodeId from) const {
  auto it = flow.find(e);
  if (it == flow.end()) return 0;
  return g.edge(e).u == from ? it->second : -it->second;
}

void Preflow::add(const Graph& g, EdgeId e, NodeId from, int64_t amount) {
  int64_t& f = flow[e];
  f += g.edge(e).u == from ? amount : -amount;
  if (f == 0) flow.erase(e);
}

int64_t Preflow::congestion() const {
  int64_t c = 0;
  for (auto [e, f] : flow) c = std::max(c, f < 0 ? -f : f);
  return c;
}

NodeMap Preflow::net_in(const Graph& g) const {
  NodeMap in;
  for (auto [e, f] : flow) {
    in[g.edge(e).v] += f;
    in[g.edge(e).u] -= f;
  }
  return in;
}

CoreResult push_relabel(const Graph& g, const NodeMap& supply, const CoreParams& p) {
  if (p.w < 1 || p.U < 1 || p.label_cap < 1) throw std::invalid_argument("push_relabel: bad parameters");
  struct State {
    int64_t mass = 0;
    int64_t label = 0;
    size_t cur = 0;
  };
  const int64_t n = g.num_nodes();
  int64_t cap = std::min(p.label_cap, std::max<int64_t>(n, 1));
  std::unordered_map<NodeId, State> st;
  std::map<int64_t, std::unordered_set<NodeId>> levels;  // label >= 1 only
  std::map<int64_t, std::deque<NodeId>> buckets;
  CoreResult res;

  auto excess = [&](NodeId v, const State& s) { return s.mass - g.degree(v); };
  auto active = [&](NodeId v, const State& s) { return s.label < cap && excess(v, s) > 0; };
  auto move_level = [&](NodeId v, State& s, int64_t to) {
    if (s.label >= 1) {
      auto it = levels.find(s.label);
      it->second.erase(v);
      if (it->second.empty()) levels.erase(it);
    }
    s.label = to;
    s.cur = 0;
    if (to >= 1) levels[to].insert(v);
  };

  for (auto [v, d] : supply) {
    if (d <= 0) continue;
    if (d > sat_mul(p.w + 1, g.degree(v))) throw std::invalid_argument("push_relabel: supply above (w+1)*deg");
    State& s = st[v];
    s.mass = d;
    if (active(v, s)) buckets[0].push_back(v);
  }

  auto gap_raise = [&](int64_t gap) {
    std::vector<NodeId> lift;
    for (auto it = levels.upper_bound(gap); it != levels.end() && it->first < cap; ++it)
      lift.insert(lift.end(), it->second.begin(), it->second.end());
    for (NodeId x : lift) move_level(x, st[x], cap);
    res.work += static_cast<int64_t>(lift.size());
  };

  auto run = [&]() {
    while (!buckets.empty()) {
      auto bit = buckets.begin();
      if (bit->second.empty()) {
        buckets.erase(bit);
        continue;
      }
      NodeId v = bit->second.front();
      int64_t queued_label = bit->first;
      bit->second.pop_front();
      State& s = st[v];
      if (s.label != queued_label || !active(v, s)) continue;
      auto arcs = g.adj(v);
      bool reselect = false;
      while (active(v, s) && !reselect) {
        if (s.cur >= arcs.size()) {
          int64_t old = s.label;
          move_level(v, s, old + 1);
          ++res.work;
          if (old >= 1 && !levels.count(old)) gap_raise(old);
          if (active(v, s)) buckets[s.label].push_back(v);
          reselect = true;
          break;
        }
        const Arc& a = arcs[s.cur];
        ++res.work;
        State& t = st[a.to];
        int64_t resid = p.U - res.f.along(g, a.e, v);
        if (s.label == t.label + 1 && resid > 0) {
          int64_t room = sat_mul(p.w, g.degree(a.to)) - t.mass;
          if (room <= 0) throw std::logic_error("push_relabel: full receiver below the active minimum");
          int64_t amt = std::min({excess(v, s), resid, room});
          bool was_active = active(a.to, t);
          res.f.add(g, a.e, v, amt);
          s.mass -= amt;
          t.mass += amt;
          if (!was_active && active(a.to, t)) {
            buckets[t.label].push_back(a.to);
            if (active(v, s)) buckets[s.label].push_front(v);
            reselect = true;
          }
        } else {
          ++s.cur;
        }
      }
    }
  };

  auto sweep = [&]() -> std::optional<std::vector<NodeId>> {
    std::unordered_set<NodeId> in;
    int64_t vol = 0, boundary = 0;
    const int64_t total = 2 * g.num_edges();
    std::optional<int64_t> best;
    for (auto it = levels.rbegin(); it != levels.rend(); ++it) {
      for (NodeId x : it->second) {
        in.insert(x);
        vol += g.degree(x);
        for (const Arc& a : g.adj(x)) boundary += in.count(a.to) ? -1 : 1;
      }
      if (static_cast<int64_t>(in.size()) >= n) break;
      int64_t den = std::min(vol, total - vol);
      if (den <= 0) continue;
      Ratio phi(boundary, den);
      if (p.strict ? phi < p.phi_bound : phi <= p.phi_bound) best = it->first;
    }
    if (!best) return std::nullopt;
    std::vector<NodeId> out;
    for (auto it = levels.lower_bound(*best); it != levels.end(); ++it)
      out.insert(out.end(), it->second.begin(), it->second.end());
    std::sort(out.begin(), out.end());
    return out;
  };

  for (;;) {
    run();
    res.total_excess = 0;
    for (auto& [v, s] : st)
      if (excess(v, s) > 0) res.total_excess += excess(v, s);
    if (res.total_excess == 0) break;
    res.cut = sweep();
    if (res.cut) break;
    if (cap >= n) throw std::logic_error("push_relabel: no qualifying level cut at full height");
    int64_t old = cap;
    cap = std::min(sat_mul(cap, 2), n);
    for (auto it = levels.find(old); it != levels.end() && it->first == old; ++it)
      for (NodeId x : it->second)
        if (active(x, st[x])) buckets[old].push_back(x);
  }
  for (auto& [v, s] : st) {
    res.mass[v] = s.mass;
    if (excess(v, s) > 0) res.excess[v] = excess(v, s);
  }
  res.label_cap = cap;
  return res;
}

FlowOutcome unit_flow(const FlowInstance& inst) {
  const Graph& g = *inst.g;
  if (inst.h < 1) throw std::invalid_argument("unit_flow: h must be positive");
  for (auto [v, t] : inst.sink)
    if (t != g.degree(v)) throw std::invalid_argument("unit_flow: sink must equal deg everywhere");
  check_common(g, inst.F, inst.source, {});
  FlowOutcome out;
  out.F_used = inst.F;
  out.congestion_bound = sat_mul(2 * inst.h, inst.F);
  out.phi_bound = Ratio(1, inst.h);
  out.phi_strict = true;
  CoreParams cp{std::max<int64_t>(inst.F, 2), out.congestion_bound, unit_flow_label_cap(inst.h, g.num_edges()),
                out.phi_bound, true};
  if (inst.F == 1) cp.w = 1;
  NodeMap supply;
  for (auto [v, d] : inst.source)
    if (d > 0) supply[v] = d;
  CoreResult r = push_relabel(g, supply, cp);
  out.preflow = std::move(r.f);
  out.work = r.work;
  out.label_cap = r.label_cap;
  settle(g, inst.source, {}, out);
  if (out.total_excess != r.total_excess) throw std::logic_error("unit_flow: excess bookkeeping mismatch");
  if (r.cut) out.cut = make_cut(g, *r.cut);
  return out;
}

FlowOutcome extended_unit_flow(const FlowInstance& inst) {
  const Graph& g = *inst.g;
  if (inst.h < 1) throw std::invalid_argument("extended_unit_flow: h must be positive");
  check_common(g, inst.F, inst.source, inst.sink);
  FlowOutcome out;
  out.F_used = inst.F;
  out.congestion_bound = sat_mul(2 * inst.h, inst.F);
  out.phi_bound = Ratio(1, inst.h);
  out.phi_strict = true;
  // Node capacity (F+1)·deg against sink deg; edge capacity stays 2hF.
  CoreParams cp{inst.F + 1, out.congestion_bound, unit_flow_label_cap(inst.h, g.num_edges()), out.phi_bound, true};
  CoreResult r = push_relabel(g, extend_supply(g, inst.source, inst.sink), cp);
  out.preflow = std::move(r.f);
  out.work = r.work;
  out.label_cap = r.label_cap;
  settle(g, inst.source, inst.sink, out);
  if (out.total_excess != r.total_excess) throw std::logic_error("extended_unit_flow: excess mismatch");
  if (r.cut) out.cut = make_cut(g, *r.cut);
  return out;
}

FlowOutcome excess_scaling_flow(const Graph& g, int64_t F, const NodeMap& source, const NodeMap& sink, Ratio tau,
                                int64_t U, int64_t h) {
  if (tau <= 0 || tau >= 1) throw std::invalid_argument("excess_scaling_flow: tau must lie in (0,1)");
  if (U < 1) throw std::invalid_argument("excess_scaling_flow: U must be positive");
  const int64_t m = g.num_edges();
  if (h < 1 || (h < 62 && (int64_t{1} << h) < m))
    throw std::invalid_argument("excess_scaling_flow: h must be at least log m");
  check_common(g, F, source, sink);
  const int64_t F_eff = std::max<int64_t>(F, 4);
  int64_t total = 0;
  for (auto [v, d] : source) total += d;

  FlowOutcome out;
  out.F_used = F_eff;
  out.congestion_bound = sat_mul(U, F_eff);
  out.phi_bound = Ratio(20 * std::max<int64_t>(1, ceil_log2(2 * m)), h) + Ratio(4, U);
  out.phi_strict = false;
  if (total == 0) {
    settle(g, source, sink, out);
    return out;
  }
  int64_t k = 0;
  while ((int64_t{4} << k) < F_eff) ++k;  // 2^k ∈ [F/4, F/2)
  const int64_t mu0 = int64_t{1} << k;
  const int64_t L = std::max<int64_t>(ceil_log2(std::max<int64_t>(m, 2)), k + 1);
  out.log_term = L;

  NodeMap delta;
  for (auto [v, d] : source)
    if (d > 0) delta[v] = d;
  for (int64_t j = 0;; ++j) {
    const int64_t mu = mu0 >> j;
    NodeMap scaled;
    for (auto [v, d] : delta)
      if (d / mu > 0) scaled[v] = d / mu;
    CoreParams cp{4, U, std::max<int64_t>(h, 1), out.phi_bound, false};
    CoreResult r = push_relabel(g, extend_supply(g, scaled, sink), cp);
    out.work += r.work;
    out.label_cap = r.label_cap;
    ++out.rounds;
    for (auto [e, f] : r.f.flow) {
      int64_t& acc = out.preflow.flow[e];
      acc += f * mu;
      if (acc == 0) out.preflow.flow.erase(e);
    }
    // ab_j w.r.t. (⌊Δ_j/μ_j⌋, T), from f_j.
    NodeMap fj = r.f.net_in(g);
    for (auto [v, d] : scaled) fj[v] += d;
    NodeMap next;
    for (auto [v, d] : delta)
      if (d % mu) next[v] += d % mu;
    for (auto [v, f] : fj) {
      auto it = sink.find(v);
      int64_t t = it == sink.end() ? g.degree(v) : it->second;
      int64_t ab = std::min(t, f);
      if (ab > 0) next[v] += ab * mu;
    }
    if (r.cut) {
      int64_t vol = volume(g, *r.cut);
      Ratio floor = tau * total / (4 * mu * L);
      if (Ratio(vol) >= floor) {
        out.cut = make_cut(g, *r.cut);
        out.cut_volume_floor = floor;
        break;
      }
    }
    bool done = true;
    for (auto [v, d] : next) {
      auto it = sink.find(v);
      int64_t t = it == sink.end() ? g.degree(v) : it->second;
      if (d > t) {
        done = false;
        break;
      }
    }
    if (done) break;
    if (mu == 1) throw std::logic_error("excess_scaling_flow: unit scale left supply above the sink");
    delta = std::move(next);
  }
  settle(g, source, sink, out);
  return out;
}

FlowOutcome almost_flow(const Graph& g, int64_t F, const NodeMap& source, const NodeMap& sink, int64_t U, int64_t h) {
  check_common(g, F, source, sink);
  FlowOutcome out;
  out.F_used = std::max<int64_t>(F, 4);
  NodeMap delta, t_cur = sink;
  for (auto [v, d] : source)
    if (d > 0) delta[v] = d;
  auto total_of = [](const NodeMap& m) {
    int64_t s = 0;
    for (auto [v, d] : m) s += d;
    return s;
  };
  int64_t F_cur = F;
  while (total_of(delta) > 0) {
    // Leftover excess can sit above F·deg on a node; widen F for that call.
    for (auto [v, d] : delta) F_cur = std::max(F_cur, (d + g.degree(v) - 1) / g.degree(v));
    FlowOutcome r = excess_scaling_flow(g, F_cur, delta, t_cur, Ratio(1, 2), U, h);
    out.work += r.work;
    out.phi_bound = r.phi_bound;
    out.phi_strict = r.phi_strict;
    out.log_term = r.log_term;
    out.F_used = std::max(out.F_used, r.F_used);
    if (r.cut) {
      out.cut = r.cut;
      out.cut_volume_floor = r.cut_volume_floor;
      out.residual_supply = total_of(delta);
      break;
    }
    ++out.rounds;
    out.round_absorbed.push_back(r.absorbed);
    for (auto [e, f] : r.preflow.flow) {
      int64_t& acc = out.preflow.flow[e];
      acc += f;
      if (acc == 0) out.preflow.flow.erase(e);
    }
    for (auto [v, ab] : r.absorbed) {
      auto it = t_cur.find(v);
      int64_t t = it == t_cur.end() ? g.degree(v) : it->second;
      t_cur[v] = t - ab;
    }
    delta = r.excess;
  }
  out.congestion_bound = sat_mul(sat_mul(U, out.F_used), std::max<int64_t>(1, out.rounds));
  settle(g, source, sink, out);
  return out;
}

}  // namespace dmsf
