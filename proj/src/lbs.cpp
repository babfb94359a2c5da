#include "dmsf/lbs.hpp"

#include <algorithm>
#include <stdexcept>

namespace dmsf {

namespace {

int64_t ceil_ratio(Ratio r) {
  int64_t q = r.numerator() / r.denominator();
  return q * r.denominator() < r.numerator() ? q + 1 : q;
}

}  // namespace

LbsOutcome lbs_cut(const LbsInstance& inst) {
  if (!inst.g) throw std::invalid_argument("lbs_cut: no graph");
  const Graph& g = *inst.g;
  std::vector<NodeId> a = inst.a;
  std::sort(a.begin(), a.end());
  if (std::adjacent_find(a.begin(), a.end()) != a.end()) throw std::invalid_argument("lbs_cut: repeated node in A");
  if (inst.sigma <= 0 || inst.sigma > 1) throw std::invalid_argument("lbs_cut: sigma outside (0, 1]");
  if (inst.alpha <= 0 || inst.alpha > 1) throw std::invalid_argument("lbs_cut: alpha outside (0, 1]");
  int64_t vol_a = volume(g, a);
  int64_t vol_rest = 2 * g.num_edges() - vol_a;
  if (2 * vol_a > vol_rest) throw std::invalid_argument("lbs_cut: 2 vol(A) exceeds vol(V - A)");
  if (vol_a > 0 && inst.sigma < Ratio(2 * vol_a, vol_rest)) throw std::invalid_argument("lbs_cut: sigma too small");

  FlowInstance fi;
  fi.g = &g;
  fi.F = ceil_ratio(1 / inst.sigma);
  fi.h = ceil_ratio(1 / inst.alpha);
  for (NodeId v : a) {
    if (g.degree(v) == 0) continue;
    fi.source[v] = fi.F * g.degree(v);
    fi.sink[v] = 0;
  }
  FlowOutcome fo = extended_unit_flow(fi);

  LbsOutcome out;
  out.congestion = fo.congestion;
  out.total_excess = fo.total_excess;
  out.work = fo.work;
  out.c_size = Ratio(2 * fo.F_used) / inst.sigma;
  // c_con ≥ 1 by definition; the measured congestion is 0 only when A carries no supply.
  out.c_con = std::max(Ratio(1), 2 * inst.alpha * fo.congestion / inst.sigma);
  if (fo.total_excess == 0) return out;

  Cut s = *fo.cut;
  if (2 * s.volume > 2 * g.num_edges()) {
    std::vector<NodeId> rest;
    for (NodeId v = 0, k = 0; v < g.num_nodes(); ++v) {
      if (k < static_cast<NodeId>(s.members.size()) && s.members[k] == v) ++k;
      else rest.push_back(v);
    }
    s = make_cut(g, rest);
    // The smaller side may fall below |ex|/F; widen c_size so that c_size·vol(S) ≥ 2|ex|/σ still holds.
    Ratio need = Ratio(2 * fo.total_excess) / (inst.sigma * s.volume);
    out.c_size = std::max(out.c_size, need);
  }
  out.phi = conductance(g, s);
  out.cut = std::move(s);
  return out;
}

int64_t opt_overlapping_bruteforce(const Graph& g, Ratio alpha, std::span<const NodeId> a, Ratio sigma) {
  const int n = g.num_nodes();
  if (n > kOverlapBruteForceCap) throw std::invalid_argument("opt_overlapping_bruteforce: graph too large");
  uint32_t amask = 0;
  for (NodeId v : a) {
    if (!g.has_node(v)) throw std::invalid_argument("opt_overlapping_bruteforce: unknown node");
    amask |= 1u << v;
  }
  const int64_t total = 2 * g.num_edges();
  int64_t best = 0;
  for (uint32_t mask = 1; mask + 1 < (1u << n); ++mask) {
    int64_t vol = 0, vol_a = 0, boundary = 0;
    for (int v = 0; v < n; ++v) {
      if (!(mask >> v & 1)) continue;
      vol += g.degree(v);
      if (amask >> v & 1) vol_a += g.degree(v);
      for (const Arc& x : g.adj(v))
        if (!(mask >> x.to & 1)) ++boundary;
    }
    if (vol == 0 || 2 * vol > total || vol <= best) continue;
    if (Ratio(boundary, vol) >= alpha) continue;
    if (Ratio(vol_a) < sigma * vol) continue;
    best = vol;
  }
  return best;
}

}  // namespace dmsf
