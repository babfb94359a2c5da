#pragma once

#include "dmsf/graph.hpp"

#include <optional>
#include <unordered_map>
#include <vector>

namespace dmsf {

using NodeMap = std::unordered_map<NodeId, int64_t>;

struct FlowInstance {
  const Graph* g = nullptr;
  NodeMap source;  // Δ; absent nodes have 0
  NodeMap sink;    // only nodes with T(v) < deg(v); absent nodes have T(v) = deg(v)
  int64_t h = 1;
  int64_t F = 1;

  int64_t supply(NodeId v) const;
  int64_t sink_of(NodeId v) const;
};

// Signed flow per edge id, positive in the direction edge.u -> edge.v.
struct Preflow {
  std::unordered_map<EdgeId, int64_t> flow;

  int64_t along(const Graph& g, EdgeId e, NodeId from) const;
  void add(const Graph& g, EdgeId e, NodeId from, int64_t amount);
  int64_t congestion() const;
  // Σ_u f(u, v) for every node touching a nonzero edge.
  NodeMap net_in(const Graph& g) const;
};

struct FlowOutcome {
  Preflow preflow;
  int64_t total_excess = 0;
  std::optional<Cut> cut;
  NodeMap excess;    // positive entries of ex_f w.r.t. the caller's (Δ, T)
  NodeMap absorbed;  // positive entries of ab_f
  int64_t congestion = 0;
  int64_t congestion_bound = 0;  // the routine's stated bound
  Ratio phi_bound;               // stated bound on φ(cut)
  bool phi_strict = true;        // φ(cut) < phi_bound rather than ≤
  int64_t work = 0;              // pushes, relabels and arc scans
  int64_t label_cap = 0;         // final cap used by the last push-relabel run
  int rounds = 0;                // scaling rounds, or almost-flow iterations
  int64_t F_used = 0;

  // Excess scaling: the returned cut has volume ≥ cut_volume_floor, and the
  // flow case has total_excess ≤ τ|Δ|. cut_volume_floor = τ|Δ| / (4 μ_j L)
  // where L = max(⌈log2 m⌉, number of scaling levels).
  Ratio cut_volume_floor;
  int64_t log_term = 0;  // L above
  // Almost flow: per-iteration absorb functions and the residual supply when a cut stops it.
  std::vector<NodeMap> round_absorbed;
  int64_t residual_supply = 0;
};

// Push-relabel core against sink deg(v) everywhere: node capacity w·deg(v),
// edge capacity U, labels capped at label_cap (raised towards n when no level
// cut qualifies). Exposed for tests of the core invariants.
struct CoreParams {
  int64_t w = 2;
  int64_t U = 1;
  int64_t label_cap = 1;
  Ratio phi_bound;
  bool strict = true;
};
struct CoreResult {
  Preflow f;
  NodeMap mass;  // f'(v) = Δ'(v) + inflow, for touched nodes
  NodeMap excess;
  int64_t total_excess = 0;
  std::optional<std::vector<NodeId>> cut;
  int64_t work = 0;
  int64_t label_cap = 0;
};
CoreResult push_relabel(const Graph& g, const NodeMap& supply, const CoreParams& p);

// Requires T = deg everywhere.
FlowOutcome unit_flow(const FlowInstance& inst);
FlowOutcome extended_unit_flow(const FlowInstance& inst);
FlowOutcome excess_scaling_flow(const Graph& g, int64_t F, const NodeMap& source, const NodeMap& sink, Ratio tau,
                                int64_t U, int64_t h);
FlowOutcome almost_flow(const Graph& g, int64_t F, const NodeMap& source, const NodeMap& sink, int64_t U, int64_t h);

// 41·h·⌈log2(2m)⌉, saturating.
int64_t unit_flow_label_cap(int64_t h, int64_t m);
int64_t ceil_log2(int64_t x);

}  // namespace dmsf
