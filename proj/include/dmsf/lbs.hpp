#pragma once

#include "dmsf/flow.hpp"
#include "dmsf/graph.hpp"

#include <optional>
#include <vector>

namespace dmsf {

struct LbsInstance {
  const Graph* g = nullptr;
  std::vector<NodeId> a;
  Ratio sigma{1};
  Ratio alpha{1};
};

struct LbsOutcome {
  std::optional<Cut> cut;  // empty: no sparse overlapping cut
  Ratio phi;               // φ(cut) when present
  Ratio c_size;
  Ratio c_con;
  int64_t congestion = 0;
  int64_t total_excess = 0;
  int64_t work = 0;
};

// Throws invalid_argument unless 2·vol(A) ≤ vol(V−A), σ ∈ [2·vol(A)/vol(V−A), 1],
// σ > 0 and α ∈ (0, 1].
LbsOutcome lbs_cut(const LbsInstance& inst);

// Largest vol(S) over cuts with vol(S) ≤ vol(V−S), φ(S) < alpha and
// vol(S∩A) ≥ σ·vol(S); 0 if none. Refuses graphs above 14 nodes.
int64_t opt_overlapping_bruteforce(const Graph& g, Ratio alpha, std::span<const NodeId> a, Ratio sigma);

constexpr int kOverlapBruteForceCap = 14;

}  // namespace dmsf
