#pragma once

#include "dmsf/graph.hpp"

#include <cstdint>
#include <iosfwd>
#include <memory>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <vector>

namespace dmsf {

using NodePartition = std::vector<std::vector<NodeId>>;

// Connected parts of the tree with s/3 ≤ |part| ≤ s. The tree edges must form a
// forest of max degree 3; a component with fewer than s/3 nodes stays whole.
// Parts are sorted; the part list is ordered by smallest member.
NodePartition frederickson_group(const Graph& g, std::span<const EdgeId> tree, int64_t s, int64_t* work = nullptr);
NodePartition frederickson_group(const Graph& tree, int64_t s);

struct InnerDecomposition {
  std::vector<int> label;  // node -> part index
  int parts = 0;
  int64_t crossing = 0;
  bool certified = true;  // every part checked to have expansion ≥ the parameter
  int64_t work = 0;
};

// Partition of a multigraph into parts of expansion at least `expansion`, with
// few crossing edges. Self-loops are ignored.
class ExpansionDecomposer {
 public:
  virtual ~ExpansionDecomposer() = default;
  virtual InnerDecomposition decompose(const Graph& g, Ratio expansion, double p, std::mt19937_64& rng) const = 0;
  // Published bound: crossing ≤ expansion · gamma(n) · n.
  virtual double gamma(int n) const = 0;
  virtual std::string name() const = 0;
};

// Recursive most-balanced sparse cut. Graphs up to exact_cap nodes are cut by
// enumeration; larger ones by sweep and flow-based candidate cuts, which only
// split when the candidate beats the parameter.
class RecursiveCutDecomposer : public ExpansionDecomposer {
 public:
  explicit RecursiveCutDecomposer(int exact_cap = 16, int sweep_seeds = 8) : exact_cap_(exact_cap), seeds_(sweep_seeds) {}
  InnerDecomposition decompose(const Graph& g, Ratio expansion, double p, std::mt19937_64& rng) const override;
  double gamma(int n) const override;
  std::string name() const override { return "recursive-cut"; }

 private:
  int exact_cap_, seeds_;
};

struct ExactSparseCut {
  std::vector<NodeId> side;  // sorted, the smaller side by node count
  Ratio expansion;
};
// Most balanced cut of expansion below `below` (by min side size, then lowest
// expansion, then lexicographic side), for graphs up to 20 nodes.
std::optional<ExactSparseCut> most_balanced_sparse_cut(const Graph& g, Ratio below);

struct RespectingDecomposition {
  NodePartition parts;  // each sorted; ordered by smallest member
  int64_t crossing = 0;
  double gamma = 1;  // the inner decomposer's published value at this size
  bool certified = true;
  int64_t work = 0;
};

// Contract the parts of `groups`, decompose the contracted graph with
// expansion parameter s·alpha/3, uncontract, then split disconnected parts.
// groups must partition the nodes of g into connected sets with s/3 ≤ |U| ≤ s.
RespectingDecomposition expansion_decompose_respecting(const Graph& g, const NodePartition& groups, int64_t s,
                                                       Ratio alpha, double p, const ExpansionDecomposer& inner,
                                                       std::mt19937_64& rng);

struct MsfDecompParams {
  double p = 0.01;
  Ratio alpha{1, 10};
  int d = 6;
  int64_t s_low = 12;
  int64_t s_high = 48;
  uint64_t seed = 1;
};

struct Cluster {
  int parent = -1;
  int level = 1;
  bool leaf = true;
  std::vector<int> children;
  std::vector<NodeId> nodes;  // sorted
  std::vector<EdgeId> edges;  // E(C), sorted
  std::vector<EdgeId> own;    // E^C, sorted
  std::vector<EdgeId> band;   // E_i(C) of a non-leaf level-i cluster
  std::vector<EdgeId> cross;  // edges between different parts of the expansion decomposition
  std::vector<int> groups;    // indices into Hierarchy::m_partition
};

struct Hierarchy {
  Graph g;  // the reweighted graph; same ids as the input
  std::vector<Cluster> clusters;  // 0 is the root; parents precede children
  std::vector<EdgeId> reweighted;  // edges whose weight changed, sorted
  NodePartition m_partition;
  std::vector<int> group_of;       // node -> m_partition index
  std::vector<char> m_edge;        // edge -> inside an M-cluster
  std::vector<int> band_of;        // edge -> band index, 0 on M-cluster edges
  std::vector<int> owner;          // edge -> cluster it is own in
  std::vector<int> leaf_of;        // node -> leaf cluster
  MsfDecompParams params;
  double gamma = 1;
  int64_t crossing = 0;
  bool certified = true;
  int64_t work = 0;

  int depth() const;
  // Largest rank of band i+1 and below: reweighted own edges of a level-i
  // cluster get (this, tier 1).
  int64_t band_floor(int i) const;
};

// Throws invalid_argument unless g is connected with max degree 3 and ranks
// form a permutation of 1..m at tier 0, d ≥ 3 and s_high ≥ s_low ≥ 1.
Hierarchy msf_decompose(const Graph& g, const MsfDecompParams& params, const ExpansionDecomposer& inner);
Hierarchy msf_decompose(const Graph& g, const MsfDecompParams& params);

enum class Check { kPass, kFail, kUnchecked };

struct HierarchyReport {
  Check prop[9] = {};  // index 1..8
  // Property 8 read on the cluster's own edge set, and on the subgraph its
  // node set induces in the parent cluster.
  Ratio min_phi_cluster{-1}, min_phi_induced{-1};
  int checked_clusters = 0;
  Ratio phi_bound{0};
  std::vector<std::string> notes;
  bool ok(int i) const { return prop[i] != Check::kFail; }
};

// Property 3 is checked on `deletion_sets` (plus D = ∅). Property 8 is checked
// on non-root clusters with at most 16 nodes.
HierarchyReport verify_hierarchy(const Graph& original, const Hierarchy& h,
                                 std::span<const std::vector<EdgeId>> deletion_sets = {});

// Published lower bound on the induced conductance of non-root clusters when
// the inner decomposer certified its parts: min(1/(6 s), alpha/(108 s)).
Ratio conductance_guarantee(Ratio alpha, int64_t s_low);

// One line per cluster: "level parent |V| |E| |E^C| leaf".
void dump_hierarchy(std::ostream& out, const Hierarchy& h);

}  // namespace dmsf
