#pragma once

#include "dmsf/graph.hpp"
#include "dmsf/msf.hpp"

#include <functional>
#include <memory>
#include <optional>
#include <set>
#include <span>
#include <unordered_map>
#include <unordered_set>
#include <vector>

namespace dmsf {

struct ConnectingPath {
  NodeId u = kNoNode, v = kNoNode;
  std::vector<EdgeId> edges;  // in order from u to v
};

// Unique minimal edge-disjoint path system joining the terminals of each
// tree of the forest. A tree holding a single terminal contributes no path.
std::vector<ConnectingPath> connecting_paths(const Graph& g, std::span<const EdgeId> forest,
                                             std::span<const NodeId> terminals);

// (G', F') = Contract_S(G, F). G' lives on compacted nodes: the terminals
// plus the branch nodes of the connecting paths.
struct ContractedPair {
  Graph g;
  std::vector<NodeId> to_original;        // G' node -> original node
  std::vector<EdgeId> forest;             // F', sorted ids of g
  std::vector<EdgeId> original_nontree;   // G' edge -> original non-tree edge, kNoEdge on super edges
  std::vector<int> path_of;               // G' edge -> index into paths, -1 on non-tree edges
  std::vector<ConnectingPath> paths;
  std::unordered_map<EdgeId, EdgeId> cover;  // original tree edge on a path -> its super edge
  std::unordered_map<EdgeId, EdgeId> image;  // original non-tree edge -> its G' edge
  std::unordered_map<NodeId, NodeId> node_image;
  int64_t work = 0;
};

// Throws invalid_argument if forest is not an acyclic set of alive edges or
// if some non-tree edge has an endpoint outside terminals.
ContractedPair contract(const Graph& g, std::span<const EdgeId> forest, std::span<const NodeId> terminals);

// Phase one: keeps a forest under link and cut. Phase two: given non-tree
// edges N, contracts (V, F ∪ N) with S = end(N) and answers cover queries
// against the frozen forest.
class TwoPhaseContractor {
 public:
  explicit TwoPhaseContractor(int n = 0);

  void link(EdgeId e, NodeId u, NodeId v, Weight w);
  void cut(EdgeId e);
  bool has_edge(EdgeId e) const { return edges_.count(e) != 0; }
  size_t forest_size() const { return edges_.size(); }
  int num_nodes() const { return static_cast<int>(adj_.size()); }

  bool in_second_phase() const { return second_; }
  // nontree refers to edges of g; the forest is the contractor's own.
  const ContractedPair& contract(const Graph& g, std::span<const EdgeId> nontree);
  // Super edge of the contracted graph covering tree edge e, if e lies on a
  // connecting path. logic_error in phase one.
  std::optional<EdgeId> cover_query(EdgeId e) const;
  const ContractedPair& pair() const;
  // Drops the phase-two data and returns to phase one on the frozen forest.
  void release();

  int64_t work() const { return work_; }

 private:
  struct TreeEdge {
    NodeId u, v;
    Weight w;
  };
  friend ContractedPair contract(const Graph&, std::span<const EdgeId>, std::span<const NodeId>);
  friend std::vector<ConnectingPath> connecting_paths(const Graph&, std::span<const EdgeId>, std::span<const NodeId>);
  ContractedPair build(const Graph& g, std::span<const EdgeId> nontree, std::span<const NodeId> terminals) const;
  void detach(NodeId x, EdgeId e);

  std::vector<std::vector<std::pair<NodeId, EdgeId>>> adj_;
  std::unordered_map<EdgeId, TreeEdge> edges_;
  bool second_ = false;
  ContractedPair pair_;
  int64_t work_ = 0;
};

using DecrementalFactory = std::function<std::unique_ptr<DecrementalMsf>(Graph)>;
DecrementalFactory multigraph_factory();

// Which case of a deletion's effect on (G', F') applied.
enum class ChangeCase { kAbsent, kNonTree, kUncovered, kCoveredCut, kCoveredSwap };

// Decremental MSF of G_ij = (V, F ∪ N) run on its contraction. The forest
// part of G_ij is the contractor's frozen forest; the contractor must stay in
// phase two for the lifetime of the instance.
class ContractedMsf {
 public:
  ContractedMsf(const Graph& g, std::vector<EdgeId> nontree, TwoPhaseContractor* contractor,
                const DecrementalFactory& make);

  // e is an edge of the caller's graph, deleted there once. Returns the
  // change of msf(G_ij) in original ids.
  MsfDelta erase(EdgeId e);
  ChangeCase last_case() const { return last_; }

  const std::unordered_set<EdgeId>& nontree() const { return nontree_; }
  bool in_forest(EdgeId e) const;
  const DecrementalMsf& inner() const { return *inner_; }
  const ContractedPair& pair() const { return contractor_->pair(); }
  // Original edges behind a live G' edge.
  std::vector<EdgeId> covered_by(EdgeId contracted) const;
  TwoPhaseContractor* contractor() const { return contractor_; }
  int64_t work() const { return work_ + inner_->work(); }

 private:
  std::optional<EdgeId> cover_of(EdgeId e) const;

  TwoPhaseContractor* contractor_;
  std::unique_ptr<DecrementalMsf> inner_;
  std::unordered_set<EdgeId> nontree_;
  std::unordered_map<EdgeId, EdgeId> swapped_in_;  // non-tree edge now in the forest -> its G' edge
  std::unordered_set<EdgeId> gone_;                 // frozen forest edges already deleted
  ChangeCase last_ = ChangeCase::kAbsent;
  int64_t work_ = 0;
};

struct FewNonTreeConfig {
  int64_t k = 0;   // bound on the number of non-tree edges
  int64_t B = 1;   // largest insertion batch
  double p = 0.01;
  DecrementalFactory inner;  // default: multigraph_factory()
  int contractors_per_level = 6;
};

struct BatchEdge {
  NodeId u, v;
  Weight w;
};

// Fully dynamic MSF for graphs with at most k non-tree edges, handling a
// batch of at most B insertions or one deletion per step.
class FewNonTreeMsf : public DecrementalMsf {
 public:
  FewNonTreeMsf(Graph g, FewNonTreeConfig cfg);
  ~FewNonTreeMsf() override;

  const Graph& graph() const override { return g_; }
  bool in_forest(EdgeId e) const override { return tree_.count(e) != 0; }
  std::vector<EdgeId> forest() const override { return {tree_.begin(), tree_.end()}; }
  MsfDelta erase(EdgeId e) override;
  // Returns the new edge ids (in batch order) and the forest change.
  std::pair<std::vector<EdgeId>, MsfDelta> insert_batch(std::span<const BatchEdge> batch);
  int64_t work() const override { return work_; }
  int64_t last_work() const { return last_work_; }

  int levels() const { return L_; }
  int64_t time() const { return tau_; }
  double p_prime() const { return p_prime_; }
  // B ≥ 5⌈log2 k⌉, which the level-0 size bound relies on.
  bool batch_precondition() const { return cfg_.B >= 5 * L_; }
  size_t num_nontree() const { return static_cast<size_t>(g_.num_edges()) - tree_.size(); }

  struct SlotInfo {
    int level, slot;
    size_t nontree;
  };
  std::vector<SlotInfo> slots() const;
  // Sorted union (with repeats) of the non-tree sets of all live instances.
  std::vector<EdgeId> nontree_union() const;
  // Builders that were short of a ready contractor; 0 unless the pool is too small.
  int64_t pool_misses() const { return pool_misses_; }

 private:
  struct Pool;
  struct Builder;

  void forest_link(EdgeId e);
  void forest_cut(EdgeId e);
  void cleanup(std::vector<EdgeId> r);
  std::unique_ptr<ContractedMsf> make_instance(int level, std::vector<EdgeId> nontree);
  void drop(std::unique_ptr<ContractedMsf>& d);
  void start_builder(int level);
  std::unique_ptr<ContractedMsf>& slot(int i, int j) { return slots_[static_cast<size_t>(i)][static_cast<size_t>(j)]; }

  Graph g_;
  FewNonTreeConfig cfg_;
  int L_ = 0;
  double p_prime_ = 0;
  DynamicForest df_;
  std::set<EdgeId> tree_;
  std::vector<std::vector<std::unique_ptr<ContractedMsf>>> slots_;  // [0..L][0..4]
  std::vector<std::unique_ptr<Builder>> builders_;                  // [1..L+1]
  std::unique_ptr<Pool> pool_;
  int64_t tau_ = 0;
  int64_t work_ = 0;
  int64_t last_work_ = 0;
  int64_t pool_misses_ = 0;
};

// Unbounded decremental MSF from one that tolerates phase_length deletions:
// a replacement instance is built from a snapshot every phase_length/2
// deletions and fed the deletions after its snapshot.
class PhasedDecremental : public DecrementalMsf {
 public:
  PhasedDecremental(Graph g, DecrementalFactory make, int64_t phase_length);

  const Graph& graph() const override { return g_; }
  bool in_forest(EdgeId e) const override { return active_->in_forest(e); }
  std::vector<EdgeId> forest() const override { return active_->forest(); }
  MsfDelta erase(EdgeId e) override;
  int64_t work() const override { return work_; }
  int64_t last_work() const { return last_work_; }
  int64_t rebuilds() const { return rebuilds_; }
  int64_t half_phase() const { return half_; }

 private:
  Graph g_;
  DecrementalFactory make_;
  int64_t half_;
  std::unique_ptr<DecrementalMsf> active_, next_;
  int64_t since_switch_ = 0;
  int64_t init_charge_ = 0;  // per-deletion share of building next_
  int64_t work_ = 0, last_work_ = 0, rebuilds_ = 0;
};

DecrementalFactory restricted_from_decremental(DecrementalFactory bounded, int64_t phase_length);

}  // namespace dmsf
