#pragma once

#include "dmsf/contraction.hpp"
#include "dmsf/decomposition.hpp"
#include "dmsf/graph.hpp"
#include "dmsf/msf.hpp"
#include "dmsf/pruning.hpp"

#include <functional>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace dmsf {

enum class PrunerKind { kLasVegas, kComponent };

struct EngineConfig {
  double p = 0.01;
  // Sub-instances with at most this many edges run on MultigraphMsf.
  int64_t base_case_edges = 4096;
  std::shared_ptr<const ExpansionDecomposer> decomposer;  // default RecursiveCutDecomposer
  PrunerKind pruner = PrunerKind::kLasVegas;
  std::optional<int64_t> deletion_budget;  // overrides T(m)
  std::optional<BigRatio> alpha0;          // overrides the decomposition's conductance guarantee
  int64_t c_B = 1;
  // Per-update work allowed to any sub-engine; an overrun is a failure.
  std::optional<int64_t> work_budget;
  bool auto_restart = true;
  // Compare against Kruskal after every update and throw logic_error on a mismatch.
  bool self_check = false;
  // Called with the 1-based deletion count of the current build; true forces a failure.
  std::function<bool(int64_t)> inject_failure;
  uint64_t seed = 1;
  int depth = 0;  // recursion depth of this instance, set by the parent
  // Shared by an engine and its sub-instances: the deepest level built so far.
  std::shared_ptr<int> depth_probe;
};

struct EngineParams {
  double gamma = 1;
  Ratio alpha{1};
  int d = 3;
  int64_t s_low = 1, s_high = 1;
  BigRatio alpha0{1};
  int64_t pi = 1;  // largest per-update step budget over the pruners
  int64_t B = 1;
  int64_t T = 1;
  double p = 0.01;
};

// Parameters for a core graph of n nodes and m edges, before π is known.
EngineParams engine_params(int n, int64_t m, const EngineConfig& cfg, const ExpansionDecomposer& dec);

struct EngineFailure : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct BudgetExhausted : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct CompressedCluster {
  int cluster = -1;
  std::vector<int> large_children, small_children;
  std::vector<NodeId> super_of;  // index into the node list of C, -1 off large children
  int num_super = 0;
  std::vector<EdgeId> m_small;  // M_small(C)
  std::vector<EdgeId> own;      // E^C − incident(U)
  std::vector<EdgeId> part[4];  // part[i] = E_i for i = 1..3
  std::vector<EdgeId> incident;  // incident^C(U)
};

// Split of the own edges of large cluster c of h with respect to U, using
// m_small as the small children's forests. U must lie in the large children.
CompressedCluster compressed_cluster(const Hierarchy& h, int c, std::span<const EdgeId> m_small,
                                     std::span<const NodeId> u);

struct EngineStats {
  int64_t deletions = 0;
  int64_t restarts = 0;
  int64_t failures = 0;  // restarts caused by a failure
  int64_t budget_restarts = 0;
  int64_t pruner_failures = 0;
  int64_t overrun_failures = 0;
  int64_t injected_failures = 0;
  int depth = 0;  // deepest engine instance below and including this one
  int64_t h_edges = 0, h_nontree = 0;
  int64_t h_nontree_max = 0;
  int64_t last_h_deletions = 0, last_h_insertions = 0;
  int64_t max_h_deletions = 0, max_h_insertions = 0;
  int64_t junk = 0, incident = 0, reweighted = 0;
  int64_t sparsity_violations = 0, churn_violations = 0;
  double sparsity_bound = 0;   // c_H · n / γ
  double sparsity_terms = 0;   // |E≠| + 3(3n/s_low + T) + |incident| + |J|
  int64_t small_clusters = 0, large_clusters = 0;
  int64_t work = 0, last_work = 0;
};

inline constexpr double kSketchConstant = 18;  // c_H

// Decremental MSF on an arbitrary multigraph. Components are joined by heavy virtual edges, and degrees are reduced to 3
// before the core runs.
class DynamicMsfEngine : public DecrementalMsf {
 public:
  DynamicMsfEngine(Graph g, EngineConfig cfg = {});
  ~DynamicMsfEngine() override;

  const Graph& graph() const override { return g_; }
  bool in_forest(EdgeId e) const override;
  std::vector<EdgeId> forest() const override;
  MsfDelta erase(EdgeId e) override;
  int64_t work() const override { return work_; }

  // Fresh preprocessing on the current graph; the delta against the old forest.
  MsfDelta restart();

  const EngineParams& params() const;
  EngineStats stats() const;
  std::string stats_json() const;
  const Hierarchy* hierarchy() const;  // nullptr when the core has no edges
  int64_t deletions_left() const;

 private:
  struct Core;
  void build();
  MsfDelta to_caller(const MsfDelta& core) const;
  MsfDelta reconcile(const std::vector<char>& before);

  Graph g_;
  EngineConfig cfg_;
  std::unique_ptr<Core> core_;
  std::vector<EdgeId> from_caller_;
  std::vector<char> forest_;  // caller edge -> in forest
  EngineStats totals_;
  int64_t work_ = 0;
};

// Factory for sub-instances: MultigraphMsf at or below the base case,
// otherwise a DynamicMsfEngine one level deeper.
DecrementalFactory engine_factory(EngineConfig cfg);

}  // namespace dmsf
