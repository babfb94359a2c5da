#pragma once

#include "dmsf/graph.hpp"
#include "dmsf/msf.hpp"

#include <boost/multiprecision/cpp_int.hpp>

#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace dmsf {

// Pruning parameters shrink far below what int64 rationals can hold.
using BigRatio = boost::multiprecision::cpp_rational;

struct OneShotConfig {
  BigRatio alpha_b;
  BigRatio eps{1, 2};
  // Multiplier on the time-limit formula; the limit is in work units.
  int64_t time_factor = 64;
};

// Published constants of one one-shot run. s_bar[ℓ-1] and alpha[ℓ-1] hold
// the level-ℓ threshold and conductance, ℓ = 1..L.
struct OneShotParams {
  BigRatio alpha_b, sigma, eps;
  BigRatio c_size, c_con;  // worst-case LBS ratios at σ = α_b/2
  int levels = 1;
  std::vector<double> s_bar;
  std::vector<BigRatio> alpha;
  BigRatio guarantee;  // α_L = α_b / (5 c_con^(L-1))
  int64_t time_limit = 0;
};

OneShotParams one_shot_params(const OneShotConfig& cfg, int64_t num_deleted, int64_t max_degree, int64_t m);

enum class PruneStatus { kPruned, kLowConductance };
enum class FailReason { kNone, kVolumeCheck, kTimeLimit };

struct OneShotResult {
  PruneStatus status = PruneStatus::kPruned;
  FailReason reason = FailReason::kNone;
  std::vector<NodeId> pruned;               // sorted
  std::vector<std::vector<NodeId>> pieces;  // cut sets in the order they were removed
  OneShotParams params;
  int64_t work = 0;
  int lbs_calls = 0;
};

// Resumable one-shot pruning on g, where g carries the deleted set D as
// tombstoned edges (the before graph is g plus D). step() runs LBS calls
// until the work budget is spent; the last call may overshoot.
class OneShotPruner {
 public:
  OneShotPruner(Graph g, std::vector<EdgeId> deleted, const OneShotConfig& cfg);

  // True once finished.
  bool step(int64_t budget);
  bool done() const { return done_; }
  // Runs to completion (bounded by the time limit).
  const OneShotResult& finish();
  const OneShotResult& result() const { return res_; }
  const Graph& graph() const { return g_; }

 private:
  void fail(FailReason r);

  Graph g_;
  std::vector<char> in_a_;   // endpoints of D
  std::vector<char> alive_;  // V_H
  int level_ = 1;
  bool done_ = false;
  OneShotResult res_;
};

// Throws invalid_argument if some id in deleted is alive in g or out of range.
OneShotResult one_shot_prune(const Graph& g, const std::vector<EdgeId>& deleted, const OneShotConfig& cfg);

struct DynamicPrunerConfig {
  BigRatio eps{1, 2};        // α0 = 1 / ⌈n^eps⌉
  std::optional<BigRatio> alpha0;  // overrides the formula
  std::optional<int> levels;       // overrides ℓ
  int64_t time_factor = 64;
  std::optional<int64_t> max_deletions;  // default ⌊α0² m⌋, at least 1
};

struct PruneStep {
  std::vector<NodeId> added;  // nodes newly in P, sorted
  bool halted = false;        // some Prune call reported low conductance
  bool failed = false;        // halted, or the connectivity check failed
  int64_t work = 0;
};

// Level count from ε: ⌈log(1/ε) / (2 log log(1/ε))⌉, at least 2.
int dynamic_levels(double eps);

class DynamicPruner {
 public:
  DynamicPruner(Graph g0, const DynamicPrunerConfig& cfg);

  PruneStep erase(EdgeId e);

  const Graph& graph() const { return g_; }
  const std::vector<char>& in_p() const { return in_p_; }
  std::vector<NodeId> pruning_set() const;
  int levels() const { return ell_; }
  int64_t period(int i) const { return d_.at(static_cast<size_t>(i)); }
  const BigRatio& alpha(int i) const { return alpha_.at(static_cast<size_t>(i)); }
  const BigRatio& delta() const { return delta_; }
  int64_t time() const { return tau_; }
  int64_t max_deletions() const { return max_deletions_; }
  bool halted() const { return halted_; }
  // Node set of X^i as installed, and the time it was installed.
  const std::vector<NodeId>& level_nodes(int i) const { return levels_.at(static_cast<size_t>(i)).nodes; }
  int64_t level_installed_at(int i) const { return levels_.at(static_cast<size_t>(i)).installed_at; }
  // Per-step work budget promised by the schedule: Σ_i ⌈t̄_i / d_i⌉ plus level ℓ+1's limit.
  int64_t step_budget() const { return step_budget_; }
  int64_t work() const { return work_; }

 private:
  struct Level {
    std::vector<NodeId> nodes;  // sorted
    int64_t installed_at = 0;
    int64_t valid_from = 0;  // X^i is an induced expander of the graph since this time
    std::unique_ptr<OneShotPruner> running;
    std::vector<NodeId> base;  // node set the running computation started from
    int64_t started_at = 0;
    int64_t budget = 0;  // per-step share of the time limit
  };
  struct Deletion {
    int64_t time;
    NodeId u, v;
    Weight w;
  };

  void start(int i);
  std::unique_ptr<OneShotPruner> make_prune(const std::vector<NodeId>& nodes, int64_t from,
                                            const BigRatio& alpha_b) const;
  // Records P' into P and returns U − P'; false on a low-conductance report.
  bool absorb(const OneShotResult& r, const std::vector<NodeId>& base, std::vector<NodeId>& out,
              std::vector<NodeId>& added);

  Graph g_;
  DynamicPrunerConfig cfg_;
  int ell_ = 2;
  BigRatio delta_;
  std::vector<int64_t> d_;         // d_0 .. d_{ℓ+1}
  std::vector<BigRatio> alpha_;    // α_0 .. α_ℓ
  std::vector<Level> levels_;      // index 0 .. ℓ+1
  std::vector<Deletion> log_;
  std::vector<char> in_p_;
  int64_t tau_ = 0;
  int64_t max_deletions_ = 1;
  int64_t step_budget_ = 0;
  int64_t work_ = 0;
  bool started_ = false;
  bool halted_ = false;
};

// Exact connectivity over a changing graph; reports whether a node set lies
// in one component.
class ConnectivityBackend {
 public:
  virtual ~ConnectivityBackend() = default;
  virtual void erase(EdgeId e) = 0;
  virtual bool one_component(const Graph& g, const std::vector<char>& excluded) = 0;
  virtual int64_t work() const = 0;
};

// Union-find rebuilt from the current graph on every query.
class UnionFindBackend : public ConnectivityBackend {
 public:
  void erase(EdgeId) override {}
  bool one_component(const Graph& g, const std::vector<char>& excluded) override;
  int64_t work() const override { return work_; }

 private:
  int64_t work_ = 0;
};

// Common interface the engine drives: delete an edge of the pruner's own graph.
class Pruner {
 public:
  virtual ~Pruner() = default;
  virtual PruneStep erase(EdgeId e) = 0;
  virtual const std::vector<char>& in_p() const = 0;
  virtual bool failed() const = 0;
};

class LasVegasPruner : public Pruner {
 public:
  LasVegasPruner(Graph g0, const DynamicPrunerConfig& cfg,
                 std::unique_ptr<ConnectivityBackend> backend = std::make_unique<UnionFindBackend>());
  PruneStep erase(EdgeId e) override;
  const std::vector<char>& in_p() const override { return inner_.in_p(); }
  bool failed() const override { return failed_; }
  const DynamicPruner& inner() const { return inner_; }

 private:
  DynamicPruner inner_;
  std::unique_ptr<ConnectivityBackend> backend_;
  bool failed_ = false;
};

// Test double: P is everything outside the component holding the most
// volume after each deletion. Not local; used to drive the engine's
// incremental paths in unit tests.
class ComponentPruner : public Pruner {
 public:
  explicit ComponentPruner(Graph g0);
  PruneStep erase(EdgeId e) override;
  const std::vector<char>& in_p() const override { return in_p_; }
  bool failed() const override { return false; }

 private:
  Graph g_;
  std::vector<char> in_p_;
};

}  // namespace dmsf
