#pragma once

#include "dmsf/engine.hpp"
#include "dmsf/graph.hpp"

#include <cstdint>
#include <iosfwd>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace dmsf::harness {

// Graph file: "n m seed" then m lines "u v w". Weights are distinct ranks.
struct GraphFile {
  int n = 0;
  uint64_t seed = 0;
  struct E {
    NodeId u, v;
    int64_t w;
  };
  std::vector<E> edges;
  Graph to_graph() const;
};

struct TraceOp {
  enum Kind { kDelete, kBatch } kind = kDelete;
  NodeId u = 0, v = 0;                // kDelete
  std::vector<GraphFile::E> inserts;  // kBatch; a bare I line is a batch of one
};

// Trace file: "n m seed" then records "D u v", "I u v w", "B k" + k I lines.
// D u v removes the oldest alive u-v edge.
struct Trace {
  int n = 0;
  int64_t m = 0;
  uint64_t seed = 0;
  std::vector<TraceOp> ops;
  int64_t insertions() const;
  int64_t max_batch() const;
};

void write_graph(std::ostream& os, const GraphFile& g);
GraphFile read_graph(std::istream& is);
void write_trace(std::ostream& os, const Trace& t);
Trace read_trace(std::istream& is);
std::string describe(const TraceOp& op);

struct GenOptions {
  std::string model = "random-3-regular";  // random-3-regular | barbell | cycle | er
  int n = 64;
  uint64_t seed = 1;
  int64_t ops = 0;
  double insert_fraction = 0.25;
  int max_batch = 4;
  double er_p = 0;  // 0 picks 6/n
};
std::pair<GraphFile, Trace> generate(const GenOptions& o);

enum class EngineKind { kDynMsf, kFewNonTree, kOracle };
std::optional<EngineKind> parse_engine(const std::string& s);

struct RunOptions {
  EngineKind engine = EngineKind::kDynMsf;
  EngineConfig cfg;  // for kDynMsf
  // 0: forest only; 1: also delta consistency; 2: also engine self-checks and monitors.
  int assert_level = 1;
  // Corrupt the first replacement reported at or after this step (1-based).
  std::optional<int64_t> fault_step;
};

// Assertion level from DMSF_ASSERT, default 1.
int assert_level_from_env();

// Drives one engine over a trace, keeping ids in trace order: initial edges
// 0..m-1, then inserted edges in the order they appear.
class Runner {
 public:
  virtual ~Runner() = default;
  virtual MsfDelta erase(EdgeId e) = 0;
  virtual MsfDelta insert(const std::vector<GraphFile::E>& batch) = 0;
  virtual std::vector<EdgeId> forest() const = 0;
  virtual int64_t work() const = 0;
  // Non-empty when an internal monitor of the engine reports a violation.
  virtual std::string monitor() const { return {}; }
  virtual std::string stats_json() const { return "{}"; }
};
std::unique_ptr<Runner> make_runner(const Graph& g, const Trace& t, const RunOptions& o);

struct VerifyReport {
  bool ok = true;
  int64_t steps = 0;
  int64_t first_bad = -1;  // 1-based step, 0 for the initial forest
  std::string message;     // counterexample dump on failure
  std::string stats;       // engine stats at the end
};
VerifyReport verify(const GraphFile& gf, const Trace& t, const RunOptions& o);

struct BenchRow {
  int64_t step = 0;
  std::string op;
  int64_t work = 0;
  int64_t added = 0, removed = 0;
  int64_t wall_p50 = 0, wall_p90 = 0, wall_max = 0;  // nanoseconds across repetitions
};
// Throws if the work columns differ between repetitions.
std::vector<BenchRow> bench(const GraphFile& gf, const Trace& t, const RunOptions& o, int repetitions);
void write_bench_csv(std::ostream& os, const std::vector<BenchRow>& rows);

}  // namespace dmsf::harness
