// dmsf gen | verify | bench
#include "CLI11.hpp"
#include "harness.hpp"

#include <fstream>
#include <iostream>

using namespace dmsf;
using namespace dmsf::harness;

namespace {

GraphFile load_graph(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  return read_graph(in);
}

Trace load_trace(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  return read_trace(in);
}

struct EngineFlags {
  std::string engine = "dynmsf";
  std::string pruner = "lasvegas";
  std::optional<int64_t> budget;
  int64_t base_case = 4096;
  uint64_t seed = 1;

  void attach(CLI::App* app) {
    app->add_option("--engine", engine, "dynmsf | fewnontree | oracle")->check(CLI::IsMember({"dynmsf", "fewnontree", "oracle"}));
    app->add_option("--pruner", pruner, "lasvegas | component")->check(CLI::IsMember({"lasvegas", "component"}));
    app->add_option("--budget", budget, "deletion budget per build of the engine");
    app->add_option("--base-case", base_case, "sub-instances up to this many edges use the simple engine");
    app->add_option("--seed", seed, "engine seed");
  }
  RunOptions options() const {
    RunOptions o;
    o.engine = *parse_engine(engine);
    o.cfg.pruner = pruner == "component" ? PrunerKind::kComponent : PrunerKind::kLasVegas;
    o.cfg.deletion_budget = budget;
    o.cfg.base_case_edges = base_case;
    o.cfg.seed = seed;
    o.assert_level = assert_level_from_env();
    return o;
  }
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"dynamic minimum spanning forest: generate, verify and benchmark update traces"};
  app.require_subcommand(1);

  GenOptions go;
  std::string out = "out";
  auto* gen = app.add_subcommand("gen", "write <out>.graph and <out>.trace");
  gen->add_option("--model", go.model, "random-3-regular | barbell | cycle | er")
      ->check(CLI::IsMember({"random-3-regular", "barbell", "cycle", "er"}));
  gen->add_option("-n,--n", go.n, "number of nodes");
  gen->add_option("--seed", go.seed);
  gen->add_option("--ops", go.ops, "number of trace records");
  gen->add_option("--insert-fraction", go.insert_fraction, "share of records that are insertion batches");
  gen->add_option("--batch", go.max_batch, "largest insertion batch");
  gen->add_option("--p", go.er_p, "edge probability for er");
  gen->add_option("--out", out, "output prefix");

  std::string graph_path, trace_path;
  EngineFlags vf;
  std::optional<int64_t> fault;
  auto* ver = app.add_subcommand("verify", "replay a trace and compare with Kruskal after every step");
  ver->add_option("graph", graph_path)->required();
  ver->add_option("trace", trace_path)->required();
  vf.attach(ver);
  ver->add_option("--inject-fault", fault, "report a wrong replacement at or after this step");

  EngineFlags bf;
  int reps = 3;
  std::string csv;
  auto* ben = app.add_subcommand("bench", "per-step work units and wall time as CSV");
  ben->add_option("graph", graph_path)->required();
  ben->add_option("trace", trace_path)->required();
  bf.attach(ben);
  ben->add_option("--reps", reps, "repetitions");
  ben->add_option("--out", csv, "CSV path (default stdout)");

  CLI11_PARSE(app, argc, argv);
  try {
    if (*gen) {
      auto [g, t] = generate(go);
      std::ofstream og(out + ".graph"), ot(out + ".trace");
      if (!og || !ot) throw std::runtime_error("cannot write " + out + ".*");
      write_graph(og, g);
      write_trace(ot, t);
      std::cout << "wrote " << out << ".graph (" << g.n << " nodes, " << g.edges.size() << " edges) and " << out
                << ".trace (" << t.ops.size() << " records)\n";
      return 0;
    }
    if (*ver) {
      RunOptions o = vf.options();
      o.fault_step = fault;
      VerifyReport r = verify(load_graph(graph_path), load_trace(trace_path), o);
      if (!r.ok) {
        std::cout << "FAIL first divergence at " << r.message;
        if (r.message.back() != '\n') std::cout << '\n';
        return 1;
      }
      std::cout << "PASS " << r.steps << " steps\n";
      if (r.stats != "{}") std::cout << r.stats << '\n';
      return 0;
    }
    if (*ben) {
      auto rows = bench(load_graph(graph_path), load_trace(trace_path), bf.options(), reps);
      if (csv.empty()) {
        write_bench_csv(std::cout, rows);
      } else {
        std::ofstream oc(csv);
        write_bench_csv(oc, rows);
      }
      return 0;
    }
  } catch (const std::exception& ex) {
    std::cerr << "error: " << ex.what() << '\n';
    return 2;
  }
  return 0;
}
