#include "dmsf/pruning.hpp"

#include "dmsf/flow.hpp"
#include "dmsf/lbs.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace dmsf {

namespace {

using boost::multiprecision::cpp_int;

cpp_int ceil_big(const BigRatio& r) {
  cpp_int num = boost::multiprecision::numerator(r), den = boost::multiprecision::denominator(r);
  cpp_int q = num / den;
  if (q * den < num) ++q;
  return q;
}

cpp_int floor_big(const BigRatio& r) {
  return boost::multiprecision::numerator(r) / boost::multiprecision::denominator(r);
}

Ratio to_ratio(const BigRatio& r) {
  cpp_int num = boost::multiprecision::numerator(r), den = boost::multiprecision::denominator(r);
  const cpp_int lim = std::numeric_limits<int64_t>::max();
  if (num > lim || den > lim) throw std::overflow_error("pruning: parameter outside int64 range");
  return Ratio(static_cast<int64_t>(num), static_cast<int64_t>(den));
}

int64_t saturate(double x) {
  if (!(x < 9.0e18)) return std::numeric_limits<int64_t>::max();
  return static_cast<int64_t>(std::ceil(x));
}

}  // namespace

OneShotParams one_shot_params(const OneShotConfig& cfg, int64_t num_deleted, int64_t max_degree, int64_t m) {
  if (cfg.alpha_b <= 0 || cfg.alpha_b > 1) throw std::invalid_argument("one_shot: alpha_b outside (0, 1]");
  if (cfg.eps <= 0 || cfg.eps > 1) throw std::invalid_argument("one_shot: eps outside (0, 1]");
  OneShotParams p;
  p.alpha_b = cfg.alpha_b;
  p.eps = cfg.eps;
  p.sigma = cfg.alpha_b / 2;
  BigRatio F(ceil_big(1 / p.sigma));
  p.c_size = 2 * F / p.sigma;
  // cong ≤ 2hF and α·⌈1/α⌉ ≤ 2 bound the measured 2α·cong/σ by 8F/σ.
  p.c_con = 8 * F / p.sigma;

  const double ab = cfg.alpha_b.convert_to<double>();
  const double eps = cfg.eps.convert_to<double>();
  const double s1 = 2.0 * static_cast<double>(num_deleted) / ab + 1.0;
  p.levels = num_deleted == 0 ? 1 : 1 + static_cast<int>(ceil_big(1 / cfg.eps));
  BigRatio scale = 1;
  for (int l = 1; l <= p.levels; ++l) {
    double s = l == p.levels ? std::min(1.0, std::pow(s1, 1.0 - (l - 1) * eps)) : std::pow(s1, 1.0 - (l - 1) * eps);
    p.s_bar.push_back(s);
    p.alpha.push_back(cfg.alpha_b / (5 * scale));
    scale *= p.c_con;
  }
  p.guarantee = p.alpha.back();

  const double lg = static_cast<double>(std::max<int64_t>(1, ceil_log2(std::max<int64_t>(2, 2 * m))));
  const double d = static_cast<double>(std::max<int64_t>(1, num_deleted));
  double t_lbs = std::max(1.0, static_cast<double>(max_degree) * d / ab / (ab * ab * ab)) * lg * lg;
  double t = static_cast<double>(cfg.time_factor) * std::max(1.0, std::ceil(std::pow(d / ab, eps))) *
             std::ceil((p.c_size / cfg.eps).convert_to<double>()) * t_lbs;
  p.time_limit = saturate(t);
  return p;
}

OneShotPruner::OneShotPruner(Graph g, std::vector<EdgeId> deleted, const OneShotConfig& cfg) : g_(std::move(g)) {
  const int n = g_.num_nodes();
  in_a_.assign(static_cast<size_t>(n), 0);
  alive_.assign(static_cast<size_t>(n), 1);
  std::vector<int64_t> before_degree(static_cast<size_t>(n));
  for (NodeId v = 0; v < n; ++v) before_degree[v] = g_.degree(v);
  for (EdgeId e : deleted) {
    if (e < 0 || e >= g_.edge_capacity()) throw std::invalid_argument("one_shot: unknown deleted edge");
    if (g_.alive(e)) throw std::invalid_argument("one_shot: deleted edge still in the graph");
    in_a_[g_.edge(e).u] = 1;
    in_a_[g_.edge(e).v] = 1;
    ++before_degree[g_.edge(e).u];
    ++before_degree[g_.edge(e).v];
  }
  int64_t max_deg = 0;
  for (int64_t x : before_degree) max_deg = std::max(max_deg, x);
  res_.params = one_shot_params(cfg, static_cast<int64_t>(deleted.size()), max_deg,
                                g_.num_edges() + static_cast<int64_t>(deleted.size()));
}

void OneShotPruner::fail(FailReason r) {
  res_.status = PruneStatus::kLowConductance;
  res_.reason = r;
  done_ = true;
}

bool OneShotPruner::step(int64_t budget) {
  const OneShotParams& p = res_.params;
  int64_t spent = 0;
  while (!done_ && spent < budget) {
    const int64_t start = res_.work;
    // Step 1: B_H is A plus the endpoints of edges leaving V_H.
    std::vector<NodeId> nodes, b;
    int64_t vol_b = 0, vol_rest = 0;
    for (NodeId v = 0; v < g_.num_nodes(); ++v) {
      if (!alive_[v]) continue;
      nodes.push_back(v);
      int64_t dh = 0;
      bool boundary = false;
      for (const Arc& a : g_.adj(v)) {
        if (alive_[a.to]) ++dh;
        else boundary = true;
      }
      if (in_a_[v] || boundary) {
        b.push_back(v);
        vol_b += dh;
      } else {
        vol_rest += dh;
      }
    }
    res_.work += static_cast<int64_t>(b.size()) + 1;
    // Step 2.
    if (BigRatio(vol_rest) < 3 * BigRatio(vol_b) / p.sigma) {
      fail(FailReason::kVolumeCheck);
      break;
    }
    // Step 3.
    if (level_ == p.levels) {
      done_ = true;
      break;
    }
    // Step 4.
    Subgraph h = induced_subgraph(g_, nodes);
    std::vector<NodeId> local(static_cast<size_t>(g_.num_nodes()), kNoNode);
    for (size_t i = 0; i < nodes.size(); ++i) local[nodes[i]] = static_cast<NodeId>(i);
    LbsInstance inst{&h.g, {}, to_ratio(p.sigma), to_ratio(p.alpha[level_ - 1])};
    for (NodeId v : b) inst.a.push_back(local[v]);
    LbsOutcome out = lbs_cut(inst);
    res_.work += out.work;
    ++res_.lbs_calls;
    if (res_.work > p.time_limit) {
      fail(FailReason::kTimeLimit);
      break;
    }
    if (!out.cut) {
      done_ = true;
      break;
    }
    // Step 5.
    double threshold = p.s_bar[level_] / boost::rational_cast<double>(out.c_size);
    if (static_cast<double>(out.cut->volume) >= threshold) {
      std::vector<NodeId> piece;
      for (NodeId x : out.cut->members) {
        NodeId v = h.to_parent[x];
        alive_[v] = 0;
        piece.push_back(v);
        res_.pruned.push_back(v);
      }
      res_.pieces.push_back(std::move(piece));
    } else {
      ++level_;
    }
    spent += res_.work - start;
  }
  if (done_) std::sort(res_.pruned.begin(), res_.pruned.end());
  return done_;
}

const OneShotResult& OneShotPruner::finish() {
  while (!done_) step(std::numeric_limits<int64_t>::max());
  return res_;
}

OneShotResult one_shot_prune(const Graph& g, const std::vector<EdgeId>& deleted, const OneShotConfig& cfg) {
  OneShotPruner p(g, deleted, cfg);
  return p.finish();
}

int dynamic_levels(double eps) {
  if (!(eps > 0) || eps >= 1) return 2;
  double x = 1.0 / eps;
  double ll = std::log(std::log(x));
  if (!(ll > 0)) return 2;
  double l = std::ceil(std::log(x) / (2.0 * ll));
  return std::max(2, static_cast<int>(l));
}

DynamicPruner::DynamicPruner(Graph g0, const DynamicPrunerConfig& cfg) : g_(std::move(g0)), cfg_(cfg) {
  const int n = g_.num_nodes();
  const int64_t m = g_.num_edges();
  const double eps = cfg.eps.convert_to<double>();
  if (cfg.alpha0) {
    if (*cfg.alpha0 <= 0 || *cfg.alpha0 > 1) throw std::invalid_argument("dynamic pruner: alpha0 outside (0, 1]");
    alpha_.push_back(*cfg.alpha0);
  } else {
    alpha_.push_back(BigRatio(1, std::max<int64_t>(1, saturate(std::pow(std::max(1, n), eps)))));
  }
  ell_ = cfg.levels ? *cfg.levels : dynamic_levels(eps);
  if (ell_ < 2) throw std::invalid_argument("dynamic pruner: fewer than 2 levels");
  delta_ = BigRatio(2, ell_);
  d_.push_back(std::max(1, n));
  for (int i = 1; i <= ell_; ++i)
    d_.push_back(i == ell_ ? 1 : std::max<int64_t>(1, saturate(std::pow(std::max(1, n), 1.0 - double(i) / ell_))));
  d_.push_back(1);
  for (int i = 1; i <= ell_; ++i)
    alpha_.push_back(one_shot_params(OneShotConfig{alpha_[i - 1], delta_, cfg.time_factor}, 1, 3, m).guarantee);
  max_deletions_ = cfg.max_deletions
                       ? *cfg.max_deletions
                       : std::max<int64_t>(1, static_cast<int64_t>(floor_big(alpha_[0] * alpha_[0] * m)));

  std::vector<NodeId> all(static_cast<size_t>(n));
  for (NodeId v = 0; v < n; ++v) all[v] = v;
  levels_.resize(static_cast<size_t>(ell_ + 2));
  for (auto& l : levels_) l.nodes = all;
  in_p_.assign(static_cast<size_t>(n), 0);

  const int64_t max_deg = std::max<int64_t>(1, g_.max_degree());
  auto add = [&](int64_t x) { step_budget_ = x > std::numeric_limits<int64_t>::max() - step_budget_
                                                ? std::numeric_limits<int64_t>::max()
                                                : step_budget_ + x; };
  for (int i = 1; i <= ell_; ++i) {
    int64_t t = one_shot_params(OneShotConfig{alpha_[i - 1], delta_, cfg.time_factor}, 2 * d_[i - 1], max_deg, m)
                    .time_limit;
    add(t / d_[i] + 1);
  }
  add(one_shot_params(OneShotConfig{alpha_[ell_], delta_, cfg.time_factor}, 1, max_deg, m).time_limit);
}

std::vector<NodeId> DynamicPruner::pruning_set() const {
  std::vector<NodeId> out;
  for (NodeId v = 0; v < g_.num_nodes(); ++v)
    if (in_p_[v]) out.push_back(v);
  return out;
}

std::unique_ptr<OneShotPruner> DynamicPruner::make_prune(const std::vector<NodeId>& nodes, int64_t from,
                                                         const BigRatio& alpha_b) const {
  Subgraph sub = induced_subgraph(g_, nodes);
  std::vector<NodeId> local(static_cast<size_t>(g_.num_nodes()), kNoNode);
  for (size_t i = 0; i < nodes.size(); ++i) local[nodes[i]] = static_cast<NodeId>(i);
  std::vector<EdgeId> deleted;
  for (const Deletion& d : log_) {
    if (d.time <= from || local[d.u] == kNoNode || local[d.v] == kNoNode) continue;
    EdgeId id = sub.g.add_edge(local[d.u], local[d.v], d.w);
    sub.g.remove_edge(id);
    deleted.push_back(id);
  }
  return std::make_unique<OneShotPruner>(std::move(sub.g), std::move(deleted),
                                         OneShotConfig{alpha_b, delta_, cfg_.time_factor});
}

void DynamicPruner::start(int i) {
  Level& l = levels_[i];
  const Level& src = levels_[i - 1];
  l.base = src.nodes;
  l.started_at = tau_;
  l.running = make_prune(src.nodes, src.valid_from, alpha_[i - 1]);
  l.budget = std::max<int64_t>(1, l.running->result().params.time_limit / d_[i]);
}

bool DynamicPruner::absorb(const OneShotResult& r, const std::vector<NodeId>& base, std::vector<NodeId>& out,
                           std::vector<NodeId>& added) {
  if (r.status == PruneStatus::kLowConductance) return false;
  std::vector<char> gone(base.size(), 0);
  for (NodeId x : r.pruned) {
    gone[x] = 1;
    NodeId v = base[x];
    if (!in_p_[v]) {
      in_p_[v] = 1;
      added.push_back(v);
    }
  }
  out.clear();
  for (size_t x = 0; x < base.size(); ++x)
    if (!gone[x]) out.push_back(base[x]);
  return true;
}

PruneStep DynamicPruner::erase(EdgeId e) {
  PruneStep st;
  if (!g_.alive(e)) throw std::invalid_argument("dynamic pruner: edge not alive");
  if (halted_) {
    g_.remove_edge(e);
    st.halted = st.failed = true;
    return st;
  }
  if (tau_ >= max_deletions_) throw std::length_error("dynamic pruner: deletion budget exhausted");
  const int64_t w0 = work_;
  auto tally = [&](OneShotPruner& p, auto&& run) {
    int64_t before = p.result().work;
    run();
    work_ += p.result().work - before;
  };
  if (!started_) {
    started_ = true;
    for (int i = 1; i <= ell_; ++i) start(i);
  }
  ++tau_;
  log_.push_back(Deletion{tau_, g_.edge(e).u, g_.edge(e).v, g_.weight(e)});
  g_.remove_edge(e);

  for (int i = 1; i <= ell_; ++i) {
    Level& l = levels_[i];
    tally(*l.running, [&] { l.running->step(l.budget); });
  }
  auto halt = [&] {
    halted_ = true;
    st.halted = st.failed = true;
    std::sort(st.added.begin(), st.added.end());
    st.work = work_ - w0;
    return st;
  };
  for (int i = 1; i <= ell_; ++i) {
    if (tau_ % d_[i] != 0) continue;
    Level& l = levels_[i];
    tally(*l.running, [&] { l.running->finish(); });
    std::vector<NodeId> out;
    if (!absorb(l.running->result(), l.base, out, st.added)) return halt();
    l.nodes = std::move(out);
    l.installed_at = tau_;
    l.valid_from = l.started_at;
    start(i);
  }
  {
    const Level& x = levels_[ell_];
    auto p = make_prune(x.nodes, x.valid_from, alpha_[ell_]);
    tally(*p, [&] { p->finish(); });
    std::vector<NodeId> out;
    if (!absorb(p->result(), x.nodes, out, st.added)) return halt();
    Level& top = levels_[ell_ + 1];
    top.nodes = std::move(out);
    top.installed_at = top.valid_from = tau_;
  }
  std::sort(st.added.begin(), st.added.end());
  st.work = work_ - w0;
  return st;
}

bool UnionFindBackend::one_component(const Graph& g, const std::vector<char>& excluded) {
  UnionFind uf(g.num_nodes());
  for (EdgeId e = 0; e < g.edge_capacity(); ++e)
    if (g.alive(e)) uf.unite(g.edge(e).u, g.edge(e).v);
  work_ += g.num_nodes() + g.edge_capacity();
  int root = -1;
  for (NodeId v = 0; v < g.num_nodes(); ++v) {
    if (excluded[v]) continue;
    int r = uf.find(v);
    if (root < 0) root = r;
    else if (r != root) return false;
  }
  return true;
}

LasVegasPruner::LasVegasPruner(Graph g0, const DynamicPrunerConfig& cfg, std::unique_ptr<ConnectivityBackend> backend)
    : inner_(std::move(g0), cfg), backend_(std::move(backend)) {}

PruneStep LasVegasPruner::erase(EdgeId e) {
  PruneStep st = inner_.erase(e);
  backend_->erase(e);
  if (st.halted || !backend_->one_component(inner_.graph(), inner_.in_p())) failed_ = true;
  st.failed = failed_;
  return st;
}

ComponentPruner::ComponentPruner(Graph g0) : g_(std::move(g0)), in_p_(static_cast<size_t>(g_.num_nodes()), 0) {}

PruneStep ComponentPruner::erase(EdgeId e) {
  if (!g_.alive(e)) throw std::invalid_argument("component pruner: edge not alive");
  g_.remove_edge(e);
  PruneStep st;
  const int n = g_.num_nodes();
  std::vector<int> comp(static_cast<size_t>(n), -1);
  std::vector<int64_t> weight;
  std::vector<NodeId> stack;
  for (NodeId s = 0; s < n; ++s) {
    if (comp[s] >= 0) continue;
    int c = static_cast<int>(weight.size());
    weight.push_back(0);
    comp[s] = c;
    stack.push_back(s);
    while (!stack.empty()) {
      NodeId x = stack.back();
      stack.pop_back();
      if (!in_p_[x]) weight[c] += 1 + g_.degree(x);
      ++st.work;
      for (const Arc& a : g_.adj(x)) {
        ++st.work;
        if (comp[a.to] < 0) {
          comp[a.to] = c;
          stack.push_back(a.to);
        }
      }
    }
  }
  int best = 0;
  for (int c = 1; c < static_cast<int>(weight.size()); ++c)
    if (weight[c] > weight[best]) best = c;
  for (NodeId v = 0; v < n; ++v) {
    if (comp[v] != best && !in_p_[v]) {
      in_p_[v] = 1;
      st.added.push_back(v);
    }
  }
  return st;
}

}  // namespace dmsf
