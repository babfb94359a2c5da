#include "dmsf/contraction.hpp"

#include <algorithm>
#include <cassert>
#include <deque>
#include <map>
#include <stdexcept>

namespace dmsf {

TwoPhaseContractor::TwoPhaseContractor(int n) : adj_(static_cast<size_t>(n)) {}

void TwoPhaseContractor::link(EdgeId e, NodeId u, NodeId v, Weight w) {
  if (second_) throw std::logic_error("TwoPhaseContractor::link: forest is frozen");
  if (u < 0 || v < 0 || u >= num_nodes() || v >= num_nodes() || u == v)
    throw std::invalid_argument("TwoPhaseContractor::link: bad endpoints");
  if (!edges_.emplace(e, TreeEdge{u, v, w}).second) throw std::invalid_argument("TwoPhaseContractor::link: edge present");
  adj_[u].push_back({v, e});
  adj_[v].push_back({u, e});
  ++work_;
}

void TwoPhaseContractor::detach(NodeId x, EdgeId e) {
  auto& a = adj_[x];
  for (size_t i = 0; i < a.size(); ++i)
    if (a[i].second == e) {
      a[i] = a.back();
      a.pop_back();
      return;
    }
}

void TwoPhaseContractor::cut(EdgeId e) {
  if (second_) throw std::logic_error("TwoPhaseContractor::cut: forest is frozen");
  auto it = edges_.find(e);
  if (it == edges_.end()) throw std::invalid_argument("TwoPhaseContractor::cut: edge absent");
  detach(it->second.u, e);
  detach(it->second.v, e);
  work_ += static_cast<int64_t>(adj_[it->second.u].size() + adj_[it->second.v].size()) + 1;
  edges_.erase(it);
}

ContractedPair TwoPhaseContractor::build(const Graph& g, std::span<const EdgeId> nontree,
                                         std::span<const NodeId> terminals) const {
  ContractedPair cp;
  std::vector<NodeId> term(terminals.begin(), terminals.end());
  std::sort(term.begin(), term.end());
  term.erase(std::unique(term.begin(), term.end()), term.end());
  std::unordered_set<NodeId> is_term(term.begin(), term.end());

  // Root every tree holding a terminal at its smallest terminal.
  std::unordered_map<NodeId, int> pos;
  std::vector<NodeId> order;
  std::vector<int> parent;
  std::vector<EdgeId> parent_edge;
  for (NodeId s : term) {
    if (s < 0 || s >= num_nodes()) throw std::invalid_argument("contract: terminal out of range");
    if (pos.count(s)) continue;
    size_t first = order.size();
    pos[s] = static_cast<int>(order.size());
    order.push_back(s);
    parent.push_back(-1);
    parent_edge.push_back(kNoEdge);
    for (size_t i = first; i < order.size(); ++i) {
      NodeId x = order[i];
      for (auto [y, e] : adj_[x]) {
        ++cp.work;
        if (pos.count(y)) continue;
        pos[y] = static_cast<int>(order.size());
        order.push_back(y);
        parent.push_back(static_cast<int>(i));
        parent_edge.push_back(e);
      }
    }
  }
  // An edge is on the Steiner tree iff the side away from the root holds a terminal.
  std::vector<int> below(order.size(), 0), deg(order.size(), 0);
  std::unordered_set<EdgeId> steiner;
  for (size_t i = order.size(); i-- > 0;) {
    below[i] += is_term.count(order[i]) ? 1 : 0;
    if (parent[i] < 0) continue;
    below[static_cast<size_t>(parent[i])] += below[i];
    if (below[i] > 0) {
      steiner.insert(parent_edge[i]);
      ++deg[i];
      ++deg[static_cast<size_t>(parent[i])];
    }
  }
  auto endpoint = [&](NodeId x) { return is_term.count(x) || deg[static_cast<size_t>(pos.at(x))] >= 3; };

  std::vector<NodeId> nodes = term;
  for (size_t i = 0; i < order.size(); ++i)
    if (!is_term.count(order[i]) && deg[i] >= 3) nodes.push_back(order[i]);
  std::sort(nodes.begin(), nodes.end());
  cp.g = Graph(static_cast<int>(nodes.size()));
  cp.to_original = nodes;
  for (size_t i = 0; i < nodes.size(); ++i) cp.node_image[nodes[i]] = static_cast<NodeId>(i);

  std::unordered_set<EdgeId> used;
  for (NodeId z : nodes) {
    for (auto [y0, e0] : adj_[z]) {
      if (!steiner.count(e0) || used.count(e0)) continue;
      ConnectingPath p;
      p.u = z;
      NodeId y = y0;
      EdgeId e = e0;
      while (true) {
        used.insert(e);
        p.edges.push_back(e);
        ++cp.work;
        if (endpoint(y)) break;
        EdgeId next = kNoEdge;
        NodeId ny = kNoNode;
        for (auto [w, f] : adj_[y])
          if (f != e && steiner.count(f)) {
            next = f;
            ny = w;
            break;
          }
        assert(next != kNoEdge);
        e = next;
        y = ny;
      }
      p.v = y;
      Weight heaviest = edges_.at(p.edges.front()).w;
      for (EdgeId f : p.edges) heaviest = std::max(heaviest, edges_.at(f).w);
      EdgeId s = cp.g.add_edge(cp.node_image.at(p.u), cp.node_image.at(p.v), heaviest);
      for (EdgeId f : p.edges) cp.cover[f] = s;
      cp.forest.push_back(s);
      cp.path_of.push_back(static_cast<int>(cp.paths.size()));
      cp.original_nontree.push_back(kNoEdge);
      cp.paths.push_back(std::move(p));
    }
  }
  for (EdgeId e : nontree) {
    const Edge& ed = g.edge(e);
    auto iu = cp.node_image.find(ed.u), iv = cp.node_image.find(ed.v);
    if (iu == cp.node_image.end() || iv == cp.node_image.end())
      throw std::invalid_argument("contract: non-tree edge endpoint is not a terminal");
    EdgeId x = cp.g.add_edge(iu->second, iv->second, ed.w);
    cp.image[e] = x;
    cp.path_of.push_back(-1);
    cp.original_nontree.push_back(e);
  }
  cp.work += static_cast<int64_t>(nontree.size());
  return cp;
}

const ContractedPair& TwoPhaseContractor::contract(const Graph& g, std::span<const EdgeId> nontree) {
  if (second_) throw std::logic_error("TwoPhaseContractor::contract: already in phase two");
  std::vector<NodeId> s;
  for (EdgeId e : nontree) {
    s.push_back(g.edge(e).u);
    s.push_back(g.edge(e).v);
  }
  pair_ = build(g, nontree, s);
  second_ = true;
  work_ += pair_.work;
  return pair_;
}

std::optional<EdgeId> TwoPhaseContractor::cover_query(EdgeId e) const {
  if (!second_) throw std::logic_error("TwoPhaseContractor::cover_query: phase one");
  if (!has_edge(e)) throw std::invalid_argument("TwoPhaseContractor::cover_query: not a forest edge");
  auto it = pair_.cover.find(e);
  if (it == pair_.cover.end()) return std::nullopt;
  return it->second;
}

const ContractedPair& TwoPhaseContractor::pair() const {
  if (!second_) throw std::logic_error("TwoPhaseContractor::pair: phase one");
  return pair_;
}

void TwoPhaseContractor::release() {
  second_ = false;
  pair_ = ContractedPair();
}

std::vector<ConnectingPath> connecting_paths(const Graph& g, std::span<const EdgeId> forest,
                                             std::span<const NodeId> terminals) {
  UnionFind uf(g.num_nodes());
  TwoPhaseContractor c(g.num_nodes());
  for (EdgeId e : forest) {
    if (!g.alive(e)) throw std::invalid_argument("connecting_paths: forest edge not alive");
    if (!uf.unite(g.edge(e).u, g.edge(e).v)) throw std::invalid_argument("connecting_paths: forest has a cycle");
    c.link(e, g.edge(e).u, g.edge(e).v, g.weight(e));
  }
  return c.build(g, {}, terminals).paths;
}

ContractedPair contract(const Graph& g, std::span<const EdgeId> forest, std::span<const NodeId> terminals) {
  UnionFind uf(g.num_nodes());
  TwoPhaseContractor c(g.num_nodes());
  std::unordered_set<EdgeId> in_forest;
  for (EdgeId e : forest) {
    if (!g.alive(e)) throw std::invalid_argument("contract: forest edge not alive");
    if (!uf.unite(g.edge(e).u, g.edge(e).v)) throw std::invalid_argument("contract: forest has a cycle");
    in_forest.insert(e);
    c.link(e, g.edge(e).u, g.edge(e).v, g.weight(e));
  }
  std::vector<EdgeId> nontree;
  for (EdgeId e : g.alive_edges())
    if (!in_forest.count(e)) nontree.push_back(e);
  return c.build(g, nontree, terminals);
}

DecrementalFactory multigraph_factory() {
  return [](Graph g) -> std::unique_ptr<DecrementalMsf> { return std::make_unique<MultigraphMsf>(std::move(g)); };
}

ContractedMsf::ContractedMsf(const Graph& g, std::vector<EdgeId> nontree, TwoPhaseContractor* contractor,
                             const DecrementalFactory& make)
    : contractor_(contractor) {
  const ContractedPair& cp = contractor_->contract(g, nontree);
  work_ += cp.work;
  inner_ = make(cp.g);
  nontree_.insert(nontree.begin(), nontree.end());
  // The frozen forest is msf(G_ij), so F' must come out as msf(G').
  assert(inner_->forest() == cp.forest);
}

std::optional<EdgeId> ContractedMsf::cover_of(EdgeId e) const {
  auto it = swapped_in_.find(e);
  if (it != swapped_in_.end()) return it->second;
  return contractor_->cover_query(e);
}

bool ContractedMsf::in_forest(EdgeId e) const {
  return swapped_in_.count(e) || (contractor_->has_edge(e) && !gone_.count(e));
}

std::vector<EdgeId> ContractedMsf::covered_by(EdgeId x) const {
  const ContractedPair& cp = pair();
  if (cp.path_of.at(static_cast<size_t>(x)) >= 0) return cp.paths[static_cast<size_t>(cp.path_of[x])].edges;
  return {cp.original_nontree[static_cast<size_t>(x)]};
}

MsfDelta ContractedMsf::erase(EdgeId e) {
  MsfDelta out;
  ++work_;
  const ContractedPair& cp = pair();
  if (nontree_.erase(e)) {
    last_ = ChangeCase::kNonTree;
    MsfDelta d = inner_->erase(cp.image.at(e));
    assert(d.empty());
    return out;
  }
  if (!in_forest(e)) {
    last_ = ChangeCase::kAbsent;
    return out;
  }
  out.removed.push_back(e);
  std::optional<EdgeId> c = cover_of(e);
  if (swapped_in_.count(e)) swapped_in_.erase(e);
  else gone_.insert(e);
  if (!c || !inner_->graph().alive(*c)) {
    last_ = ChangeCase::kUncovered;
    return out;
  }
  MsfDelta d = inner_->erase(*c);
  if (d.added.empty()) {
    last_ = ChangeCase::kCoveredCut;
    return out;
  }
  EdgeId fc = d.added.front();
  EdgeId f = cp.original_nontree.at(static_cast<size_t>(fc));
  assert(f != kNoEdge);
  nontree_.erase(f);
  swapped_in_[f] = fc;
  out.added.push_back(f);
  last_ = ChangeCase::kCoveredSwap;
  return out;
}

// Contractors per level. A ready contractor follows the live forest; an
// occupied one is frozen in phase two; a free one replays the forest changes
// it missed, spread over the level's period.
struct FewNonTreeMsf::Pool {
  enum class State { kReady, kOccupied, kFree };
  struct Entry {
    std::unique_ptr<TwoPhaseContractor> c;
    State state = State::kReady;
    int64_t freed_at = 0;
    std::map<EdgeId, int> diff;  // +1 link pending, -1 cut pending
  };
  std::vector<std::vector<Entry>> levels;

  Entry* find(TwoPhaseContractor* c) {
    for (auto& lv : levels)
      for (auto& en : lv)
        if (en.c.get() == c) return &en;
    return nullptr;
  }
  int level_of(TwoPhaseContractor* c) const {
    for (size_t i = 0; i < levels.size(); ++i)
      for (const auto& en : levels[i])
        if (en.c.get() == c) return static_cast<int>(i);
    return -1;
  }
};

struct FewNonTreeMsf::Builder {
  int64_t start = 0;
  std::unique_ptr<ContractedMsf> d;
  std::deque<EdgeId> queue;  // deletions since start not yet fed
  int64_t share = 0;         // per-step share of the build work during the first half
};

FewNonTreeMsf::FewNonTreeMsf(Graph g, FewNonTreeConfig cfg)
    : g_(std::move(g)), cfg_(std::move(cfg)), df_(g_.num_nodes()), pool_(std::make_unique<Pool>()) {
  if (!cfg_.inner) cfg_.inner = multigraph_factory();
  if (cfg_.k < 0 || cfg_.B < 1) throw std::invalid_argument("FewNonTreeMsf: k < 0 or B < 1");
  while ((int64_t{1} << L_) < cfg_.k) ++L_;
  p_prime_ = cfg_.p / (8.0 * std::max(1, L_));
  for (EdgeId e : g_.alive_edges())
    if (g_.edge(e).u == g_.edge(e).v) throw std::invalid_argument("FewNonTreeMsf: self-loop");
  std::vector<EdgeId> f = kruskal(g_);
  if (g_.num_edges() - static_cast<int64_t>(f.size()) > cfg_.k)
    throw std::invalid_argument("FewNonTreeMsf: more than k non-tree edges");
  for (EdgeId e : f) {
    df_.link(g_.edge(e).u, g_.edge(e).v, e, g_.weight(e));
    tree_.insert(e);
  }
  pool_->levels.resize(static_cast<size_t>(L_ + 2));
  for (auto& lv : pool_->levels)
    for (int j = 0; j < cfg_.contractors_per_level; ++j) {
      Pool::Entry en;
      en.c = std::make_unique<TwoPhaseContractor>(g_.num_nodes());
      for (EdgeId e : f) en.c->link(e, g_.edge(e).u, g_.edge(e).v, g_.weight(e));
      lv.push_back(std::move(en));
    }
  slots_.resize(static_cast<size_t>(L_ + 1));
  for (auto& s : slots_) s.resize(5);
  std::vector<EdgeId> n0;
  std::unordered_set<EdgeId> fs(f.begin(), f.end());
  for (EdgeId e : g_.alive_edges())
    if (!fs.count(e)) n0.push_back(e);
  slot(L_, 0) = make_instance(L_, n0);
  builders_.resize(static_cast<size_t>(L_ + 2));
  for (int i = 1; i <= L_ + 1; ++i) start_builder(i);
  work_ += df_.work();
}

FewNonTreeMsf::~FewNonTreeMsf() = default;

std::unique_ptr<ContractedMsf> FewNonTreeMsf::make_instance(int level, std::vector<EdgeId> nontree) {
  TwoPhaseContractor* c = nullptr;
  for (auto& en : pool_->levels[static_cast<size_t>(level)])
    if (en.state == Pool::State::kReady) {
      c = en.c.get();
      en.state = Pool::State::kOccupied;
      en.diff.clear();
      break;
    }
  if (!c) {
    // The schedule guarantees a ready contractor; rebuild one from the live forest if not.
    ++pool_misses_;
    Pool::Entry en;
    en.c = std::make_unique<TwoPhaseContractor>(g_.num_nodes());
    for (EdgeId e : tree_) en.c->link(e, g_.edge(e).u, g_.edge(e).v, g_.weight(e));
    work_ += static_cast<int64_t>(tree_.size());
    en.state = Pool::State::kOccupied;
    c = en.c.get();
    pool_->levels[static_cast<size_t>(level)].push_back(std::move(en));
  }
  std::sort(nontree.begin(), nontree.end());
  auto d = std::make_unique<ContractedMsf>(g_, std::move(nontree), c, cfg_.inner);
  return d;
}

void FewNonTreeMsf::drop(std::unique_ptr<ContractedMsf>& d) {
  if (!d) return;
  Pool::Entry* en = pool_->find(d->contractor());
  en->c->release();
  en->state = Pool::State::kFree;
  en->freed_at = tau_;
  d.reset();
}

void FewNonTreeMsf::start_builder(int i) {
  std::vector<EdgeId> n;
  auto take = [&](const std::unique_ptr<ContractedMsf>& d) {
    if (d) n.insert(n.end(), d->nontree().begin(), d->nontree().end());
  };
  take(slot(i - 1, 3));
  take(slot(i - 1, 4));
  if (i == L_ + 1) take(slot(L_, 0));
  std::sort(n.begin(), n.end());
  n.erase(std::unique(n.begin(), n.end()), n.end());
  auto b = std::make_unique<Builder>();
  b->start = tau_;
  b->d = make_instance(i, std::move(n));
  int64_t half = int64_t{1} << (i - 1);
  b->share = (b->d->work() + half - 1) / half;
  builders_[static_cast<size_t>(i)] = std::move(b);
}

void FewNonTreeMsf::forest_link(EdgeId e) {
  const Edge& ed = g_.edge(e);
  df_.link(ed.u, ed.v, e, ed.w);
  tree_.insert(e);
  for (auto& lv : pool_->levels)
    for (auto& en : lv) {
      if (en.state == Pool::State::kReady) {
        en.c->link(e, ed.u, ed.v, ed.w);
      } else if (en.diff.count(e) && en.diff[e] == -1) {
        en.diff.erase(e);
      } else {
        en.diff[e] = 1;
      }
    }
}

void FewNonTreeMsf::forest_cut(EdgeId e) {
  df_.cut(e);
  tree_.erase(e);
  for (auto& lv : pool_->levels)
    for (auto& en : lv) {
      if (en.state == Pool::State::kReady) {
        en.c->cut(e);
      } else if (en.diff.count(e) && en.diff[e] == 1) {
        en.diff.erase(e);
      } else {
        en.diff[e] = -1;
      }
    }
}

MsfDelta FewNonTreeMsf::erase(EdgeId e) {
  if (!g_.alive(e)) throw std::invalid_argument("FewNonTreeMsf::erase: dead edge");
  const int64_t w0 = work_, df0 = df_.work();
  ++tau_;
  std::vector<EdgeId> r0;
  for (auto& lv : slots_)
    for (auto& d : lv) {
      if (!d) continue;
      int64_t before = d->work();
      MsfDelta x = d->erase(e);
      work_ += d->work() - before;
      r0.insert(r0.end(), x.added.begin(), x.added.end());
    }
  for (size_t i = 1; i < builders_.size(); ++i) builders_[i]->queue.push_back(e);
  const bool was_tree = tree_.count(e) != 0;
  if (was_tree) forest_cut(e);
  g_.remove_edge(e);
  MsfDelta out;
  std::sort(r0.begin(), r0.end());
  r0.erase(std::unique(r0.begin(), r0.end()), r0.end());
  if (was_tree) {
    out.removed.push_back(e);
    EdgeId best = kNoEdge;
    for (EdgeId f : r0) {
      if (tree_.count(f)) continue;
      if (best != kNoEdge && !(g_.weight(f) < g_.weight(best))) continue;
      if (!df_.connected(g_.edge(f).u, g_.edge(f).v)) best = f;
    }
    if (best != kNoEdge) {
      forest_link(best);
      out.added.push_back(best);
      r0.erase(std::find(r0.begin(), r0.end(), best));
    }
  }
  cleanup(std::move(r0));
  work_ += df_.work() - df0;
  last_work_ = work_ - w0;
  return out;
}

std::pair<std::vector<EdgeId>, MsfDelta> FewNonTreeMsf::insert_batch(std::span<const BatchEdge> batch) {
  if (static_cast<int64_t>(batch.size()) > cfg_.B) throw std::invalid_argument("FewNonTreeMsf: batch larger than B");
  if (static_cast<int64_t>(num_nontree() + batch.size()) > cfg_.k)
    throw std::invalid_argument("FewNonTreeMsf: batch could exceed k non-tree edges");
  for (const BatchEdge& b : batch)
    if (!g_.has_node(b.u) || !g_.has_node(b.v) || b.u == b.v)
      throw std::invalid_argument("FewNonTreeMsf: bad batch edge");
  const int64_t w0 = work_, df0 = df_.work();
  ++tau_;
  std::vector<EdgeId> ids, r;
  MsfDelta out;
  for (const BatchEdge& b : batch) {
    EdgeId e = g_.add_edge(b.u, b.v, b.w);
    ids.push_back(e);
    MsfDelta step;
    auto f = df_.path_max(b.u, b.v);
    if (!f) {
      forest_link(e);
      step.added.push_back(e);
    } else if (g_.weight(e) < g_.weight(*f)) {
      forest_cut(*f);
      forest_link(e);
      r.push_back(*f);
      step.added.push_back(e);
      step.removed.push_back(*f);
    } else {
      r.push_back(e);
    }
    out.merge(step);
  }
  cleanup(std::move(r));
  work_ += df_.work() - df0;
  last_work_ = work_ - w0;
  return {ids, out};
}

void FewNonTreeMsf::cleanup(std::vector<EdgeId> r) {
  // Builders in the second half of their period catch up two deletions per step.
  for (int i = 1; i <= L_ + 1; ++i) {
    Builder& b = *builders_[static_cast<size_t>(i)];
    int64_t half = int64_t{1} << (i - 1);
    if (tau_ - b.start < half) {
      work_ += b.share;
      continue;
    }
    for (int s = 0; s < 2 && !b.queue.empty(); ++s) {
      EdgeId e = b.queue.front();
      b.queue.pop_front();
      int64_t before = b.d->work();
      MsfDelta x = b.d->erase(e);
      work_ += b.d->work() - before;
      r.insert(r.end(), x.added.begin(), x.added.end());
    }
  }
  // Level 0 takes the new non-tree edges.
  std::vector<EdgeId> n0;
  for (EdgeId f : r)
    if (g_.alive(f) && !tree_.count(f)) n0.push_back(f);
  std::sort(n0.begin(), n0.end());
  n0.erase(std::unique(n0.begin(), n0.end()), n0.end());
  {
    auto d0 = make_instance(0, std::move(n0));
    work_ += d0->work();
    auto& target = !slot(0, 1) ? slot(0, 1) : slot(0, 2);
    if (target) throw std::logic_error("FewNonTreeMsf: no empty level-0 slot");
    target = std::move(d0);
  }
  for (int i = 1; i <= L_ + 1; ++i) {
    if (tau_ % (int64_t{1} << i) != 0) continue;
    Builder& b = *builders_[static_cast<size_t>(i)];
    if (!b.queue.empty()) throw std::logic_error("FewNonTreeMsf: builder not caught up at install");
    if (i <= L_) {
      auto& target = !slot(i, 1) ? slot(i, 1) : slot(i, 2);
      if (target) throw std::logic_error("FewNonTreeMsf: no empty slot on install");
      target = std::move(b.d);
    } else {
      drop(slot(L_, 0));
      slot(L_, 0) = std::move(b.d);
    }
    drop(slot(i - 1, 3));
    drop(slot(i - 1, 4));
    slot(i - 1, 3) = std::move(slot(i - 1, 1));
    slot(i - 1, 4) = std::move(slot(i - 1, 2));
    start_builder(i);
  }
  // Free contractors replay missed forest changes: cuts first, so the copy stays a forest.
  for (size_t i = 0; i < pool_->levels.size(); ++i)
    for (auto& en : pool_->levels[i]) {
      if (en.state != Pool::State::kFree) continue;
      int64_t left = std::max<int64_t>(1, en.freed_at + (int64_t{1} << i) - tau_);
      int64_t quota = (static_cast<int64_t>(en.diff.size()) + left - 1) / left;
      for (int pass = 0; pass < 2 && quota > 0; ++pass)
        for (auto it = en.diff.begin(); it != en.diff.end() && quota > 0;) {
          if ((pass == 0) != (it->second == -1)) {
            ++it;
            continue;
          }
          if (it->second == -1) en.c->cut(it->first);
          else en.c->link(it->first, g_.edge(it->first).u, g_.edge(it->first).v, g_.weight(it->first));
          ++work_;
          --quota;
          it = en.diff.erase(it);
        }
      if (en.diff.empty()) en.state = Pool::State::kReady;
    }
}

std::vector<FewNonTreeMsf::SlotInfo> FewNonTreeMsf::slots() const {
  std::vector<SlotInfo> out;
  for (int i = 0; i <= L_; ++i)
    for (int j = 0; j < 5; ++j) {
      const auto& d = slots_[static_cast<size_t>(i)][static_cast<size_t>(j)];
      if (d) out.push_back({i, j, d->nontree().size()});
    }
  return out;
}

std::vector<EdgeId> FewNonTreeMsf::nontree_union() const {
  std::vector<EdgeId> out;
  for (const auto& lv : slots_)
    for (const auto& d : lv)
      if (d) out.insert(out.end(), d->nontree().begin(), d->nontree().end());
  std::sort(out.begin(), out.end());
  return out;
}

PhasedDecremental::PhasedDecremental(Graph g, DecrementalFactory make, int64_t phase_length)
    : g_(std::move(g)), make_(std::move(make)), half_(phase_length / 2) {
  if (phase_length < 2) throw std::invalid_argument("PhasedDecremental: phase length below 2");
  active_ = make_(g_);
  next_ = make_(g_);
  init_charge_ = (g_.num_edges() + g_.num_nodes() + half_ - 1) / half_;
}

MsfDelta PhasedDecremental::erase(EdgeId e) {
  if (!g_.alive(e)) throw std::invalid_argument("PhasedDecremental::erase: dead edge");
  int64_t before = active_->work() + next_->work();
  MsfDelta d = active_->erase(e);
  next_->erase(e);
  g_.remove_edge(e);
  last_work_ = active_->work() + next_->work() - before + init_charge_;
  work_ += last_work_;
  if (++since_switch_ == half_) {
    active_ = std::move(next_);
    next_ = make_(g_);
    init_charge_ = (g_.num_edges() + g_.num_nodes() + half_ - 1) / half_;
    since_switch_ = 0;
    ++rebuilds_;
  }
  return d;
}

DecrementalFactory restricted_from_decremental(DecrementalFactory bounded, int64_t phase_length) {
  return [bounded = std::move(bounded), phase_length](Graph g) -> std::unique_ptr<DecrementalMsf> {
    return std::make_unique<PhasedDecremental>(std::move(g), bounded, phase_length);
  };
}

}  // namespace dmsf
