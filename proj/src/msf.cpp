#include "dmsf/msf.hpp"

#include <algorithm>
#include <stdexcept>

namespace dmsf {

std::vector<EdgeId> kruskal(const Graph& g) {
  auto all = g.alive_edges();
  return kruskal(g, all);
}

std::vector<EdgeId> kruskal(const Graph& g, std::span<const EdgeId> subset) {
  std::vector<EdgeId> order(subset.begin(), subset.end());
  std::sort(order.begin(), order.end(), [&](EdgeId a, EdgeId b) { return g.weight(a) < g.weight(b); });
  UnionFind uf(g.num_nodes());
  std::vector<EdgeId> out;
  for (EdgeId e : order) {
    if (!g.alive(e)) throw std::invalid_argument("kruskal: dead edge in subset");
    if (uf.unite(g.edge(e).u, g.edge(e).v)) out.push_back(e);
  }
  std::sort(out.begin(), out.end());
  return out;
}

void MsfDelta::merge(const MsfDelta& other) {
  for (EdgeId e : other.added) {
    auto it = std::find(removed.begin(), removed.end(), e);
    if (it != removed.end())
      removed.erase(it);
    else
      added.push_back(e);
  }
  for (EdgeId e : other.removed) {
    auto it = std::find(added.begin(), added.end(), e);
    if (it != added.end())
      added.erase(it);
    else
      removed.push_back(e);
  }
}

DynamicForest::DynamicForest(int n) {
  for (int i = 0; i < n; ++i) add_node();
}

int DynamicForest::new_node() {
  if (!free_.empty()) {
    int x = free_.back();
    free_.pop_back();
    t_[x] = Node{};
    return x;
  }
  t_.emplace_back();
  return static_cast<int>(t_.size()) - 1;
}

NodeId DynamicForest::add_node() {
  vertex_node_.push_back(new_node());
  return num_vertices_++;
}

void DynamicForest::check_vertex(NodeId v) const {
  if (v < 0 || v >= num_vertices_) throw std::invalid_argument("DynamicForest: unknown node");
}

bool DynamicForest::is_root(int x) const {
  int p = t_[x].parent;
  return p < 0 || (t_[p].ch[0] != x && t_[p].ch[1] != x);
}

void DynamicForest::push(int x) {
  Node& n = t_[x];
  if (!n.flip) return;
  std::swap(n.ch[0], n.ch[1]);
  for (int c : n.ch)
    if (c >= 0) t_[c].flip = !t_[c].flip;
  n.flip = false;
}

void DynamicForest::pull(int x) {
  Node& n = t_[x];
  n.best = n.is_edge ? x : -1;
  for (int c : n.ch) {
    if (c < 0) continue;
    int b = t_[c].best;
    if (b >= 0 && (n.best < 0 || t_[n.best].w < t_[b].w)) n.best = b;
  }
}

void DynamicForest::rotate(int x) {
  int p = t_[x].parent;
  int g = t_[p].parent;
  int dir = (t_[p].ch[1] == x) ? 1 : 0;
  int b = t_[x].ch[dir ^ 1];
  if (!is_root(p)) t_[g].ch[t_[g].ch[1] == p ? 1 : 0] = x;
  t_[x].parent = g;
  t_[x].ch[dir ^ 1] = p;
  t_[p].parent = x;
  t_[p].ch[dir] = b;
  if (b >= 0) t_[b].parent = p;
  pull(p);
  pull(x);
}

void DynamicForest::splay(int x) {
  std::vector<int> stack{x};
  for (int y = x; !is_root(y); y = t_[y].parent) stack.push_back(t_[y].parent);
  for (auto it = stack.rbegin(); it != stack.rend(); ++it) push(*it);
  while (!is_root(x)) {
    int p = t_[x].parent;
    if (!is_root(p)) {
      int g = t_[p].parent;
      bool zigzig = (t_[g].ch[1] == p) == (t_[p].ch[1] == x);
      rotate(zigzig ? p : x);
    }
    rotate(x);
    ++work_;
  }
}

void DynamicForest::access(int x) {
  int last = -1;
  for (int y = x; y >= 0; y = t_[y].parent) {
    splay(y);
    t_[y].ch[1] = last;
    pull(y);
    last = y;
  }
  splay(x);
}

void DynamicForest::evert(int x) {
  access(x);
  t_[x].flip = !t_[x].flip;
  push(x);
}

int DynamicForest::find_root(int x) {
  access(x);
  int y = x;
  for (;;) {
    push(y);
    if (t_[y].ch[0] < 0) break;
    y = t_[y].ch[0];
  }
  splay(y);
  return y;
}

bool DynamicForest::connected(NodeId u, NodeId v) {
  check_vertex(u);
  check_vertex(v);
  if (u == v) return true;
  return find_root(vertex_node_[u]) == find_root(vertex_node_[v]);
}

void DynamicForest::link(NodeId u, NodeId v, EdgeId e, Weight w) {
  check_vertex(u);
  check_vertex(v);
  if (u == v) throw std::invalid_argument("DynamicForest::link: self-loop");
  if (edge_node_.count(e)) throw std::invalid_argument("DynamicForest::link: edge already present");
  if (connected(u, v)) throw std::logic_error("DynamicForest::link: would create a cycle");
  int x = new_node();
  t_[x].is_edge = true;
  t_[x].eid = e;
  t_[x].w = w;
  t_[x].end_u = u;
  t_[x].end_v = v;
  pull(x);
  edge_node_[e] = x;
  int a = vertex_node_[u], b = vertex_node_[v];
  evert(a);
  t_[a].parent = x;
  evert(x);
  t_[x].parent = b;
}

void DynamicForest::cut_adjacent(int a, int b) {
  evert(a);
  access(b);
  push(b);
  if (t_[b].ch[0] != a || t_[a].ch[1] >= 0) throw std::logic_error("DynamicForest: nodes not adjacent");
  t_[b].ch[0] = -1;
  t_[a].parent = -1;
  pull(b);
}

void DynamicForest::cut(EdgeId e) {
  auto it = edge_node_.find(e);
  if (it == edge_node_.end()) throw std::invalid_argument("DynamicForest::cut: edge not in forest");
  int x = it->second;
  edge_node_.erase(it);
  cut_adjacent(vertex_node_[t_[x].end_u], x);
  cut_adjacent(x, vertex_node_[t_[x].end_v]);
  t_[x] = Node{};
  free_.push_back(x);
}

void DynamicForest::collect(int x, std::vector<EdgeId>& out) {
  if (x < 0) return;
  push(x);
  collect(t_[x].ch[0], out);
  if (t_[x].is_edge) out.push_back(t_[x].eid);
  collect(t_[x].ch[1], out);
}

std::optional<EdgeId> DynamicForest::path_max(NodeId u, NodeId v) {
  check_vertex(u);
  check_vertex(v);
  if (u == v) throw std::invalid_argument("path_max: empty path (u == v)");
  if (!connected(u, v)) return std::nullopt;
  evert(vertex_node_[u]);
  access(vertex_node_[v]);
  int b = t_[vertex_node_[v]].best;
  return t_[b].eid;
}

std::vector<EdgeId> DynamicForest::path_edges(NodeId u, NodeId v) {
  check_vertex(u);
  check_vertex(v);
  std::vector<EdgeId> out;
  if (u == v || !connected(u, v)) return out;
  evert(vertex_node_[u]);
  access(vertex_node_[v]);
  collect(vertex_node_[v], out);
  return out;
}

MultigraphMsf::MultigraphMsf(Graph g) : g_(std::move(g)), df_(g_.num_nodes()) {
  for (EdgeId e : g_.alive_edges()) pairs_[key_of(g_.edge(e))].insert({g_.weight(e), e});
  for (EdgeId e : kruskal(g_)) {
    df_.link(g_.edge(e).u, g_.edge(e).v, e, g_.weight(e));
    tree_.insert(e);
  }
}

NodeId MultigraphMsf::add_node() {
  df_.add_node();
  return g_.add_node();
}

std::vector<EdgeId> MultigraphMsf::forest() const { return {tree_.begin(), tree_.end()}; }

MsfDelta MultigraphMsf::place(EdgeId e) {
  MsfDelta d;
  const Edge& ed = g_.edge(e);
  auto f = df_.path_max(ed.u, ed.v);
  if (!f) {
    df_.link(ed.u, ed.v, e, ed.w);
    tree_.insert(e);
    d.added.push_back(e);
  } else if (ed.w < g_.weight(*f)) {
    df_.cut(*f);
    tree_.erase(*f);
    df_.link(ed.u, ed.v, e, ed.w);
    tree_.insert(e);
    d.added.push_back(e);
    d.removed.push_back(*f);
  }
  ++work_;
  return d;
}

std::pair<EdgeId, MsfDelta> MultigraphMsf::insert(NodeId u, NodeId v, Weight w) {
  EdgeId e = g_.add_edge(u, v, w);
  pairs_[key_of(g_.edge(e))].insert({g_.weight(e), e});
  return {e, place(e)};
}

MsfDelta MultigraphMsf::erase(EdgeId e) {
  if (!g_.alive(e)) throw std::invalid_argument("MultigraphMsf::erase: dead edge");
  MsfDelta d;
  auto key = key_of(g_.edge(e));
  auto pit = pairs_.find(key);
  pit->second.erase({g_.weight(e), e});
  if (pit->second.empty()) pairs_.erase(pit);
  g_.remove_edge(e);
  if (!tree_.count(e)) return d;
  df_.cut(e);
  tree_.erase(e);
  d.removed.push_back(e);
  std::optional<EdgeId> best;
  for (const auto& [k, set] : pairs_) {
    ++work_;
    EdgeId c = set.begin()->second;
    if (best && !(g_.weight(c) < g_.weight(*best))) continue;
    if (!df_.connected(k.first, k.second)) best = c;
  }
  if (best) {
    df_.link(g_.edge(*best).u, g_.edge(*best).v, *best, g_.weight(*best));
    tree_.insert(*best);
    d.added.push_back(*best);
  }
  return d;
}

SCoveredMsf::SCoveredMsf(Graph g, std::vector<NodeId> s, int64_t max_outside_degree)
    : g_(std::move(g)), s_(std::move(s)), in_s_(static_cast<size_t>(g_.num_nodes()), 0), df_(g_.num_nodes()) {
  for (NodeId v : s_) {
    if (!g_.has_node(v)) throw std::invalid_argument("SCoveredMsf: S node out of range");
    in_s_[v] = 1;
  }
  for (NodeId v = 0; v < g_.num_nodes(); ++v)
    if (!in_s_[v] && g_.degree(v) > max_outside_degree)
      throw std::invalid_argument("SCoveredMsf: node outside S exceeds the degree bound");
  for (EdgeId e : kruskal(g_)) {
    df_.link(g_.edge(e).u, g_.edge(e).v, e, g_.weight(e));
    tree_.insert(e);
  }
  for (EdgeId e : g_.alive_edges()) {
    if (tree_.count(e)) continue;
    if (in_s_[g_.edge(e).u] == in_s_[g_.edge(e).v])
      throw std::invalid_argument("SCoveredMsf: non-tree edge without exactly one endpoint in S");
  }
}

std::vector<EdgeId> SCoveredMsf::forest() const { return {tree_.begin(), tree_.end()}; }

void SCoveredMsf::check_nontree(EdgeId e) const {
  if (in_s_[g_.edge(e).u] == in_s_[g_.edge(e).v])
    throw std::logic_error("SCoveredMsf: update produced an uncovered non-tree edge");
}

MsfDelta SCoveredMsf::erase(EdgeId e) {
  if (!g_.alive(e)) throw std::invalid_argument("SCoveredMsf::erase: dead edge");
  MsfDelta d;
  g_.remove_edge(e);
  last_scan_ = 0;
  if (!tree_.count(e)) return d;
  df_.cut(e);
  tree_.erase(e);
  d.removed.push_back(e);
  std::optional<EdgeId> best;
  for (NodeId x : s_) {
    for (const Arc& a : g_.adj(x)) {
      ++last_scan_;
      if (tree_.count(a.e)) continue;
      if (best && !(g_.weight(a.e) < g_.weight(*best))) continue;
      if (!df_.connected(x, a.to)) best = a.e;
    }
  }
  work_ += last_scan_;
  if (best) {
    df_.link(g_.edge(*best).u, g_.edge(*best).v, *best, g_.weight(*best));
    tree_.insert(*best);
    d.added.push_back(*best);
  }
  return d;
}

std::pair<EdgeId, MsfDelta> SCoveredMsf::insert(NodeId u, NodeId v, Weight w) {
  EdgeId e = g_.add_edge(u, v, w);
  MsfDelta d;
  auto f = df_.path_max(u, v);
  if (!f) {
    df_.link(u, v, e, g_.weight(e));
    tree_.insert(e);
    d.added.push_back(e);
  } else if (g_.weight(e) < g_.weight(*f)) {
    df_.cut(*f);
    tree_.erase(*f);
    df_.link(u, v, e, g_.weight(e));
    tree_.insert(e);
    d.added.push_back(e);
    d.removed.push_back(*f);
    check_nontree(*f);
  } else {
    check_nontree(e);
  }
  return {e, d};
}

}  // namespace dmsf
