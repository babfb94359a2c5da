#include "dmsf/graph.hpp"

#include <algorithm>
#include <istream>
#include <ostream>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <unordered_set>

namespace dmsf {

Graph::Graph(int n) {
  if (n < 0) throw std::invalid_argument("negative node count");
  adj_.resize(static_cast<size_t>(n));
}

NodeId Graph::add_node() {
  adj_.emplace_back();
  return num_nodes() - 1;
}

EdgeId Graph::add_edge(NodeId u, NodeId v, Weight w) {
  if (!has_node(u) || !has_node(v)) throw std::invalid_argument("add_edge: unknown node");
  if (u == v) throw std::invalid_argument("add_edge: self-loop");
  EdgeId id = edge_capacity();
  if (w.key < 0) w.key = id;
  Edge e{u, v, w, true, static_cast<int32_t>(adj_[u].size()), static_cast<int32_t>(adj_[v].size())};
  adj_[u].push_back({v, id});
  adj_[v].push_back({u, id});
  edges_.push_back(e);
  ++alive_count_;
  return id;
}

void Graph::detach(NodeId x, int32_t pos) {
  auto& list = adj_[x];
  Arc moved = list.back();
  list[pos] = moved;
  list.pop_back();
  if (pos < static_cast<int32_t>(list.size())) {
    Edge& me = edges_[moved.e];
    if (me.u == x)
      me.pos_u = pos;
    else
      me.pos_v = pos;
  }
}

void Graph::remove_edge(EdgeId e) {
  if (!alive(e)) throw std::invalid_argument("remove_edge: edge not alive");
  Edge& ed = edges_[e];
  ed.alive = false;
  detach(ed.u, ed.pos_u);
  detach(ed.v, ed.pos_v);
  ed.pos_u = ed.pos_v = -1;
  --alive_count_;
}

NodeId Graph::other(EdgeId e, NodeId x) const {
  const Edge& ed = edge(e);
  if (ed.u == x) return ed.v;
  if (ed.v == x) return ed.u;
  throw std::invalid_argument("other: node not an endpoint");
}

std::vector<EdgeId> Graph::alive_edges() const {
  std::vector<EdgeId> out;
  out.reserve(static_cast<size_t>(alive_count_));
  for (EdgeId e = 0; e < edge_capacity(); ++e)
    if (edges_[e].alive) out.push_back(e);
  return out;
}

int64_t Graph::max_degree() const {
  int64_t d = 0;
  for (const auto& a : adj_) d = std::max<int64_t>(d, static_cast<int64_t>(a.size()));
  return d;
}

int64_t volume(const Graph& g, std::span<const NodeId> s) {
  int64_t vol = 0;
  for (NodeId v : s) {
    if (!g.has_node(v)) throw std::invalid_argument("volume: unknown node");
    vol += g.degree(v);
  }
  return vol;
}

Cut make_cut(const Graph& g, std::span<const NodeId> s) {
  Cut c;
  c.members.assign(s.begin(), s.end());
  std::sort(c.members.begin(), c.members.end());
  if (std::adjacent_find(c.members.begin(), c.members.end()) != c.members.end())
    throw std::invalid_argument("make_cut: duplicate node");
  std::unordered_set<NodeId> in(c.members.begin(), c.members.end());
  c.volume = volume(g, c.members);
  for (NodeId v : c.members)
    for (const Arc& a : g.adj(v))
      if (!in.count(a.to)) ++c.boundary;
  return c;
}

Ratio conductance(const Graph& g, const Cut& s) {
  if (s.members.empty() || static_cast<int>(s.members.size()) >= g.num_nodes())
    throw std::invalid_argument("conductance: cut must be proper");
  int64_t den = std::min(s.volume, 2 * g.num_edges() - s.volume);
  if (den <= 0) throw std::invalid_argument("conductance: zero denominator");
  return Ratio(s.boundary, den);
}

Ratio conductance(const Graph& g, std::span<const NodeId> s) { return conductance(g, make_cut(g, s)); }

Ratio expansion(const Graph& g, const Cut& s) {
  int64_t k = static_cast<int64_t>(s.members.size());
  if (k == 0 || k >= g.num_nodes()) throw std::invalid_argument("expansion: cut must be proper");
  return Ratio(s.boundary, std::min<int64_t>(k, g.num_nodes() - k));
}

Ratio expansion(const Graph& g, std::span<const NodeId> s) { return expansion(g, make_cut(g, s)); }

std::optional<MinCut> min_conductance_bruteforce(const Graph& g, int cap) {
  const int n = g.num_nodes();
  if (n > cap) throw std::invalid_argument("min_conductance_bruteforce: graph above oracle cap");
  if (n < 2) throw std::invalid_argument("min_conductance_bruteforce: need at least two nodes");
  std::vector<std::pair<int, int>> ends;
  for (EdgeId e : g.alive_edges()) ends.emplace_back(g.edge(e).u, g.edge(e).v);
  std::vector<int64_t> deg(static_cast<size_t>(n));
  for (int v = 0; v < n; ++v) deg[v] = g.degree(v);
  const int64_t total = 2 * g.num_edges();
  const uint32_t full = (n == 32) ? ~0u : ((1u << n) - 1);

  auto nodes_of = [&](uint32_t mask) {
    std::vector<NodeId> out;
    for (int v = 0; v < n; ++v)
      if (mask >> v & 1u) out.push_back(v);
    return out;
  };

  bool found = false;
  Ratio best;
  uint32_t best_mask = 0;
  const uint32_t limit = 1u << (n - 1);
  for (uint32_t mask = 1; mask < limit; ++mask) {
    int64_t vol = 0;
    for (int v = 0; v < n - 1; ++v)
      if (mask >> v & 1u) vol += deg[v];
    int64_t den = std::min(vol, total - vol);
    if (den <= 0) continue;
    int64_t cut = 0;
    for (auto [a, b] : ends)
      if (((mask >> a) ^ (mask >> b)) & 1u) ++cut;
    uint32_t side = mask;
    uint32_t comp = full & ~mask;
    if (total - vol < vol || (total - vol == vol && (comp & 1u))) side = comp;
    Ratio phi(cut, den);
    if (!found || phi < best || (phi == best && nodes_of(side) < nodes_of(best_mask))) {
      found = true;
      best = phi;
      best_mask = side;
    }
  }
  if (!found) return std::nullopt;
  auto members = nodes_of(best_mask);
  return MinCut{make_cut(g, members), best};
}

Subgraph induced_subgraph(const Graph& g, std::span<const NodeId> nodes) {
  Subgraph s;
  s.g = Graph(static_cast<int>(nodes.size()));
  s.to_parent.assign(nodes.begin(), nodes.end());
  std::unordered_map<NodeId, NodeId> local;
  for (size_t i = 0; i < nodes.size(); ++i) local[nodes[i]] = static_cast<NodeId>(i);
  if (local.size() != nodes.size()) throw std::invalid_argument("induced_subgraph: duplicate node");
  for (size_t i = 0; i < nodes.size(); ++i) {
    for (const Arc& a : g.adj(nodes[i])) {
      auto it = local.find(a.to);
      if (it == local.end() || g.edge(a.e).u != nodes[i]) continue;
      s.g.add_edge(static_cast<NodeId>(i), it->second, g.weight(a.e));
      s.edge_to_parent.push_back(a.e);
    }
  }
  return s;
}

NodeId DegreeReduced::attach_point(NodeId x) {
  auto& path = gadget.at(static_cast<size_t>(x));
  for (NodeId r : path)
    if (g.degree(r) < 3) return r;
  NodeId last = path.back();
  // Split a real edge off the last node so it can take the new gadget link.
  NodeId fresh = g.add_node();
  origin.push_back(x);
  for (const Arc& a : g.adj(last)) {
    EdgeId oe = to_original[a.e];
    if (oe == kNoEdge) continue;
    Weight w = g.weight(a.e);
    NodeId far = a.to;
    g.remove_edge(a.e);
    EdgeId ne = g.add_edge(fresh, far, w);
    to_original.resize(static_cast<size_t>(g.edge_capacity()), kNoEdge);
    to_original[ne] = oe;
    to_reduced[oe] = ne;
    break;
  }
  EdgeId ge = g.add_edge(last, fresh, Weight{next_gadget_rank++, 0, -1});
  to_original.resize(static_cast<size_t>(g.edge_capacity()), kNoEdge);
  to_original[ge] = kNoEdge;
  path.push_back(fresh);
  return fresh;
}

EdgeId DegreeReduced::insert(EdgeId orig_e, NodeId u, NodeId v, Weight w) {
  NodeId a = attach_point(u);
  NodeId b = attach_point(v);
  EdgeId ne = g.add_edge(a, b, w);
  to_original.resize(static_cast<size_t>(g.edge_capacity()), kNoEdge);
  to_original[ne] = orig_e;
  if (static_cast<size_t>(orig_e) >= to_reduced.size()) to_reduced.resize(static_cast<size_t>(orig_e) + 1, kNoEdge);
  to_reduced[orig_e] = ne;
  return ne;
}

EdgeId DegreeReduced::erase(EdgeId orig_e) {
  EdgeId re = to_reduced.at(static_cast<size_t>(orig_e));
  g.remove_edge(re);
  to_reduced[orig_e] = kNoEdge;
  return re;
}

DegreeReduced degree_reduce(const Graph& in) {
  DegreeReduced r;
  const int n = in.num_nodes();
  r.g = Graph(n);
  r.origin.resize(static_cast<size_t>(n));
  r.gadget.resize(static_cast<size_t>(n));
  r.next_gadget_rank = kGadgetRankBase;
  for (NodeId v = 0; v < n; ++v) {
    r.origin[v] = v;
    r.gadget[v].push_back(v);
  }
  // slot[v][k]: reduced node receiving the k-th incident edge of v.
  std::vector<std::vector<NodeId>> slot(static_cast<size_t>(n));
  std::vector<std::pair<NodeId, NodeId>> links;
  for (NodeId v = 0; v < n; ++v) {
    int64_t d = in.degree(v);
    if (d <= 3) {
      slot[v].assign(static_cast<size_t>(d), v);
      continue;
    }
    auto& path = r.gadget[v];
    for (int64_t k = 1; k < d - 2; ++k) {
      path.push_back(r.g.add_node());
      r.origin.push_back(v);
    }
    for (size_t k = 0; k + 1 < path.size(); ++k) links.emplace_back(path[k], path[k + 1]);
    slot[v].push_back(path.front());
    for (NodeId p : path) slot[v].push_back(p);
    slot[v].push_back(path.back());
  }
  r.to_reduced.assign(static_cast<size_t>(in.edge_capacity()), kNoEdge);
  for (auto [a, b] : links) {
    r.g.add_edge(a, b, Weight{r.next_gadget_rank++, 0, -1});
    r.to_original.push_back(kNoEdge);
  }
  std::vector<size_t> index_in_adj(static_cast<size_t>(in.edge_capacity()) * 2, 0);
  for (NodeId v = 0; v < n; ++v) {
    auto arcs = in.adj(v);
    for (size_t k = 0; k < arcs.size(); ++k) {
      const Edge& ed = in.edge(arcs[k].e);
      index_in_adj[static_cast<size_t>(arcs[k].e) * 2 + (ed.u == v ? 0 : 1)] = k;
    }
  }
  for (EdgeId e : in.alive_edges()) {
    const Edge& ed = in.edge(e);
    NodeId a = slot[ed.u][index_in_adj[static_cast<size_t>(e) * 2]];
    NodeId b = slot[ed.v][index_in_adj[static_cast<size_t>(e) * 2 + 1]];
    EdgeId ne = r.g.add_edge(a, b, ed.w);
    r.to_original.push_back(e);
    r.to_reduced[e] = ne;
  }
  return r;
}

Graph read_edge_list(std::istream& in) {
  long long n = -1, m = -1;
  if (!(in >> n >> m) || n < 0 || m < 0) throw std::invalid_argument("edge list: bad header");
  Graph g(static_cast<int>(n));
  for (long long i = 0; i < m; ++i) {
    long long u, v, w;
    if (!(in >> u >> v >> w)) throw std::invalid_argument("edge list: truncated at edge " + std::to_string(i));
    if (u < 0 || v < 0 || u >= n || v >= n) throw std::invalid_argument("edge list: node out of range");
    g.add_edge(static_cast<NodeId>(u), static_cast<NodeId>(v), Weight{w, 0, -1});
  }
  return g;
}

void write_edge_list(std::ostream& out, const Graph& g) {
  out << g.num_nodes() << ' ' << g.num_edges() << '\n';
  for (EdgeId e : g.alive_edges()) out << g.edge(e).u << ' ' << g.edge(e).v << ' ' << g.weight(e).rank << '\n';
}

}  // namespace dmsf
