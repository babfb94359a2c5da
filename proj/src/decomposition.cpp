#include "dmsf/decomposition.hpp"

#include "dmsf/flow.hpp"
#include "dmsf/msf.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <deque>
#include <map>
#include <ostream>
#include <set>
#include <stdexcept>

namespace dmsf {

namespace {

void sort_parts(NodePartition& parts) {
  for (auto& p : parts) std::sort(p.begin(), p.end());
  std::sort(parts.begin(), parts.end(), [](const auto& a, const auto& b) { return a.front() < b.front(); });
}

// Connected components of the node subset `nodes` of g (nodes given as a mask).
NodePartition components_within(const Graph& g, std::span<const NodeId> nodes, const std::vector<char>& inside,
                                int64_t* work) {
  NodePartition out;
  std::vector<char> seen(static_cast<size_t>(g.num_nodes()), 0);
  for (NodeId s : nodes) {
    if (seen[s]) continue;
    std::vector<NodeId> comp{s};
    seen[s] = 1;
    for (size_t i = 0; i < comp.size(); ++i)
      for (const Arc& a : g.adj(comp[i])) {
        if (work) ++*work;
        if (inside[a.to] && !seen[a.to]) {
          seen[a.to] = 1;
          comp.push_back(a.to);
        }
      }
    out.push_back(std::move(comp));
  }
  return out;
}

int64_t crossing_edges(const Graph& g, const std::vector<int>& label) {
  int64_t c = 0;
  for (EdgeId e : g.alive_edges())
    if (label[g.edge(e).u] != label[g.edge(e).v]) ++c;
  return c;
}

Ratio expansion_of(int64_t boundary, int64_t side, int64_t n) {
  return Ratio(boundary, std::min(side, n - side));
}

}  // namespace

NodePartition frederickson_group(const Graph& g, std::span<const EdgeId> tree, int64_t s, int64_t* work) {
  if (s < 1) throw std::invalid_argument("frederickson_group: s must be positive");
  const int n = g.num_nodes();
  std::vector<std::vector<NodeId>> adj(static_cast<size_t>(n));
  UnionFind uf(n);
  for (EdgeId e : tree) {
    if (!g.alive(e)) throw std::invalid_argument("frederickson_group: tree edge not alive");
    NodeId u = g.edge(e).u, v = g.edge(e).v;
    if (!uf.unite(u, v)) throw std::invalid_argument("frederickson_group: tree edges contain a cycle");
    adj[u].push_back(v);
    adj[v].push_back(u);
  }
  for (NodeId v = 0; v < n; ++v)
    if (adj[v].size() > 3) throw std::invalid_argument("frederickson_group: tree degree above 3");
  const int64_t k = (s + 2) / 3;
  NodePartition out;
  std::vector<char> seen(static_cast<size_t>(n), 0);
  std::vector<NodeId> parent(static_cast<size_t>(n), kNoNode), head(static_cast<size_t>(n), kNoNode);
  std::vector<int64_t> res(static_cast<size_t>(n), 0);
  for (NodeId root = 0; root < n; ++root) {
    if (seen[root]) continue;
    std::vector<NodeId> order{root};
    seen[root] = 1;
    for (size_t i = 0; i < order.size(); ++i)
      for (NodeId y : adj[order[i]]) {
        if (work) ++*work;
        if (!seen[y]) {
          seen[y] = 1;
          parent[y] = order[i];
          order.push_back(y);
        }
      }
    if (static_cast<int64_t>(order.size()) <= s) {
      out.push_back(order);
      continue;
    }
    // Bottom-up: a node whose pending subtree reaches k nodes closes it as a part.
    std::vector<char> closes(order.size(), 0);
    for (size_t i = order.size(); i-- > 0;) {
      NodeId x = order[i];
      res[x] += 1;
      if (i > 0 && res[x] >= k) {
        closes[i] = 1;
        continue;
      }
      if (i > 0) res[parent[x]] += res[x];
    }
    for (size_t i = 0; i < order.size(); ++i) {
      NodeId x = order[i];
      head[x] = (i == 0 || closes[i]) ? x : head[parent[x]];
    }
    if (res[root] < k) {
      // The leftover around the root is too small: merge it into an adjacent closed part.
      NodeId target = kNoNode;
      for (size_t i = 1; i < order.size() && target == kNoNode; ++i)
        if (closes[i] && head[parent[order[i]]] == root) target = order[i];
      for (NodeId x : order)
        if (head[x] == root) head[x] = target;
    }
    std::map<NodeId, std::vector<NodeId>> by_head;
    for (NodeId x : order) by_head[head[x]].push_back(x);
    for (auto& [h, part] : by_head) out.push_back(std::move(part));
    for (NodeId x : order) res[x] = 0;
  }
  if (work) *work += n;
  sort_parts(out);
  return out;
}

NodePartition frederickson_group(const Graph& tree, int64_t s) {
  std::vector<EdgeId> all = tree.alive_edges();
  return frederickson_group(tree, all, s);
}

std::optional<ExactSparseCut> most_balanced_sparse_cut(const Graph& g, Ratio below) {
  const int n = g.num_nodes();
  if (n > 20) throw std::invalid_argument("most_balanced_sparse_cut: more than 20 nodes");
  if (n < 2) return std::nullopt;
  std::vector<std::vector<int>> mult(static_cast<size_t>(n), std::vector<int>(static_cast<size_t>(n), 0));
  std::vector<int> deg(static_cast<size_t>(n), 0);
  for (EdgeId e : g.alive_edges()) {
    NodeId u = g.edge(e).u, v = g.edge(e).v;
    if (u == v) continue;
    ++mult[u][v];
    ++mult[v][u];
    ++deg[u];
    ++deg[v];
  }
  const uint32_t full = (uint32_t{1} << n) - 1;
  std::vector<int32_t> bd(size_t{1} << n, 0);
  int best_size = 0;
  Ratio best_exp;
  uint32_t best_mask = 0;
  for (uint32_t mask = 1; mask < full; ++mask) {
    int v = std::countr_zero(mask);
    uint32_t rest = mask & (mask - 1);
    int into = 0;
    for (uint32_t r = rest; r; r &= r - 1) into += mult[v][std::countr_zero(r)];
    bd[mask] = bd[rest] + deg[v] - 2 * into;
    int size = std::popcount(mask);
    if (2 * size > n) continue;
    Ratio x = expansion_of(bd[mask], size, n);
    if (!(x < below)) continue;
    bool better = size > best_size || (size == best_size && x < best_exp);
    if (size == best_size && x == best_exp) {
      // Lexicographically smaller sorted side wins: compare lowest differing member.
      uint32_t diff = mask ^ best_mask;
      better = (mask & (diff & (~diff + 1))) != 0;
    }
    if (better) {
      best_size = size;
      best_exp = x;
      best_mask = mask;
    }
  }
  if (best_size == 0) return std::nullopt;
  ExactSparseCut c;
  for (int v = 0; v < n; ++v)
    if (best_mask >> v & 1) c.side.push_back(v);
  c.expansion = best_exp;
  return c;
}

double RecursiveCutDecomposer::gamma(int n) const {
  return std::max(1.0, std::ceil(std::log2(std::max(2, n))));
}

InnerDecomposition RecursiveCutDecomposer::decompose(const Graph& g, Ratio expansion, double, std::mt19937_64& rng) const {
  const int n = g.num_nodes();
  InnerDecomposition out;
  out.label.assign(static_cast<size_t>(n), -1);
  std::vector<char> inside(static_cast<size_t>(n), 0);
  std::deque<std::vector<NodeId>> work_list;
  auto push_components = [&](const std::vector<NodeId>& nodes) {
    for (NodeId x : nodes) inside[x] = 1;
    for (auto& c : components_within(g, nodes, inside, &out.work)) work_list.push_back(std::move(c));
    for (NodeId x : nodes) inside[x] = 0;
  };
  std::vector<NodeId> all(static_cast<size_t>(n));
  for (NodeId v = 0; v < n; ++v) all[v] = v;
  push_components(all);
  auto finish = [&](const std::vector<NodeId>& piece, bool certified) {
    for (NodeId x : piece) out.label[x] = out.parts;
    ++out.parts;
    out.certified = out.certified && certified;
  };
  while (!work_list.empty()) {
    std::vector<NodeId> piece = std::move(work_list.front());
    work_list.pop_front();
    const int k = static_cast<int>(piece.size());
    if (k == 1) {
      finish(piece, true);
      continue;
    }
    Subgraph sub = induced_subgraph(g, piece);
    std::vector<NodeId> side;
    bool exact = k <= exact_cap_;
    if (exact) {
      out.work += (int64_t{1} << k) * k;
      auto c = most_balanced_sparse_cut(sub.g, expansion);
      if (c) side = c->side;
    } else {
      // Candidates: BFS sweeps from random starts and level cuts of a unit flow
      // flooding a small ball. Keep the most balanced one below the parameter.
      int best_size = 0;
      Ratio best_exp;
      auto consider = [&](std::vector<NodeId> s) {
        if (s.empty() || static_cast<int>(s.size()) >= k) return;
        std::vector<char> in(static_cast<size_t>(k), 0);
        for (NodeId x : s) in[x] = 1;
        int64_t bd = 0;
        for (EdgeId e : sub.g.alive_edges()) {
          ++out.work;
          if (in[sub.g.edge(e).u] != in[sub.g.edge(e).v]) ++bd;
        }
        if (2 * static_cast<int>(s.size()) > k) {
          std::vector<NodeId> t;
          for (NodeId x = 0; x < k; ++x)
            if (!in[x]) t.push_back(x);
          s = std::move(t);
        }
        Ratio x = expansion_of(bd, static_cast<int64_t>(s.size()), k);
        if (!(x < expansion)) return;
        int size = static_cast<int>(s.size());
        if (size > best_size || (size == best_size && x < best_exp)) {
          best_size = size;
          best_exp = x;
          side = std::move(s);
        }
      };
      for (int t = 0; t < seeds_; ++t) {
        NodeId start = static_cast<NodeId>(rng() % static_cast<uint64_t>(k));
        std::vector<NodeId> order{start};
        std::vector<char> seen(static_cast<size_t>(k), 0), in(static_cast<size_t>(k), 0);
        seen[start] = 1;
        for (size_t i = 0; i < order.size(); ++i)
          for (const Arc& a : sub.g.adj(order[i])) {
            ++out.work;
            if (!seen[a.to]) {
              seen[a.to] = 1;
              order.push_back(a.to);
            }
          }
        int64_t bd = 0;
        int best_i = -1;
        Ratio bx;
        for (int i = 0; i + 1 < k; ++i) {
          NodeId x = order[static_cast<size_t>(i)];
          in[x] = 1;
          for (const Arc& a : sub.g.adj(x)) {
            ++out.work;
            if (a.to == x) continue;
            bd += in[a.to] ? -1 : 1;
          }
          Ratio r = expansion_of(bd, i + 1, k);
          int bal = std::min(i + 1, k - i - 1);
          if (r < expansion && (best_i < 0 || bal > std::min(best_i + 1, k - best_i - 1) ||
                                (bal == std::min(best_i + 1, k - best_i - 1) && r < bx))) {
            best_i = i;
            bx = r;
          }
        }
        if (best_i >= 0) consider(std::vector<NodeId>(order.begin(), order.begin() + best_i + 1));
        // Flood the first eighth of the BFS order and read off the flow's level cut.
        size_t ball = std::max<size_t>(1, order.size() / 8);
        FlowInstance fi;
        fi.g = &sub.g;
        fi.F = 2;
        fi.h = std::max<int64_t>(1, static_cast<int64_t>(std::ceil(1.0 / boost::rational_cast<double>(expansion))));
        for (size_t i = 0; i < ball; ++i) {
          NodeId x = order[i];
          int64_t dx = sub.g.degree(x);
          if (dx > 0) fi.source[x] = 2 * dx;
        }
        try {
          FlowOutcome fo = unit_flow(fi);
          out.work += fo.work;
          if (fo.cut) consider(fo.cut->members);
        } catch (const std::invalid_argument&) {
        }
      }
    }
    if (side.empty()) {
      finish(piece, exact);
      continue;
    }
    std::vector<char> in(static_cast<size_t>(k), 0);
    for (NodeId x : side) in[x] = 1;
    std::vector<NodeId> a, b;
    for (NodeId x = 0; x < k; ++x) (in[x] ? a : b).push_back(sub.to_parent[x]);
    push_components(a);
    push_components(b);
  }
  out.crossing = crossing_edges(g, out.label);
  return out;
}

RespectingDecomposition expansion_decompose_respecting(const Graph& g, const NodePartition& groups, int64_t s,
                                                       Ratio alpha, double p, const ExpansionDecomposer& inner,
                                                       std::mt19937_64& rng) {
  const int n = g.num_nodes();
  RespectingDecomposition out;
  std::vector<int> group_of(static_cast<size_t>(n), -1);
  std::vector<char> inside(static_cast<size_t>(n), 0);
  for (size_t i = 0; i < groups.size(); ++i) {
    const auto& u = groups[i];
    int64_t size = static_cast<int64_t>(u.size());
    if (size == 0 || size > s || 3 * size < s)
      throw std::invalid_argument("expansion_decompose_respecting: group size outside [s/3, s]");
    for (NodeId x : u) {
      if (!g.has_node(x) || group_of[x] >= 0)
        throw std::invalid_argument("expansion_decompose_respecting: groups do not partition the nodes");
      group_of[x] = static_cast<int>(i);
      inside[x] = 1;
    }
    if (components_within(g, u, inside, &out.work).size() != 1)
      throw std::invalid_argument("expansion_decompose_respecting: group is not connected");
    for (NodeId x : u) inside[x] = 0;
  }
  for (NodeId x = 0; x < n; ++x)
    if (group_of[x] < 0) throw std::invalid_argument("expansion_decompose_respecting: node outside every group");

  Graph contracted(static_cast<int>(groups.size()));
  for (EdgeId e : g.alive_edges()) {
    ++out.work;
    int a = group_of[g.edge(e).u], b = group_of[g.edge(e).v];
    if (a != b) contracted.add_edge(a, b, g.weight(e));
  }
  InnerDecomposition q = inner.decompose(contracted, alpha * Ratio(s, 3), p, rng);
  out.work += q.work;
  out.certified = q.certified;
  out.gamma = inner.gamma(contracted.num_nodes());

  NodePartition coarse(static_cast<size_t>(q.parts));
  for (size_t i = 0; i < groups.size(); ++i) {
    auto& dst = coarse[static_cast<size_t>(q.label[i])];
    dst.insert(dst.end(), groups[i].begin(), groups[i].end());
  }
  std::vector<int> label(static_cast<size_t>(n), -1);
  for (auto& part : coarse) {
    for (NodeId x : part) inside[x] = 1;
    for (auto& c : components_within(g, part, inside, &out.work)) {
      for (NodeId x : c) label[x] = static_cast<int>(out.parts.size());
      out.parts.push_back(std::move(c));
    }
    for (NodeId x : part) inside[x] = 0;
  }
  sort_parts(out.parts);
  out.crossing = crossing_edges(g, label);
  return out;
}

int Hierarchy::depth() const {
  int d = 0;
  for (const auto& c : clusters) d = std::max(d, c.level);
  return d;
}

int64_t Hierarchy::band_floor(int i) const {
  const int64_t m = g.num_edges(), dp = params.d - 2;
  return m - (static_cast<int64_t>(i) * m + dp - 1) / dp;
}

Hierarchy msf_decompose(const Graph& g, const MsfDecompParams& params) {
  RecursiveCutDecomposer inner;
  return msf_decompose(g, params, inner);
}

Hierarchy msf_decompose(const Graph& g, const MsfDecompParams& params, const ExpansionDecomposer& inner) {
  if (params.d < 3) throw std::invalid_argument("msf_decompose: d must be at least 3");
  if (params.s_low < 1 || params.s_high < params.s_low) throw std::invalid_argument("msf_decompose: need s_high ≥ s_low ≥ 1");
  if (params.alpha < 0 || params.alpha > 1) throw std::invalid_argument("msf_decompose: alpha outside [0, 1]");
  if (g.max_degree() > 3) throw std::invalid_argument("msf_decompose: max degree above 3");
  const int n = g.num_nodes();
  const std::vector<EdgeId> alive = g.alive_edges();
  const int64_t m = static_cast<int64_t>(alive.size());
  {
    std::vector<char> hit(static_cast<size_t>(m) + 1, 0);
    for (EdgeId e : alive) {
      const Weight& w = g.weight(e);
      if (w.tier != 0 || w.rank < 1 || w.rank > m || hit[static_cast<size_t>(w.rank)])
        throw std::invalid_argument("msf_decompose: ranks are not a permutation of 1..m");
      hit[static_cast<size_t>(w.rank)] = 1;
    }
  }
  std::vector<EdgeId> mst = kruskal(g);
  if (n > 0 && static_cast<int>(mst.size()) != n - 1) throw std::invalid_argument("msf_decompose: graph not connected");

  Hierarchy h;
  h.g = g;
  h.params = params;
  std::mt19937_64 rng(params.seed);
  h.m_partition = frederickson_group(g, mst, params.s_low, &h.work);
  h.group_of.assign(static_cast<size_t>(n), -1);
  for (size_t i = 0; i < h.m_partition.size(); ++i)
    for (NodeId x : h.m_partition[i]) h.group_of[x] = static_cast<int>(i);
  const size_t cap = static_cast<size_t>(g.edge_capacity());
  h.m_edge.assign(cap, 0);
  for (EdgeId e : mst)
    if (h.group_of[g.edge(e).u] == h.group_of[g.edge(e).v]) h.m_edge[e] = 1;
  const int64_t dp = params.d - 2;
  h.band_of.assign(cap, 0);
  for (EdgeId e : alive)
    if (!h.m_edge[e]) h.band_of[e] = static_cast<int>((m - g.weight(e).rank) * dp / m) + 1;
  h.owner.assign(cap, -1);
  h.leaf_of.assign(static_cast<size_t>(n), -1);

  Cluster root;
  root.nodes.resize(static_cast<size_t>(n));
  for (NodeId v = 0; v < n; ++v) root.nodes[v] = v;
  root.edges = alive;
  std::sort(root.edges.begin(), root.edges.end());
  for (size_t i = 0; i < h.m_partition.size(); ++i) root.groups.push_back(static_cast<int>(i));
  h.clusters.push_back(std::move(root));

  // Clusters are appended in BFS order, so indices grow with level.
  const double p_call = params.p / (2.0 * std::max(1, n));
  for (size_t ci = 0; ci < h.clusters.size(); ++ci) {
    const int level = h.clusters[ci].level;
    if (level > params.d + 2) throw std::logic_error("msf_decompose: recursion did not bottom out");
    if (static_cast<int64_t>(h.clusters[ci].edges.size()) <= params.s_high) {
      Cluster& c = h.clusters[ci];
      c.leaf = true;
      c.own = c.edges;
      for (EdgeId e : c.own) h.owner[e] = static_cast<int>(ci);
      for (NodeId x : c.nodes) h.leaf_of[x] = static_cast<int>(ci);
      continue;
    }
    // Local copy of the cluster on compact ids.
    std::vector<NodeId> nodes = h.clusters[ci].nodes;
    std::unordered_map<NodeId, NodeId> local;
    for (size_t i = 0; i < nodes.size(); ++i) local[nodes[i]] = static_cast<NodeId>(i);
    Graph lg(static_cast<int>(nodes.size()));
    for (EdgeId e : h.clusters[ci].edges) lg.add_edge(local[g.edge(e).u], local[g.edge(e).v], g.weight(e));
    NodePartition lgroups;
    for (int gi : h.clusters[ci].groups) {
      std::vector<NodeId> u;
      for (NodeId x : h.m_partition[static_cast<size_t>(gi)]) u.push_back(local.at(x));
      lgroups.push_back(std::move(u));
    }
    RespectingDecomposition rd =
        expansion_decompose_respecting(lg, lgroups, params.s_low, params.alpha, p_call, inner, rng);
    h.work += rd.work + static_cast<int64_t>(h.clusters[ci].edges.size());
    h.gamma = std::max(h.gamma, rd.gamma);
    h.certified = h.certified && rd.certified;
    std::vector<int> dec_part(nodes.size(), -1);
    for (size_t j = 0; j < rd.parts.size(); ++j)
      for (NodeId x : rd.parts[j]) dec_part[x] = static_cast<int>(j);
    // Children are the components of each part once this level's band edges
    // are dropped, so every child is connected by its own edges. M-clusters
    // never split because their edges are outside every band.
    std::vector<std::vector<NodeId>> adj(nodes.size());
    for (EdgeId e : h.clusters[ci].edges) {
      NodeId a = local[g.edge(e).u], b = local[g.edge(e).v];
      if (dec_part[a] != dec_part[b] || h.band_of[e] == level) continue;
      adj[a].push_back(b);
      adj[b].push_back(a);
    }
    std::vector<int> part(nodes.size(), -1);
    NodePartition kid_nodes;
    for (NodeId s = 0; s < static_cast<NodeId>(nodes.size()); ++s) {
      if (part[s] >= 0) continue;
      const int id = static_cast<int>(kid_nodes.size());
      kid_nodes.push_back({s});
      part[s] = id;
      for (size_t q = 0; q < kid_nodes.back().size(); ++q)
        for (NodeId y : adj[kid_nodes.back()[q]])
          if (part[y] < 0) {
            part[y] = id;
            kid_nodes.back().push_back(y);
          }
    }
    h.work += static_cast<int64_t>(nodes.size());

    std::vector<Cluster> kids(kid_nodes.size());
    for (size_t j = 0; j < kid_nodes.size(); ++j) {
      kids[j].parent = static_cast<int>(ci);
      kids[j].level = level + 1;
      for (NodeId x : kid_nodes[j]) kids[j].nodes.push_back(nodes[x]);
      std::sort(kids[j].nodes.begin(), kids[j].nodes.end());
    }
    for (int gi : h.clusters[ci].groups) {
      NodeId x = local.at(h.m_partition[static_cast<size_t>(gi)].front());
      kids[static_cast<size_t>(part[x])].groups.push_back(gi);
    }
    Cluster& c = h.clusters[ci];
    c.leaf = false;
    const Weight floor_w{h.band_floor(level), 1, 0};
    for (EdgeId e : c.edges) {
      int a = part[local[g.edge(e).u]], b = part[local[g.edge(e).v]];
      bool in_band = h.band_of[e] == level;
      if (in_band) c.band.push_back(e);
      if (dec_part[local[g.edge(e).u]] != dec_part[local[g.edge(e).v]]) c.cross.push_back(e);
      if (a == b && !in_band) {
        kids[static_cast<size_t>(a)].edges.push_back(e);
        continue;
      }
      c.own.push_back(e);
      h.owner[e] = static_cast<int>(ci);
      Weight w = g.weight(e);
      Weight raised{floor_w.rank, 1, w.key};
      if (w < raised) {
        h.g.set_weight(e, raised);
        h.reweighted.push_back(e);
      }
    }
    h.crossing += static_cast<int64_t>(c.cross.size());
    for (size_t j = 0; j < kids.size(); ++j) c.children.push_back(static_cast<int>(h.clusters.size() + j));
    for (auto& k : kids) h.clusters.push_back(std::move(k));
  }
  std::sort(h.reweighted.begin(), h.reweighted.end());
  return h;
}

Ratio conductance_guarantee(Ratio alpha, int64_t s_low) {
  return std::min(Ratio(1, 6 * s_low), alpha / Ratio(108 * s_low));
}

namespace {

// Graph on the given nodes with only the listed edges, on compact ids.
Graph cluster_graph(const Graph& g, std::span<const NodeId> nodes, std::span<const EdgeId> edges) {
  std::unordered_map<NodeId, NodeId> local;
  for (size_t i = 0; i < nodes.size(); ++i) local[nodes[i]] = static_cast<NodeId>(i);
  Graph out(static_cast<int>(nodes.size()));
  for (EdgeId e : edges) {
    auto a = local.find(g.edge(e).u), b = local.find(g.edge(e).v);
    if (a != local.end() && b != local.end()) out.add_edge(a->second, b->second, g.weight(e));
  }
  return out;
}

std::vector<EdgeId> minus(std::vector<EdgeId> a, const std::set<EdgeId>& d) {
  std::erase_if(a, [&](EdgeId e) { return d.count(e) != 0; });
  return a;
}

}  // namespace

HierarchyReport verify_hierarchy(const Graph& original, const Hierarchy& h,
                                 std::span<const std::vector<EdgeId>> deletion_sets) {
  HierarchyReport r;
  for (int i = 1; i <= 8; ++i) r.prop[i] = Check::kPass;
  auto fail = [&](int i, std::string why) {
    r.prop[i] = Check::kFail;
    r.notes.push_back("property " + std::to_string(i) + ": " + std::move(why));
  };
  const MsfDecompParams& pr = h.params;
  const std::vector<EdgeId> alive = original.alive_edges();
  const int64_t n = original.num_nodes();
  const double alpha = boost::rational_cast<double>(pr.alpha);

  // Structure: a rooted tree whose children partition the parent's nodes, and
  // whose own-edge sets partition E.
  if (h.clusters.empty() || h.clusters[0].parent != -1 || static_cast<int64_t>(h.clusters[0].nodes.size()) != n)
    r.notes.push_back("structure: root is not the whole graph");
  std::vector<int> own_count(static_cast<size_t>(original.edge_capacity()), 0);
  for (size_t ci = 0; ci < h.clusters.size(); ++ci) {
    const Cluster& c = h.clusters[ci];
    for (EdgeId e : c.own) ++own_count[e];
    if (c.leaf) continue;
    std::vector<NodeId> un;
    for (int k : c.children) {
      const Cluster& ch = h.clusters[static_cast<size_t>(k)];
      un.insert(un.end(), ch.nodes.begin(), ch.nodes.end());
      if (!std::includes(c.edges.begin(), c.edges.end(), ch.edges.begin(), ch.edges.end()))
        r.notes.push_back("structure: child edges outside the parent");
    }
    std::sort(un.begin(), un.end());
    if (un != c.nodes) r.notes.push_back("structure: children do not partition the parent");
  }
  for (EdgeId e : alive)
    if (own_count[e] != 1) {
      r.notes.push_back("structure: own-edge sets do not partition E");
      break;
    }
  bool structure_ok = r.notes.empty();

  // 1 and 2.
  std::vector<EdgeId> changed;
  for (EdgeId e : alive) {
    if (h.g.weight(e) < original.weight(e)) fail(1, "weight decreased on edge " + std::to_string(e));
    if (h.g.weight(e) != original.weight(e)) changed.push_back(e);
  }
  if (changed != h.reweighted) r.notes.push_back("reweighted list does not match the weights");
  if (static_cast<double>(changed.size()) > alpha * pr.d * h.gamma * static_cast<double>(n))
    fail(2, std::to_string(changed.size()) + " reweighted edges");

  // 3.
  std::vector<std::set<EdgeId>> ds{{}};
  for (const auto& d : deletion_sets) ds.emplace_back(d.begin(), d.end());
  for (const Cluster& c : h.clusters) {
    if (c.leaf) continue;
    for (const auto& d : ds) {
      std::vector<EdgeId> whole = kruskal(h.g, minus(c.edges, d));
      std::vector<EdgeId> parts;
      for (int k : c.children) {
        auto sub = kruskal(h.g, minus(h.clusters[static_cast<size_t>(k)].edges, d));
        parts.insert(parts.end(), sub.begin(), sub.end());
      }
      std::set<EdgeId> own(c.own.begin(), c.own.end());
      for (EdgeId e : whole)
        if (own.count(e)) parts.push_back(e);
      std::sort(parts.begin(), parts.end());
      if (parts != whole) {
        fail(3, "identity broken on a level-" + std::to_string(c.level) + " cluster");
        break;
      }
    }
    if (r.prop[3] == Check::kFail) break;
  }

  // 4, 5, 6.
  if (h.depth() > pr.d) fail(4, "depth " + std::to_string(h.depth()));
  for (const Cluster& c : h.clusters) {
    bool small = static_cast<int64_t>(c.edges.size()) <= pr.s_high;
    if (c.leaf != small) fail(5, "leaf flag disagrees with |E(C)| = " + std::to_string(c.edges.size()));
    if (c.leaf && 3 * static_cast<int64_t>(c.nodes.size()) < pr.s_low)
      fail(6, "leaf with " + std::to_string(c.nodes.size()) + " nodes");
  }

  // 7.
  std::map<int, int64_t> per_level;
  for (const Cluster& c : h.clusters)
    if (!c.leaf) per_level[c.level] += static_cast<int64_t>(c.own.size());
  const double bound7 = static_cast<double>(n) / (pr.d - 2) + alpha * h.gamma * static_cast<double>(n);
  for (auto [lv, cnt] : per_level)
    if (static_cast<double>(cnt) > bound7)
      fail(7, "level " + std::to_string(lv) + " has " + std::to_string(cnt) + " own edges");

  // 8, on small non-root clusters by enumeration.
  r.phi_bound = conductance_guarantee(pr.alpha, pr.s_low);
  for (size_t ci = 1; ci < h.clusters.size(); ++ci) {
    const Cluster& c = h.clusters[ci];
    if (c.nodes.size() > 16 || c.nodes.size() < 2) continue;
    ++r.checked_clusters;
    const Cluster& par = h.clusters[static_cast<size_t>(c.parent)];
    Graph own_g = cluster_graph(h.g, c.nodes, c.edges);
    Graph ind_g = cluster_graph(h.g, c.nodes, par.edges);
    auto a = min_conductance_bruteforce(own_g, 16);
    auto b = min_conductance_bruteforce(ind_g, 16);
    Ratio pa = a ? a->phi : Ratio(1), pb = b ? b->phi : Ratio(1);
    if (r.min_phi_cluster < 0 || pa < r.min_phi_cluster) r.min_phi_cluster = pa;
    if (r.min_phi_induced < 0 || pb < r.min_phi_induced) r.min_phi_induced = pb;
  }
  if (r.checked_clusters == 0) {
    r.prop[8] = Check::kUnchecked;
  } else if (!h.certified) {
    r.prop[8] = Check::kUnchecked;
    r.notes.push_back("property 8: inner decomposer did not certify every part");
  } else if (r.min_phi_induced < r.phi_bound) {
    fail(8, "induced conductance below the guarantee");
  }
  if (!structure_ok) r.prop[3] = Check::kFail;
  return r;
}

void dump_hierarchy(std::ostream& out, const Hierarchy& h) {
  for (const Cluster& c : h.clusters)
    out << c.level << ' ' << c.parent << ' ' << c.nodes.size() << ' ' << c.edges.size() << ' ' << c.own.size() << ' '
        << (c.leaf ? 1 : 0) << '\n';
}

}  // namespace dmsf
