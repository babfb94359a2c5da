#pragma once

#include "dmsf/graph.hpp"

#include <map>
#include <optional>
#include <set>
#include <unordered_map>
#include <vector>

namespace dmsf {

class UnionFind {
 public:
  explicit UnionFind(int n = 0) : parent_(static_cast<size_t>(n)), size_(static_cast<size_t>(n), 1) {
    for (int i = 0; i < n; ++i) parent_[i] = i;
  }
  int find(int x) {
    while (parent_[x] != x) x = parent_[x] = parent_[parent_[x]];
    return x;
  }
  bool unite(int a, int b) {
    a = find(a), b = find(b);
    if (a == b) return false;
    if (size_[a] < size_[b]) std::swap(a, b);
    parent_[b] = a;
    size_[a] += size_[b];
    return true;
  }

 private:
  std::vector<int> parent_;
  std::vector<int> size_;
};

// Unique MSF of the alive edges, sorted by edge id.
std::vector<EdgeId> kruskal(const Graph& g);
// MSF restricted to a subset of alive edges, sorted by edge id.
std::vector<EdgeId> kruskal(const Graph& g, std::span<const EdgeId> subset);

struct MsfDelta {
  std::vector<EdgeId> added;
  std::vector<EdgeId> removed;
  bool empty() const { return added.empty() && removed.empty(); }
  // Appends other, cancelling an add followed by a remove of the same edge.
  void merge(const MsfDelta& other);
};

// Link-cut tree over nodes plus one splay node per tree edge, aggregating the
// heaviest edge on preferred paths.
class DynamicForest {
 public:
  explicit DynamicForest(int n = 0);
  NodeId add_node();
  int num_nodes() const { return num_vertices_; }

  void link(NodeId u, NodeId v, EdgeId e, Weight w);
  void cut(EdgeId e);
  bool connected(NodeId u, NodeId v);
  bool has_edge(EdgeId e) const { return edge_node_.count(e) != 0; }
  // Heaviest edge on the u-v path; nullopt if not connected. u == v is an input error.
  std::optional<EdgeId> path_max(NodeId u, NodeId v);
  // Edges on the u-v path, in path order; empty if not connected.
  std::vector<EdgeId> path_edges(NodeId u, NodeId v);
  size_t num_edges() const { return edge_node_.size(); }
  int64_t work() const { return work_; }

 private:
  struct Node {
    int ch[2] = {-1, -1};
    int parent = -1;
    bool flip = false;
    bool is_edge = false;
    EdgeId eid = kNoEdge;
    NodeId end_u = kNoNode;
    NodeId end_v = kNoNode;
    Weight w;
    int best = -1;  // node index of the heaviest edge node in the splay subtree
  };
  bool is_root(int x) const;
  void push(int x);
  void pull(int x);
  void rotate(int x);
  void splay(int x);
  void access(int x);
  void evert(int x);
  int find_root(int x);
  void cut_adjacent(int a, int b);
  int new_node();
  void check_vertex(NodeId v) const;
  void collect(int x, std::vector<EdgeId>& out);

  std::vector<Node> t_;
  std::vector<int> free_;
  int num_vertices_ = 0;
  std::vector<int> vertex_node_;
  std::unordered_map<EdgeId, int> edge_node_;
  int64_t work_ = 0;
};

// Decremental MSF contract shared by the base engines and the recursive engine.
class DecrementalMsf {
 public:
  virtual ~DecrementalMsf() = default;
  virtual const Graph& graph() const = 0;
  virtual bool in_forest(EdgeId e) const = 0;
  virtual std::vector<EdgeId> forest() const = 0;
  virtual MsfDelta erase(EdgeId e) = 0;
  virtual int64_t work() const { return 0; }
};

// Fully dynamic MSF for small multigraphs. Keeps the lightest edge per node
// pair and rescans the pairs on a tree deletion.
class MultigraphMsf : public DecrementalMsf {
 public:
  explicit MultigraphMsf(Graph g);
  const Graph& graph() const override { return g_; }
  bool in_forest(EdgeId e) const override { return tree_.count(e) != 0; }
  std::vector<EdgeId> forest() const override;
  MsfDelta erase(EdgeId e) override;
  std::pair<EdgeId, MsfDelta> insert(NodeId u, NodeId v, Weight w);
  NodeId add_node();
  int64_t work() const override { return work_; }

 private:
  using Key = std::pair<NodeId, NodeId>;
  static Key key_of(const Edge& e) { return {std::min(e.u, e.v), std::max(e.u, e.v)}; }
  MsfDelta place(EdgeId e);

  Graph g_;
  DynamicForest df_;
  std::set<EdgeId> tree_;
  std::map<Key, std::set<std::pair<Weight, EdgeId>>> pairs_;
  int64_t work_ = 0;
};

// Decremental MSF where every non-tree edge has exactly one endpoint in S and
// nodes outside S have bounded degree. Insertions are accepted as long as the
// resulting non-tree edges keep the invariant.
class SCoveredMsf : public DecrementalMsf {
 public:
  SCoveredMsf(Graph g, std::vector<NodeId> s, int64_t max_outside_degree = 3);
  const Graph& graph() const override { return g_; }
  bool in_forest(EdgeId e) const override { return tree_.count(e) != 0; }
  std::vector<EdgeId> forest() const override;
  MsfDelta erase(EdgeId e) override;
  std::pair<EdgeId, MsfDelta> insert(NodeId u, NodeId v, Weight w);
  int64_t work() const override { return work_; }
  int64_t last_scan() const { return last_scan_; }
  bool in_s(NodeId v) const { return in_s_.at(static_cast<size_t>(v)) != 0; }
  const std::vector<NodeId>& s() const { return s_; }

 private:
  void check_nontree(EdgeId e) const;

  Graph g_;
  std::vector<NodeId> s_;
  std::vector<char> in_s_;
  DynamicForest df_;
  std::set<EdgeId> tree_;
  int64_t work_ = 0;
  int64_t last_scan_ = 0;
};

}  // namespace dmsf
