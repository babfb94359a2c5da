#pragma once

#include <boost/rational.hpp>

#include <compare>
#include <cstdint>
#include <iosfwd>
#include <limits>
#include <optional>
#include <span>
#include <utility>
#include <vector>

namespace dmsf {

using NodeId = int32_t;
using EdgeId = int32_t;
using Ratio = boost::rational<int64_t>;

inline constexpr EdgeId kNoEdge = -1;
inline constexpr NodeId kNoNode = -1;

// Lexicographic (rank, tier, key). tier 1 on a rank r reads as r + 1/2.
// key keeps weights distinct; it defaults to the edge id of the first graph
// the edge was added to and is carried along unchanged by every copy.
struct Weight {
  int64_t rank = 0;
  int32_t tier = 0;
  int64_t key = -1;
  auto operator<=>(const Weight&) const = default;
};

struct Edge {
  NodeId u = kNoNode;
  NodeId v = kNoNode;
  Weight w;
  bool alive = false;
  int32_t pos_u = -1;
  int32_t pos_v = -1;
};

struct Arc {
  NodeId to;
  EdgeId e;
};

class Graph {
 public:
  explicit Graph(int n = 0);

  NodeId add_node();
  // key < 0 is replaced by the new edge id.
  EdgeId add_edge(NodeId u, NodeId v, Weight w);
  EdgeId add_edge(NodeId u, NodeId v, int64_t rank) { return add_edge(u, v, Weight{rank, 0, -1}); }
  void remove_edge(EdgeId e);

  const Edge& edge(EdgeId e) const { return edges_.at(static_cast<size_t>(e)); }
  bool alive(EdgeId e) const { return e >= 0 && e < edge_capacity() && edges_[e].alive; }
  const Weight& weight(EdgeId e) const { return edges_.at(static_cast<size_t>(e)).w; }
  void set_weight(EdgeId e, Weight w) { edges_.at(static_cast<size_t>(e)).w = w; }
  NodeId other(EdgeId e, NodeId x) const;

  std::span<const Arc> adj(NodeId v) const { return adj_.at(static_cast<size_t>(v)); }
  int64_t degree(NodeId v) const { return static_cast<int64_t>(adj_.at(static_cast<size_t>(v)).size()); }
  bool has_node(NodeId v) const { return v >= 0 && v < num_nodes(); }

  int num_nodes() const { return static_cast<int>(adj_.size()); }
  int64_t num_edges() const { return alive_count_; }
  int edge_capacity() const { return static_cast<int>(edges_.size()); }
  std::vector<EdgeId> alive_edges() const;
  int64_t max_degree() const;

 private:
  void detach(NodeId x, int32_t pos);

  std::vector<std::vector<Arc>> adj_;
  std::vector<Edge> edges_;
  int64_t alive_count_ = 0;
};

struct Cut {
  std::vector<NodeId> members;  // sorted
  int64_t volume = 0;
  int64_t boundary = 0;
};

int64_t volume(const Graph& g, std::span<const NodeId> s);
Cut make_cut(const Graph& g, std::span<const NodeId> s);
Ratio conductance(const Graph& g, const Cut& s);
Ratio conductance(const Graph& g, std::span<const NodeId> s);
Ratio expansion(const Graph& g, const Cut& s);
Ratio expansion(const Graph& g, std::span<const NodeId> s);

inline constexpr int kBruteForceCap = 20;

struct MinCut {
  Cut cut;
  Ratio phi;
};
// Exact minimum conductance cut over all proper bipartitions with nonzero
// smaller-side volume. The reported side is the smaller-volume side (node 0
// side on a tie); ties in phi go to the lexicographically smallest node list.
// nullopt when no proper cut has positive volume on both sides.
std::optional<MinCut> min_conductance_bruteforce(const Graph& g, int cap = kBruteForceCap);

struct Subgraph {
  Graph g;
  std::vector<NodeId> to_parent;  // local node -> parent node
  std::vector<EdgeId> edge_to_parent;
};
// Induced subgraph on nodes (in the given order). Weights are copied.
Subgraph induced_subgraph(const Graph& g, std::span<const NodeId> nodes);

struct DegreeReduced {
  Graph g;
  std::vector<NodeId> origin;                // reduced node -> original node
  std::vector<std::vector<NodeId>> gadget;   // original node -> its path of reduced nodes
  std::vector<EdgeId> to_reduced;            // original edge -> reduced edge
  std::vector<EdgeId> to_original;           // reduced edge -> original edge, kNoEdge for gadget edges
  int64_t next_gadget_rank = 0;

  // Mirror an insertion of (u, v, w) made on the original graph whose new id is orig_e.
  EdgeId insert(EdgeId orig_e, NodeId u, NodeId v, Weight w);
  // Mirror a deletion; returns the reduced edge that was removed.
  EdgeId erase(EdgeId orig_e);

 private:
  NodeId attach_point(NodeId x);
};

// Gadget edges use ranks from kGadgetRankBase upward, so real ranks must stay above it.
inline constexpr int64_t kGadgetRankBase = std::numeric_limits<int64_t>::min() / 4;
DegreeReduced degree_reduce(const Graph& g);

// "n m" header then m lines "u v w".
Graph read_edge_list(std::istream& in);
void write_edge_list(std::ostream& out, const Graph& g);

}  // namespace dmsf
