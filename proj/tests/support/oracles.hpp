#pragma once

#include "dmsf/flow.hpp"
#include "dmsf/graph.hpp"

#include <optional>
#include <string>

namespace dmsf::oracle {

// Max-flow from a super source (capacity Δ(v)) to a super sink (capacity T(v))
// with every undirected edge of capacity U.
int64_t max_routable(const Graph& g, const NodeMap& source, const NodeMap& sink, int64_t U);
bool feasible_flow_exists(const Graph& g, const NodeMap& source, const NodeMap& sink, int64_t U);

// Empty string when the outcome's preflow is valid for (Δ, T) with the given
// congestion bound and its reported ex/ab match a recomputation.
std::string check_preflow(const Graph& g, const NodeMap& source, const NodeMap& sink, const FlowOutcome& out,
                          int64_t congestion_bound, bool push_excess_rule = true);

// Minimum conductance of the induced subgraph g[nodes] (degrees inside it);
// nullopt when it has no proper cut with positive volume on both sides.
std::optional<Ratio> min_conductance_induced(const Graph& g, std::span<const NodeId> nodes);

// Nodes reachable from start in g, ignoring nothing.
std::vector<NodeId> component_of(const Graph& g, NodeId start);

}  // namespace dmsf::oracle
