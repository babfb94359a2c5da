#pragma once

#include "dmsf/graph.hpp"

#include <cstdint>
#include <random>
#include <vector>

namespace dmsf::gen {

// Weights are a random permutation of 1..m unless stated otherwise.
Graph random_regular3(int n, uint64_t seed);
Graph cycle(int n, uint64_t seed);
Graph path(int n);
Graph complete(int n);
// Two cliques of size k joined by a single edge.
Graph barbell(int k, uint64_t seed);
Graph erdos_renyi(int n, double p, uint64_t seed);
Graph random_connected(int n, int extra_edges, uint64_t seed, int max_degree = 0);
void shuffle_weights(Graph& g, uint64_t seed);

}  // namespace dmsf::gen
