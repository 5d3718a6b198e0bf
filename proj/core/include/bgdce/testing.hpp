#pragma once

#include <Eigen/Core>
#include <memory>
#include <utility>
#include <vector>

#include "bgdce/game.hpp"
#include "bgdce/graph.hpp"
#include "bgdce/io.hpp"
#include "bgdce/random.hpp"

namespace bgdce {

// Fixture generators shared by the validate battery and the test suites.

// k parallel s-t edges.
GraphSpec parallel_edges(int k);

// s -> {a, b} -> t, four edges.
GraphSpec diamond();

// The eight-node running example: two parallel chains that merge, pass a
// bottleneck, and split again. Red edges under the lowest-index blue rule
// are 0, 1 and 6; the third basis path truncates the second one.
GraphSpec figure_graph();

struct LayeredDagParams {
  int min_layers = 3;
  int max_layers = 6;
  int max_width = 3;
  int extra_edges = 6;
  int path_cap = 300;
};

// Random layered DAG with one source, one sink, every node on some s-t path,
// at most 14 nodes / 25 edges, and at most path_cap s-t paths.
GraphSpec random_layered_dag(Rng& rng, const LayeredDagParams& params = {});

// Convex combination of k random s-t paths (random-walk sampled, exponential
// weights normalized to one).
Eigen::VectorXd random_flow_point(const AgentGraph& g, Rng& rng, int k_atoms);

// Random congestion game on the given graph: nondecreasing tables with
// entries in [0, c_max] for every edge, agent pairs copied from the graph.
GameSpec random_game(const GraphSpec& graph, Rng& rng, double c_max);

}  // namespace bgdce
