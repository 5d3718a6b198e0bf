#include "bgdce/testing.hpp"

#include <algorithm>
#include <cmath>

#include "bgdce/errors.hpp"

namespace bgdce {

GraphSpec parallel_edges(int k) {
  std::vector<std::pair<int, int>> edges(k, {0, 1});
  GraphSpec spec;
  spec.dag = std::make_shared<Dag>(2, std::move(edges));
  spec.agents = {{0, 1}};
  return spec;
}

GraphSpec diamond() {
  GraphSpec spec;
  spec.dag = std::make_shared<Dag>(
      4, std::vector<std::pair<int, int>>{{0, 1}, {0, 2}, {1, 3}, {2, 3}});
  spec.agents = {{0, 3}};
  return spec;
}

GraphSpec figure_graph() {
  GraphSpec spec;
  spec.dag = std::make_shared<Dag>(8, std::vector<std::pair<int, int>>{
                                          {0, 1},
                                          {0, 2},
                                          {1, 3},
                                          {2, 3},
                                          {3, 4},
                                          {4, 6},
                                          {4, 5},
                                          {5, 7},
                                          {6, 7},
                                      });
  spec.agents = {{0, 7}};
  return spec;
}

GraphSpec random_layered_dag(Rng& rng, const LayeredDagParams& params) {
  for (int attempt = 0; attempt < 64; ++attempt) {
    int layers = params.min_layers +
                 rng.next_index(params.max_layers - params.min_layers + 1);
    std::vector<std::vector<int>> layer_nodes(layers);
    int next_id = 0;
    for (int l = 0; l < layers; ++l) {
      int width = (l == 0 || l == layers - 1) ? 1 : 1 + rng.next_index(params.max_width);
      for (int w = 0; w < width; ++w) layer_nodes[l].push_back(next_id++);
    }
    if (next_id > 14) continue;

    std::vector<std::pair<int, int>> edges;
    for (int l = 0; l + 1 < layers; ++l) {
      for (int v : layer_nodes[l + 1])
        edges.emplace_back(layer_nodes[l][rng.next_index(
                               static_cast<int>(layer_nodes[l].size()))],
                           v);
      for (int u : layer_nodes[l]) {
        bool covered = false;
        for (const auto& [a, b] : edges) covered = covered || a == u;
        if (!covered)
          edges.emplace_back(u, layer_nodes[l + 1][rng.next_index(
                                    static_cast<int>(layer_nodes[l + 1].size()))]);
      }
    }
    int extra = rng.next_index(params.extra_edges + 1);
    for (int i = 0; i < extra && static_cast<int>(edges.size()) < 25; ++i) {
      int la = rng.next_index(layers - 1);
      int lb = la + 1 + rng.next_index(layers - 1 - la);
      int u = layer_nodes[la][rng.next_index(static_cast<int>(layer_nodes[la].size()))];
      int v = layer_nodes[lb][rng.next_index(static_cast<int>(layer_nodes[lb].size()))];
      edges.emplace_back(u, v);
    }
    if (static_cast<int>(edges.size()) > 25) continue;

    GraphSpec spec;
    spec.dag = std::make_shared<Dag>(next_id, std::move(edges));
    spec.agents = {{0, next_id - 1}};
    AgentGraph g(spec.dag, 0, next_id - 1);
    try {
      enumerate_paths(g, params.path_cap);
    } catch (const CapExceededError&) {
      continue;
    }
    return spec;
  }
  throw InvariantError("random DAG generation failed to converge");
}

Eigen::VectorXd random_flow_point(const AgentGraph& g, Rng& rng, int k_atoms) {
  if (k_atoms < 1) throw PreconditionError("need at least one atom");
  Eigen::VectorXd x = Eigen::VectorXd::Zero(g.dag().edge_count());
  std::vector<double> weights(k_atoms);
  double total = 0.0;
  for (double& w : weights) {
    w = -std::log(1.0 - rng.next_double());
    total += w;
  }
  for (int k = 0; k < k_atoms; ++k) {
    int v = g.source();
    while (v != g.sink()) {
      const auto& out = g.out_edges(v);
      int e = out[rng.next_index(static_cast<int>(out.size()))];
      x[e] += weights[k] / total;
      v = g.dag().edges()[e].second;
    }
  }
  return x;
}

GameSpec random_game(const GraphSpec& graph, Rng& rng, double c_max) {
  GameSpec spec;
  spec.dag = graph.dag;
  spec.agents = graph.agents;
  spec.c_max = c_max;
  const int n = static_cast<int>(graph.agents.size());
  for (int e = 0; e < graph.dag->edge_count(); ++e) {
    std::vector<double> table(n + 1, 0.0);
    for (int l = 1; l <= n; ++l) {
      double lo = table[l - 1];
      table[l] = lo + (c_max - lo) * rng.next_double();
    }
    spec.cost_tables.push_back(std::move(table));
  }
  validate_game(spec);
  return spec;
}

}  // namespace bgdce
