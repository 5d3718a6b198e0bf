#include <Eigen/Core>
#include <algorithm>
#include <utility>
#include <vector>

#include "bgdce/errors.hpp"
#include "bgdce/graph.hpp"
#include "bgdce/random.hpp"
#include "bgdce/testing.hpp"
#include "doctest.h"
#include "test_support.hpp"

using namespace bgdce;
using bgdce_test::agent_graph;

TEST_SUITE("graph") {

TEST_CASE("dag stores edges and rejects bad input") {
  GraphSpec fig = figure_graph();
  CHECK(fig.dag->node_count() == 8);
  CHECK(fig.dag->edge_count() == 9);
  CHECK(fig.dag->edge_source(4) == 3);
  CHECK(fig.dag->edge_dest(4) == 4);

  CHECK_THROWS_AS(Dag(0, {}), PreconditionError);
  CHECK_THROWS_AS(Dag(2, {{0, 2}}), PreconditionError);
  CHECK_THROWS_AS(Dag(2, {{1, 1}}), PreconditionError);
  CHECK_THROWS_AS(Dag(3, {{0, 1}, {1, 2}, {2, 0}}), PreconditionError);
}

TEST_CASE("topological order is consistent with every edge") {
  GraphSpec fig = figure_graph();
  const Dag& dag = *fig.dag;
  const auto& order = dag.topo_order();
  REQUIRE(static_cast<int>(order.size()) == dag.node_count());
  for (int e = 0; e < dag.edge_count(); ++e)
    CHECK(dag.topo_rank(dag.edge_source(e)) < dag.topo_rank(dag.edge_dest(e)));
  for (int v = 0; v < dag.node_count(); ++v) CHECK(order[dag.topo_rank(v)] == v);
}

TEST_CASE("path vectors expose incidence and costs") {
  GraphSpec fig = figure_graph();
  PathVec p(*fig.dag, {0, 2, 4, 5, 8});
  CHECK(p.from() == 0);
  CHECK(p.to() == 7);
  CHECK(p.contains(4));
  CHECK_FALSE(p.contains(6));

  Eigen::VectorXd v = p.as_vector();
  REQUIRE(v.size() == 9);
  CHECK(v.sum() == doctest::Approx(5.0));
  CHECK(v[0] == 1.0);
  CHECK(v[6] == 0.0);

  Eigen::VectorXd w = Eigen::VectorXd::LinSpaced(9, 1.0, 9.0);
  CHECK(p.cost_under(w) == doctest::Approx(1 + 3 + 5 + 6 + 9));

  PathVec empty(*fig.dag, {}, 3);
  CHECK(empty.empty());
  CHECK(empty.from() == 3);
  CHECK(empty.to() == 3);

  CHECK_THROWS_AS(PathVec(*fig.dag, {0, 4}), PreconditionError);
  CHECK_THROWS_AS(PathVec(*fig.dag, {}, -1), PreconditionError);
}

TEST_CASE("agent graph keeps only nodes and edges on s-t paths") {
  // Node 3 is a dead end and edge 2 leads into it.
  auto dag = std::make_shared<Dag>(4, std::vector<std::pair<int, int>>{
                                          {0, 1}, {1, 2}, {0, 3}});
  AgentGraph g(dag, 0, 2);
  CHECK(g.node_count() == 3);
  CHECK(g.edge_count() == 2);
  CHECK(g.has_edge(0));
  CHECK(g.has_edge(1));
  CHECK_FALSE(g.has_edge(2));
  CHECK_FALSE(g.has_node(3));

  CHECK_THROWS_AS(AgentGraph(dag, 0, 0), PreconditionError);
  CHECK_THROWS_AS(AgentGraph(dag, 2, 0), PreconditionError);  // no path back
}

TEST_CASE("enumerate_paths lists all s-t paths in edge-lex order") {
  AgentGraph g = agent_graph(figure_graph());
  std::vector<PathVec> paths = enumerate_paths(g, 300);
  REQUIRE(paths.size() == 4);
  CHECK(paths[0].edge_list() == std::vector<int>{0, 2, 4, 5, 8});
  CHECK(paths[1].edge_list() == std::vector<int>{0, 2, 4, 6, 7});
  CHECK(paths[2].edge_list() == std::vector<int>{1, 3, 4, 5, 8});
  CHECK(paths[3].edge_list() == std::vector<int>{1, 3, 4, 6, 7});

  CHECK_THROWS_AS(enumerate_paths(g, 3), CapExceededError);

  AgentGraph par = agent_graph(parallel_edges(3));
  CHECK(enumerate_paths(par, 10).size() == 3);
}

TEST_CASE("shortest_path minimizes and breaks ties deterministically") {
  AgentGraph g = agent_graph(figure_graph());

  Eigen::VectorXd unit = Eigen::VectorXd::Ones(9);
  auto [p, cost] = shortest_path(g, unit);
  CHECK(cost == doctest::Approx(5.0));
  // All four paths tie; ties resolve toward the lower incoming edge index.
  CHECK(p.edge_list() == std::vector<int>{0, 2, 4, 6, 7});

  Eigen::VectorXd w = unit;
  w[6] = 10.0;  // push the tie-broken route off e->f
  auto [q, qcost] = shortest_path(g, w);
  CHECK(qcost == doctest::Approx(5.0));
  CHECK(q.edge_list() == std::vector<int>{0, 2, 4, 5, 8});

  CHECK_THROWS_AS(shortest_path(g, Eigen::VectorXd::Ones(3)), PreconditionError);
  Eigen::VectorXd neg = unit;
  neg[0] = -1.0;
  CHECK_THROWS_AS(shortest_path(g, neg), PreconditionError);
}

TEST_CASE("blue/red partition follows the lowest-index rule") {
  AgentGraph g = agent_graph(figure_graph());
  BlueRedPartition part = blue_red_partition(g);

  CHECK(part.red_edges == std::vector<int>{0, 1, 6});
  CHECK(part.blue_of_node[0] == -1);  // source
  CHECK(part.blue_of_node[7] == -1);  // sink
  CHECK(part.blue_of_node[1] == 2);
  CHECK(part.blue_of_node[2] == 3);
  CHECK(part.blue_of_node[3] == 4);
  CHECK(part.blue_of_node[4] == 5);  // e->g beats e->f on index
  CHECK(part.blue_of_node[5] == 7);
  CHECK(part.blue_of_node[6] == 8);

  for (int e : part.red_edges) CHECK(part.is_red[e]);
  CHECK(part.red_rank_of[6] == 2);
  CHECK(part.red_rank_of[4] == -1);

  // |red| = m - n + 2 on the reachable subgraph.
  CHECK(static_cast<int>(part.red_edges.size()) == g.edge_count() - g.node_count() + 2);

  AgentGraph dia = agent_graph(diamond());
  CHECK(blue_red_partition(dia).red_edges == std::vector<int>{0, 1});
}

TEST_CASE("blue_path walks designated edges to the sink") {
  AgentGraph g = agent_graph(figure_graph());
  BlueRedPartition part = blue_red_partition(g);

  CHECK(blue_path(g, part, 4).edge_list() == std::vector<int>{5, 8});
  CHECK(blue_path(g, part, 1).edge_list() == std::vector<int>{2, 4, 5, 8});
  CHECK(blue_path(g, part, 7).empty());
}

TEST_CASE("flow_violation detects broken conservation and off-polytope mass") {
  AgentGraph g = agent_graph(figure_graph());
  std::vector<PathVec> paths = enumerate_paths(g, 10);

  Eigen::VectorXd mix = Eigen::VectorXd::Zero(9);
  for (const PathVec& p : paths) mix += 0.25 * p.as_vector();
  CHECK(flow_violation(g, mix) <= 1e-12);
  CHECK(is_flow_point(g, mix, 1e-9));

  Eigen::VectorXd broken = mix;
  broken[4] = 0.5;  // bottleneck edge must carry the full unit
  CHECK(flow_violation(g, broken) == doctest::Approx(0.5));
  CHECK_FALSE(is_flow_point(g, broken, 1e-9));

  Eigen::VectorXd hot = mix;
  hot[0] = 1.25;
  CHECK(flow_violation(g, hot) >= 0.25);
}

TEST_CASE("random layered DAG fixture stays within its envelope") {
  Rng rng(derive_seed(7, 1));
  for (int rep = 0; rep < 25; ++rep) {
    GraphSpec spec = random_layered_dag(rng);
    const Dag& dag = *spec.dag;
    CHECK(dag.node_count() <= 14);
    CHECK(dag.edge_count() <= 25);
    AgentGraph g = agent_graph(spec);
    // Every node and edge of the generated graph lies on some s-t path.
    CHECK(g.node_count() == dag.node_count());
    CHECK(g.edge_count() == dag.edge_count());
    CHECK(enumerate_paths(g, 300).size() <= 300);
  }
}

}  // TEST_SUITE("graph")
