#pragma once

#include <Eigen/Core>
#include <cstddef>
#include <memory>
#include <utility>
#include <vector>

namespace bgdce {

// Directed acyclic multigraph. Nodes are 0..node_count-1. Edges keep their
// construction index, which is the coordinate index of every vector in R^m
// used by the rest of the library. Parallel edges are allowed.
class Dag {
 public:
  Dag(int node_count, std::vector<std::pair<int, int>> edges);

  int node_count() const { return node_count_; }
  int edge_count() const { return static_cast<int>(edges_.size()); }
  int edge_source(int e) const { return edges_[e].first; }
  int edge_dest(int e) const { return edges_[e].second; }
  const std::vector<std::pair<int, int>>& edges() const { return edges_; }
  const std::vector<int>& out_edges(int v) const { return out_[v]; }
  const std::vector<int>& in_edges(int v) const { return in_[v]; }

  // Kahn's order with min-node-id tie break. Cached at construction, which
  // also rejects cyclic input.
  const std::vector<int>& topo_order() const { return topo_order_; }
  int topo_rank(int v) const { return topo_rank_[v]; }

 private:
  int node_count_;
  std::vector<std::pair<int, int>> edges_;
  std::vector<std::vector<int>> out_, in_;
  std::vector<int> topo_order_, topo_rank_;
};

// An s->t path as an ordered edge list plus an incidence mask over all m
// edges. The empty path (s == t) carries its node explicitly.
class PathVec {
 public:
  PathVec() = default;
  PathVec(const Dag& dag, std::vector<int> edges, int start_node = -1);

  const std::vector<int>& edge_list() const { return edges_; }
  bool empty() const { return edges_.empty(); }
  bool contains(int e) const { return mask_[e] != 0; }
  int from() const { return from_; }
  int to() const { return to_; }
  int ambient_edges() const { return static_cast<int>(mask_.size()); }

  Eigen::VectorXd as_vector() const;
  double cost_under(const Eigen::VectorXd& edge_costs) const;

  bool operator==(const PathVec& other) const { return edges_ == other.edges_; }

 private:
  std::vector<int> edges_;
  std::vector<char> mask_;
  int from_ = -1, to_ = -1;
};

// View of the subgraph of nodes and edges lying on at least one source->sink
// path. Node and edge indices of the parent graph are preserved, so vectors
// stay in the parent's R^m with zero mass off the subgraph.
class AgentGraph {
 public:
  AgentGraph(std::shared_ptr<const Dag> dag, int source, int sink);

  const Dag& dag() const { return *dag_; }
  std::shared_ptr<const Dag> dag_ptr() const { return dag_; }
  int source() const { return source_; }
  int sink() const { return sink_; }

  bool has_node(int v) const { return node_active_[v] != 0; }
  bool has_edge(int e) const { return edge_active_[e] != 0; }
  const std::vector<int>& nodes() const { return nodes_; }  // by topo rank
  const std::vector<int>& edges() const { return edges_; }  // ascending
  int node_count() const { return static_cast<int>(nodes_.size()); }
  int edge_count() const { return static_cast<int>(edges_.size()); }

  // Active-only adjacency, ascending edge index.
  const std::vector<int>& out_edges(int v) const { return out_[v]; }
  const std::vector<int>& in_edges(int v) const { return in_[v]; }

 private:
  std::shared_ptr<const Dag> dag_;
  int source_, sink_;
  std::vector<char> node_active_, edge_active_;
  std::vector<int> nodes_, edges_;
  std::vector<std::vector<int>> out_, in_;
};

// All source->sink paths in lexicographic edge-index order. Throws
// CapExceededError as soon as more than `cap` paths exist.
std::vector<PathVec> enumerate_paths(const AgentGraph& g, std::size_t cap);

// Min-cost path under nonnegative edge weights. Ties break toward the lower
// incoming edge index at every node, so the result is deterministic.
std::pair<PathVec, double> shortest_path(const AgentGraph& g,
                                         const Eigen::VectorXd& weights);

struct BlueRedPartition {
  // Designated outgoing edge per interior node; -1 for source, sink and
  // nodes outside the subgraph.
  std::vector<int> blue_of_node;
  // Red edges ordered by topo rank of their source node, then edge index.
  std::vector<int> red_edges;
  std::vector<char> is_red;       // sized m
  std::vector<int> red_rank_of;   // m; position in red_edges or -1
};

// Blue edge = lowest-index active outgoing edge of each interior node; all
// remaining active edges are red. |red| = m_i - n_i + 2.
BlueRedPartition blue_red_partition(const AgentGraph& g);

// Follow blue edges from v to the sink. v == sink gives the empty path.
PathVec blue_path(const AgentGraph& g, const BlueRedPartition& p, int v);

// Max violation of the unit-flow constraints: conservation at interior
// nodes, unit source outflow and sink inflow, x_e in [0,1], zero mass off
// the subgraph.
double flow_violation(const AgentGraph& g, const Eigen::VectorXd& x);
bool is_flow_point(const AgentGraph& g, const Eigen::VectorXd& x, double tol);

}  // namespace bgdce
