#include "bgdce/graph.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>
#include <string>

#include "bgdce/errors.hpp"

namespace bgdce {

Dag::Dag(int node_count, std::vector<std::pair<int, int>> edges)
    : node_count_(node_count), edges_(std::move(edges)) {
  if (node_count_ <= 0) throw PreconditionError("node count must be positive");
  out_.resize(node_count_);
  in_.resize(node_count_);
  for (int e = 0; e < edge_count(); ++e) {
    auto [u, v] = edges_[e];
    if (u < 0 || u >= node_count_ || v < 0 || v >= node_count_)
      throw PreconditionError("edge endpoint out of range");
    if (u == v) throw PreconditionError("self loop at node " + std::to_string(u));
    out_[u].push_back(e);
    in_[v].push_back(e);
  }

  // Kahn's algorithm, smallest ready node id first.
  std::vector<int> indeg(node_count_);
  for (int v = 0; v < node_count_; ++v) indeg[v] = static_cast<int>(in_[v].size());
  std::priority_queue<int, std::vector<int>, std::greater<int>> ready;
  for (int v = 0; v < node_count_; ++v)
    if (indeg[v] == 0) ready.push(v);
  topo_order_.reserve(node_count_);
  while (!ready.empty()) {
    int v = ready.top();
    ready.pop();
    topo_order_.push_back(v);
    for (int e : out_[v])
      if (--indeg[edge_dest(e)] == 0) ready.push(edge_dest(e));
  }
  if (static_cast<int>(topo_order_.size()) != node_count_)
    throw PreconditionError("graph contains a cycle");
  topo_rank_.resize(node_count_);
  for (int r = 0; r < node_count_; ++r) topo_rank_[topo_order_[r]] = r;
}

PathVec::PathVec(const Dag& dag, std::vector<int> edges, int start_node)
    : edges_(std::move(edges)), mask_(dag.edge_count(), 0) {
  if (edges_.empty()) {
    if (start_node < 0 || start_node >= dag.node_count())
      throw PreconditionError("empty path needs a valid start node");
    from_ = to_ = start_node;
    return;
  }
  from_ = dag.edge_source(edges_.front());
  if (start_node >= 0 && start_node != from_)
    throw PreconditionError("path does not start at the given node");
  int at = from_;
  for (int e : edges_) {
    if (e < 0 || e >= dag.edge_count()) throw PreconditionError("edge index out of range");
    if (dag.edge_source(e) != at) throw PreconditionError("path edges are not contiguous");
    if (mask_[e]) throw PreconditionError("path repeats an edge");
    mask_[e] = 1;
    at = dag.edge_dest(e);
  }
  to_ = at;
}

Eigen::VectorXd PathVec::as_vector() const {
  Eigen::VectorXd v = Eigen::VectorXd::Zero(static_cast<int>(mask_.size()));
  for (int e : edges_) v[e] = 1.0;
  return v;
}

double PathVec::cost_under(const Eigen::VectorXd& edge_costs) const {
  double total = 0.0;
  for (int e : edges_) total += edge_costs[e];
  return total;
}

AgentGraph::AgentGraph(std::shared_ptr<const Dag> dag, int source, int sink)
    : dag_(std::move(dag)), source_(source), sink_(sink) {
  const Dag& g = *dag_;
  if (source_ < 0 || source_ >= g.node_count() || sink_ < 0 || sink_ >= g.node_count())
    throw PreconditionError("source or sink out of range");
  if (source_ == sink_) throw PreconditionError("source equals sink");

  std::vector<char> from_s(g.node_count(), 0), to_t(g.node_count(), 0);
  std::queue<int> bfs;
  from_s[source_] = 1;
  bfs.push(source_);
  while (!bfs.empty()) {
    int v = bfs.front();
    bfs.pop();
    for (int e : g.out_edges(v)) {
      int w = g.edge_dest(e);
      if (!from_s[w]) { from_s[w] = 1; bfs.push(w); }
    }
  }
  to_t[sink_] = 1;
  bfs.push(sink_);
  while (!bfs.empty()) {
    int v = bfs.front();
    bfs.pop();
    for (int e : g.in_edges(v)) {
      int w = g.edge_source(e);
      if (!to_t[w]) { to_t[w] = 1; bfs.push(w); }
    }
  }

  node_active_.assign(g.node_count(), 0);
  edge_active_.assign(g.edge_count(), 0);
  for (int v = 0; v < g.node_count(); ++v) node_active_[v] = from_s[v] && to_t[v];
  if (!node_active_[source_] || !node_active_[sink_])
    throw PreconditionError("no path from source to sink");
  for (int e = 0; e < g.edge_count(); ++e)
    edge_active_[e] = from_s[g.edge_source(e)] && to_t[g.edge_dest(e)];

  for (int v : g.topo_order())
    if (node_active_[v]) nodes_.push_back(v);
  for (int e = 0; e < g.edge_count(); ++e)
    if (edge_active_[e]) edges_.push_back(e);

  out_.resize(g.node_count());
  in_.resize(g.node_count());
  for (int e : edges_) {
    out_[g.edge_source(e)].push_back(e);
    in_[g.edge_dest(e)].push_back(e);
  }
}

std::vector<PathVec> enumerate_paths(const AgentGraph& g, std::size_t cap) {
  std::vector<PathVec> result;
  std::vector<int> current;
  // Depth-first in ascending edge order; emission order is lexicographic in
  // edge indices.
  auto dfs = [&](auto&& self, int v) -> void {
    if (v == g.sink()) {
      if (result.size() >= cap)
        throw CapExceededError("path count exceeds cap " + std::to_string(cap));
      result.emplace_back(g.dag(), current, g.source());
      return;
    }
    for (int e : g.out_edges(v)) {
      current.push_back(e);
      self(self, g.dag().edge_dest(e));
      current.pop_back();
    }
  };
  dfs(dfs, g.source());
  return result;
}

std::pair<PathVec, double> shortest_path(const AgentGraph& g,
                                         const Eigen::VectorXd& weights) {
  const Dag& dag = g.dag();
  if (weights.size() != dag.edge_count())
    throw PreconditionError("weight vector has wrong dimension");
  for (int e : g.edges())
    if (weights[e] < -1e-12) throw PreconditionError("negative edge weight");

  constexpr double kInf = std::numeric_limits<double>::infinity();
  std::vector<double> dist(dag.node_count(), kInf);
  std::vector<int> parent(dag.node_count(), -1);
  dist[g.source()] = 0.0;
  for (int v : g.nodes()) {
    if (v == g.source()) continue;
    for (int e : g.in_edges(v)) {
      double d = dist[dag.edge_source(e)] + weights[e];
      if (d < dist[v]) {  // strict: ties keep the lower edge index
        dist[v] = d;
        parent[v] = e;
      }
    }
  }

  std::vector<int> edges;
  for (int v = g.sink(); v != g.source(); v = dag.edge_source(parent[v]))
    edges.push_back(parent[v]);
  std::reverse(edges.begin(), edges.end());
  return {PathVec(dag, std::move(edges), g.source()), dist[g.sink()]};
}

BlueRedPartition blue_red_partition(const AgentGraph& g) {
  const Dag& dag = g.dag();
  BlueRedPartition p;
  p.blue_of_node.assign(dag.node_count(), -1);
  p.is_red.assign(dag.edge_count(), 0);
  p.red_rank_of.assign(dag.edge_count(), -1);

  for (int v : g.nodes()) {
    if (v == g.source() || v == g.sink()) continue;
    p.blue_of_node[v] = g.out_edges(v).front();
  }
  for (int e : g.edges())
    p.is_red[e] = (p.blue_of_node[dag.edge_source(e)] != e);

  for (int e : g.edges())
    if (p.is_red[e]) p.red_edges.push_back(e);
  std::stable_sort(p.red_edges.begin(), p.red_edges.end(), [&](int a, int b) {
    return dag.topo_rank(dag.edge_source(a)) < dag.topo_rank(dag.edge_source(b));
  });
  for (int h = 0; h < static_cast<int>(p.red_edges.size()); ++h)
    p.red_rank_of[p.red_edges[h]] = h;

  if (static_cast<int>(p.red_edges.size()) != g.edge_count() - g.node_count() + 2)
    throw InvariantError("red edge count is not m - n + 2");
  return p;
}

PathVec blue_path(const AgentGraph& g, const BlueRedPartition& p, int v) {
  if (v < 0 || v >= g.dag().node_count() || !g.has_node(v))
    throw PreconditionError("node is not in the subgraph");
  std::vector<int> edges;
  int at = v;
  while (at != g.sink()) {
    int e = p.blue_of_node[at];
    if (e < 0) throw InvariantError("node without a blue edge before the sink");
    edges.push_back(e);
    at = g.dag().edge_dest(e);
  }
  return PathVec(g.dag(), std::move(edges), v);
}

double flow_violation(const AgentGraph& g, const Eigen::VectorXd& x) {
  const Dag& dag = g.dag();
  if (x.size() != dag.edge_count())
    throw PreconditionError("flow vector has wrong dimension");
  double worst = 0.0;
  for (int e = 0; e < dag.edge_count(); ++e) {
    if (!g.has_edge(e)) {
      worst = std::max(worst, std::abs(x[e]));
    } else {
      worst = std::max(worst, std::max(-x[e], x[e] - 1.0));
    }
  }
  for (int v : g.nodes()) {
    double in = 0.0, out = 0.0;
    for (int e : g.in_edges(v)) in += x[e];
    for (int e : g.out_edges(v)) out += x[e];
    if (v == g.source()) {
      worst = std::max(worst, std::abs(out - 1.0));
    } else if (v == g.sink()) {
      worst = std::max(worst, std::abs(in - 1.0));
    } else {
      worst = std::max(worst, std::abs(in - out));
    }
  }
  return worst;
}

bool is_flow_point(const AgentGraph& g, const Eigen::VectorXd& x, double tol) {
  return flow_violation(g, x) <= tol;
}

}  // namespace bgdce
