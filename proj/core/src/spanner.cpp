#include "bgdce/spanner.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <string>

#include "bgdce/errors.hpp"

namespace bgdce {
namespace {

// One DFS tree per node, out-edges in ascending index order. tree[u][v] is
// the edge entering v on the DFS tree rooted at u, or -1 if v is unreached.
std::vector<std::vector<int>> dfs_trees(const AgentGraph& g) {
  const Dag& dag = g.dag();
  std::vector<std::vector<int>> tree(dag.node_count());
  for (int u : g.nodes()) {
    auto& parent = tree[u];
    parent.assign(dag.node_count(), -1);
    std::vector<int> stack = {u};
    std::vector<char> seen(dag.node_count(), 0);
    seen[u] = 1;
    while (!stack.empty()) {
      int v = stack.back();
      stack.pop_back();
      for (int e : g.out_edges(v)) {
        int w = dag.edge_dest(e);
        if (!seen[w]) {
          seen[w] = 1;
          parent[w] = e;
          stack.push_back(w);
        }
      }
    }
  }
  return tree;
}

// Tree path u -> v, empty when u == v, nullopt when v is unreached.
std::optional<std::vector<int>> tree_path(const AgentGraph& g,
                                          const std::vector<int>& parent, int u, int v) {
  if (u == v) return std::vector<int>{};
  if (parent[v] < 0) return std::nullopt;
  std::vector<int> edges;
  for (int at = v; at != u; at = g.dag().edge_source(parent[at]))
    edges.push_back(parent[at]);
  std::reverse(edges.begin(), edges.end());
  return edges;
}

std::vector<int> chain_of(const std::vector<int>& prefix, int h) {
  std::vector<int> chain;
  for (int j = h; j >= 0; j = prefix[j]) chain.push_back(j);
  return chain;
}

}  // namespace

Spanner build_dag_spanner(const AgentGraph& g) {
  const Dag& dag = g.dag();
  Spanner sp{g, blue_red_partition(g), {}, {}, {}, 1.0};
  const auto& red = sp.partition.red_edges;
  const int s = static_cast<int>(red.size());
  const auto trees = dfs_trees(g);

  sp.basis.reserve(s);
  sp.prefix.assign(s, -1);
  for (int h = 0; h < s; ++h) {
    int eh = red[h];
    int target = dag.edge_source(eh);
    std::vector<int> edges;
    int k = h - 1;
    for (; k >= 0; --k) {
      auto connect = tree_path(g, trees[dag.edge_dest(red[k])], dag.edge_dest(red[k]), target);
      if (!connect) continue;
      const auto& prev = sp.basis[k].edge_list();
      auto cut = std::find(prev.begin(), prev.end(), red[k]);
      edges.assign(prev.begin(), cut + 1);  // truncation keeps e_k itself
      edges.insert(edges.end(), connect->begin(), connect->end());
      sp.prefix[h] = k;
      break;
    }
    if (k < 0 && target != g.source())
      throw InvariantError("uncovered red edge does not leave the source");
    edges.push_back(eh);
    const auto tail = blue_path(g, sp.partition, dag.edge_dest(eh));
    edges.insert(edges.end(), tail.edge_list().begin(), tail.edge_list().end());
    sp.basis.emplace_back(dag, std::move(edges), g.source());
  }

  // Red(basis[h]) must be exactly chain(h); the decomposition relies on it.
  for (int h = 0; h < s; ++h) {
    auto chain = chain_of(sp.prefix, h);
    std::size_t found = 0;
    for (int j : chain)
      if (sp.basis[h].contains(red[j])) ++found;
    std::size_t reds_on_path = 0;
    for (int e : sp.basis[h].edge_list())
      if (sp.partition.is_red[e]) ++reds_on_path;
    if (found != chain.size() || reds_on_path != chain.size())
      throw InvariantError("basis path " + std::to_string(h) +
                           " does not cover exactly its prefix chain");
  }

  sp.b_matrix.resize(dag.edge_count(), s);
  for (int h = 0; h < s; ++h) sp.b_matrix.col(h) = sp.basis[h].as_vector();
  return sp;
}

Eigen::VectorXd decompose_in_spanner(const Spanner& sp, const Eigen::VectorXd& x,
                                     double tol) {
  double viol = flow_violation(sp.graph, x);
  if (viol > tol)
    throw PreconditionError("point is not a flow point (violation " +
                            std::to_string(viol) + ")");
  const int s = sp.dim();
  Eigen::VectorXd alpha(s);
  for (int j = 0; j < s; ++j) alpha[j] = x[sp.partition.red_edges[j]];
  // r[j] = sum of alpha_h over chains through j; unit upper triangular.
  for (int h = s - 1; h >= 0; --h)
    for (int j = sp.prefix[h]; j >= 0; j = sp.prefix[j]) alpha[j] -= alpha[h];
  return alpha;
}

Eigen::VectorXd fill(const Spanner& sp, const Eigen::VectorXd& red) {
  const AgentGraph& g = sp.graph;
  const Dag& dag = g.dag();
  if (red.size() != sp.dim()) throw PreconditionError("red vector has wrong dimension");
  Eigen::VectorXd x = Eigen::VectorXd::Zero(dag.edge_count());
  for (int j = 0; j < sp.dim(); ++j) x[sp.partition.red_edges[j]] = red[j];
  for (int v : g.nodes()) {
    if (v == g.source() || v == g.sink()) continue;
    int b = sp.partition.blue_of_node[v];
    double inflow = 0.0;
    for (int e : g.in_edges(v)) inflow += x[e];
    double red_out = 0.0;
    for (int e : g.out_edges(v))
      if (e != b) red_out += x[e];
    x[b] = inflow - red_out;
  }
  return x;
}

ExplicitSpanner brute_force_spanner(const std::vector<Eigen::VectorXd>& vertices) {
  const int k = static_cast<int>(vertices.size());
  if (k == 0) throw PreconditionError("empty vertex set");
  const int m = static_cast<int>(vertices[0].size());
  if (k > 12) throw PreconditionError("brute force spanner refuses > 12 vertices");
  if (m > 10) throw PreconditionError("brute force spanner refuses dimension > 10");
  for (const auto& v : vertices)
    if (v.size() != m) throw PreconditionError("inconsistent vertex dimensions");

  Eigen::MatrixXd all(m, k);
  for (int j = 0; j < k; ++j) all.col(j) = vertices[j];
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> full_qr(all);
  full_qr.setThreshold(1e-9);
  const int s = static_cast<int>(full_qr.rank());

  std::vector<int> pick(s);
  for (int i = 0; i < s; ++i) pick[i] = i;
  ExplicitSpanner best;
  best.theta = std::numeric_limits<double>::infinity();

  auto consider = [&](const std::vector<int>& subset) {
    Eigen::MatrixXd b(m, s);
    for (int i = 0; i < s; ++i) b.col(i) = vertices[subset[i]];
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(b);
    qr.setThreshold(1e-9);
    if (static_cast<int>(qr.rank()) != s) return;
    double worst = 0.0;
    for (const auto& v : vertices) {
      Eigen::VectorXd alpha = qr.solve(v);
      if ((b * alpha - v).lpNorm<Eigen::Infinity>() > 1e-9) return;
      worst = std::max(worst, alpha.lpNorm<Eigen::Infinity>());
    }
    if (worst < best.theta - 1e-12) {
      best.vertex_index = subset;
      best.b_matrix = b;
      best.theta = worst;
    }
  };

  // All size-s subsets in lexicographic order; ties keep the first.
  while (true) {
    consider(pick);
    int i = s - 1;
    while (i >= 0 && pick[i] == k - s + i) --i;
    if (i < 0) break;
    ++pick[i];
    for (int j = i + 1; j < s; ++j) pick[j] = pick[j - 1] + 1;
  }
  if (!std::isfinite(best.theta))
    throw InvariantError("no independent vertex subset found");
  return best;
}

Eigen::VectorXd decompose_explicit(const ExplicitSpanner& sp, const Eigen::VectorXd& x) {
  return sp.b_matrix.colPivHouseholderQr().solve(x);
}

}  // namespace bgdce
