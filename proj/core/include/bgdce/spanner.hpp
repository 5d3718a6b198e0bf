#pragma once

#include <Eigen/Core>
#include <vector>

#include "bgdce/graph.hpp"

namespace bgdce {

// Exact 1-spanner of a DAG flow polytope. basis[h] is the path covering
// red_edges[h]; prefix[h] is the index of the earlier basis path whose
// truncation prefixes basis[h], or -1 when basis[h] leaves the source
// directly. Red(basis[h]) = {h} u chain(prefix[h]), which makes the
// change of basis triangular.
struct Spanner {
  AgentGraph graph;
  BlueRedPartition partition;
  std::vector<PathVec> basis;
  Eigen::MatrixXd b_matrix;  // m x s edge incidence of the basis
  std::vector<int> prefix;   // sized s, -1 for none
  double theta = 1.0;

  int dim() const { return static_cast<int>(basis.size()); }
  int ambient_dim() const { return static_cast<int>(b_matrix.rows()); }
};

Spanner build_dag_spanner(const AgentGraph& g);

// Solve B alpha = x by back substitution on the red coordinates. x must be
// a point of the flow polytope (validated to `tol`).
Eigen::VectorXd decompose_in_spanner(const Spanner& sp, const Eigen::VectorXd& x,
                                     double tol = 1e-9);

// Reconstruct the unique conservation-respecting edge vector whose red
// coordinates are `red` (blue coordinates recovered in topological order).
Eigen::VectorXd fill(const Spanner& sp, const Eigen::VectorXd& red);

// Basis of explicit 0/1 vertices minimizing the worst decomposition
// coefficient over the whole vertex set; exhaustive over size-s subsets.
struct ExplicitSpanner {
  std::vector<int> vertex_index;
  Eigen::MatrixXd b_matrix;  // m x s
  double theta;
};

// Refuses more than 12 vertices or ambient dimension above 10.
ExplicitSpanner brute_force_spanner(const std::vector<Eigen::VectorXd>& vertices);

// Least-squares coordinates of x in an explicit basis.
Eigen::VectorXd decompose_explicit(const ExplicitSpanner& sp, const Eigen::VectorXd& x);

}  // namespace bgdce
