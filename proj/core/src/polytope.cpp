#include "bgdce/polytope.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "bgdce/errors.hpp"

namespace bgdce {
namespace {

constexpr double kSupportTol = 1e-12;
constexpr double kStopTol = 1e-10;
constexpr double kCycleTol = 1e-10;
constexpr int kMaxCycles = 20000;
constexpr double kViolationBudget = 1e-8;

double positive_part(double v) { return v > 0.0 ? v : 0.0; }

Eigen::VectorXd project_elementary(const ElementarySet& set, const Eigen::VectorXd& x) {
  if (const auto* box = std::get_if<BoxSet>(&set))
    return x.cwiseMax(box->lo).cwiseMin(box->hi);
  if (const auto* plane = std::get_if<HyperplaneSet>(&set)) {
    double shift = (plane->normal.dot(x) - plane->offset) / plane->normal.squaredNorm();
    return x - shift * plane->normal;
  }
  const auto& slab = std::get<SlabSet>(set);
  double v = slab.normal.dot(x);
  if (v > slab.hi) return x - ((v - slab.hi) / slab.normal.squaredNorm()) * slab.normal;
  if (v < slab.lo) return x - ((v - slab.lo) / slab.normal.squaredNorm()) * slab.normal;
  return x;
}

double elementary_violation(const ElementarySet& set, const Eigen::VectorXd& x) {
  if (const auto* box = std::get_if<BoxSet>(&set)) {
    double worst = 0.0;
    for (int i = 0; i < x.size(); ++i)
      worst = std::max({worst, box->lo[i] - x[i], x[i] - box->hi[i]});
    return positive_part(worst);
  }
  if (const auto* plane = std::get_if<HyperplaneSet>(&set))
    return std::abs(plane->normal.dot(x) - plane->offset);
  const auto& slab = std::get<SlabSet>(set);
  double v = slab.normal.dot(x);
  return positive_part(std::max(slab.lo - v, v - slab.hi));
}

}  // namespace

double ConstraintSet::violation(const Eigen::VectorXd& x) const {
  double worst = 0.0;
  for (const auto& set : sets) worst = std::max(worst, elementary_violation(set, x));
  return worst;
}

ConstraintSet base_constraints(const Spanner& sp) {
  const int s = sp.dim();
  ConstraintSet cs;
  cs.sets.push_back(BoxSet{Eigen::VectorXd::Constant(s, -sp.theta),
                           Eigen::VectorXd::Constant(s, sp.theta)});
  cs.sets.push_back(HyperplaneSet{Eigen::VectorXd::Ones(s), 1.0});
  for (int e : sp.graph.edges())
    cs.sets.push_back(SlabSet{sp.b_matrix.row(e).transpose(), 0.0, 1.0});
  return cs;
}

ConstraintSet bounded_away_constraints(const Spanner& sp, double mu) {
  if (mu < 0.0 || mu > 0.5) throw PreconditionError("mu outside [0, 0.5]");
  const int s = sp.dim();
  const double shift = mu / s;
  ConstraintSet cs;
  cs.sets.push_back(BoxSet{Eigen::VectorXd::Constant(s, -sp.theta * (1.0 - mu) + shift),
                           Eigen::VectorXd::Constant(s, sp.theta * (1.0 - mu) + shift)});
  cs.sets.push_back(HyperplaneSet{Eigen::VectorXd::Ones(s), 1.0});
  for (int e : sp.graph.edges()) {
    Eigen::VectorXd row = sp.b_matrix.row(e).transpose();
    double k = row.sum();  // basis paths through e
    cs.sets.push_back(SlabSet{row, shift * k, (1.0 - mu) + shift * k});
  }
  return cs;
}

Eigen::VectorXd project_onto(const ConstraintSet& cs, const Eigen::VectorXd& z) {
  const auto k = cs.sets.size();
  Eigen::VectorXd x = z;
  std::vector<Eigen::VectorXd> correction(k, Eigen::VectorXd::Zero(z.size()));
  for (int cycle = 0; cycle < kMaxCycles; ++cycle) {
    Eigen::VectorXd before = x;
    for (std::size_t i = 0; i < k; ++i) {
      Eigen::VectorXd shifted = x + correction[i];
      Eigen::VectorXd projected = project_elementary(cs.sets[i], shifted);
      correction[i] = shifted - projected;
      x = std::move(projected);
    }
    // A small cycle displacement alone is not enough: exact ties between
    // sets can hold the iterate still for a cycle while the corrections
    // keep growing, so insist the stall is also feasible.
    if ((x - before).lpNorm<Eigen::Infinity>() < kCycleTol &&
        cs.violation(x) <= kViolationBudget)
      break;
  }
  double viol = cs.violation(x);
  if (viol > kViolationBudget)
    throw ProjectionError(
        "projection stalled at constraint violation " + std::to_string(viol), viol);
  return x;
}

Eigen::VectorXd project_bounded_away(const ConstraintSet& base, const Eigen::VectorXd& z,
                                     double mu) {
  if (mu < 0.0 || mu > 0.5) throw PreconditionError("mu outside [0, 0.5]");
  const int s = static_cast<int>(z.size());
  const Eigen::VectorXd shift = Eigen::VectorXd::Constant(s, mu / s);
  Eigen::VectorXd inner = project_onto(base, (z - shift) / (1.0 - mu));
  return (1.0 - mu) * inner + shift;
}

std::vector<Atom> caratheodory_dag(const AgentGraph& g, const Eigen::VectorXd& x,
                                   double tol) {
  double viol = flow_violation(g, x);
  if (viol > tol)
    throw PreconditionError("not a flow point (violation " + std::to_string(viol) + ")");
  const Dag& dag = g.dag();
  Eigen::VectorXd y = x.cwiseMax(0.0);

  auto support_path = [&](int via) -> std::vector<int> {
    // Backward to the source, then forward to the sink, lowest edge index
    // first, restricted to support edges.
    auto walk = [&](int from, int goal, bool forward) -> std::vector<int> {
      std::vector<int> parent(dag.node_count(), -1);
      std::vector<char> seen(dag.node_count(), 0);
      std::vector<int> stack = {from};
      seen[from] = 1;
      while (!stack.empty()) {
        int v = stack.back();
        stack.pop_back();
        if (v == goal) break;
        const auto& adj = forward ? g.out_edges(v) : g.in_edges(v);
        for (auto it = adj.rbegin(); it != adj.rend(); ++it) {  // stack reverses
          int e = *it;
          if (y[e] <= kSupportTol) continue;
          int w = forward ? dag.edge_dest(e) : dag.edge_source(e);
          if (!seen[w]) {
            seen[w] = 1;
            parent[w] = e;
            stack.push_back(w);
          }
        }
      }
      if (!seen[goal])
        throw InvariantError("no support path through the minimum-mass edge");
      std::vector<int> edges;
      for (int at = goal; at != from;
           at = forward ? dag.edge_source(parent[at]) : dag.edge_dest(parent[at]))
        edges.push_back(parent[at]);
      if (forward) std::reverse(edges.begin(), edges.end());
      return edges;
    };
    std::vector<int> edges = walk(dag.edge_source(via), g.source(), false);
    edges.push_back(via);
    auto tail = walk(dag.edge_dest(via), g.sink(), true);
    edges.insert(edges.end(), tail.begin(), tail.end());
    return edges;
  };

  std::vector<Atom> atoms;
  const int max_iters = g.edge_count();
  for (int iter = 0; iter <= max_iters; ++iter) {
    double outflow = 0.0;
    for (int e : g.out_edges(g.source())) outflow += y[e];
    if (outflow <= kStopTol) break;
    if (iter == max_iters)
      throw InvariantError("edge elimination did not terminate in m iterations");

    int e_min = -1;
    for (int e : g.edges())
      if (y[e] > kSupportTol && (e_min < 0 || y[e] < y[e_min])) e_min = e;
    if (e_min < 0) throw InvariantError("positive outflow with empty support");

    std::vector<int> edges = support_path(e_min);
    double w = std::numeric_limits<double>::infinity();
    for (int e : edges) w = std::min(w, y[e]);
    for (int e : edges) y[e] -= w;
    atoms.push_back({PathVec(dag, std::move(edges), g.source()), w});
  }

  std::erase_if(atoms, [](const Atom& a) { return a.weight < 1e-12; });
  if (atoms.empty()) throw InvariantError("decomposition produced no atoms");
  double total = 0.0;
  for (const auto& a : atoms) total += a.weight;
  if (std::abs(total - 1.0) > 1e-9)
    throw InvariantError("atom weights sum to " + std::to_string(total));
  for (auto& a : atoms) a.weight /= total;
  return atoms;
}

std::vector<std::pair<int, double>> caratheodory_explicit(
    const std::vector<Eigen::VectorXd>& vertices, const Eigen::VectorXd& x, double tol) {
  const int k = static_cast<int>(vertices.size());
  if (k == 0) throw PreconditionError("empty vertex list");
  if (k > 50) throw PreconditionError("explicit decomposition refuses > 50 vertices");
  const int m = static_cast<int>(x.size());
  for (const auto& v : vertices)
    if (v.size() != m) throw PreconditionError("inconsistent vertex dimensions");

  // Phase-1 simplex with Bland's rule on [V; 1^T] lambda = [x; 1], lambda >= 0.
  const int rows = m + 1;
  const int cols = k + rows;  // originals then artificials
  Eigen::MatrixXd t(rows, cols + 1);
  t.setZero();
  for (int j = 0; j < k; ++j) {
    t.block(0, j, m, 1) = vertices[j];
    t(m, j) = 1.0;
  }
  t.col(cols).head(m) = x;
  t(m, cols) = 1.0;
  for (int i = 0; i < rows; ++i) {
    if (t(i, cols) < 0.0) t.row(i) = -t.row(i);
    t(i, k + i) = 1.0;
  }

  std::vector<int> basis(rows);
  for (int i = 0; i < rows; ++i) basis[i] = k + i;
  Eigen::RowVectorXd cost = Eigen::RowVectorXd::Zero(cols + 1);
  for (int i = 0; i < rows; ++i) cost -= t.row(i);  // reduced costs of phase 1
  for (int i = 0; i < rows; ++i) cost(k + i) = 0.0;

  const int iteration_cap = 10000;
  for (int iter = 0;; ++iter) {
    if (iter == iteration_cap) throw InvariantError("simplex iteration cap reached");
    int enter = -1;
    for (int j = 0; j < cols; ++j)
      if (cost(j) < -1e-11) { enter = j; break; }  // Bland: lowest index
    if (enter < 0) break;
    int leave = -1;
    double best_ratio = std::numeric_limits<double>::infinity();
    for (int i = 0; i < rows; ++i) {
      if (t(i, enter) <= 1e-11) continue;
      double ratio = t(i, cols) / t(i, enter);
      if (ratio < best_ratio - 1e-12 ||
          (ratio < best_ratio + 1e-12 && (leave < 0 || basis[i] < basis[leave]))) {
        best_ratio = ratio;
        leave = i;
      }
    }
    if (leave < 0) throw InvariantError("phase-1 objective unbounded");
    t.row(leave) /= t(leave, enter);
    for (int i = 0; i < rows; ++i)
      if (i != leave && t(i, enter) != 0.0) t.row(i) -= t(i, enter) * t.row(leave);
    cost -= cost(enter) * t.row(leave);
    basis[leave] = enter;
  }

  double infeasibility = 0.0;
  for (int i = 0; i < rows; ++i)
    if (basis[i] >= k) infeasibility += t(i, cols);
  if (infeasibility > tol)
    throw PreconditionError("point is not in the convex hull of the vertices");

  std::vector<std::pair<int, double>> out;
  for (int i = 0; i < rows; ++i)
    if (basis[i] < k && t(i, cols) > 1e-12) out.emplace_back(basis[i], t(i, cols));
  std::sort(out.begin(), out.end());
  double total = 0.0;
  for (auto& [idx, w] : out) total += w;
  if (std::abs(total - 1.0) > 1e-9)
    throw InvariantError("hull weights sum to " + std::to_string(total));
  for (auto& [idx, w] : out) w /= total;
  return out;
}

int MixedSupport::sample_index(Rng& rng) const {
  double u = rng.next_double();
  double acc = 0.0;
  for (std::size_t i = 0; i < atoms.size(); ++i) {
    acc += atoms[i].weight;
    if (u < acc) return static_cast<int>(i);
  }
  return static_cast<int>(atoms.size()) - 1;
}

Eigen::VectorXd MixedSupport::marginal() const {
  if (atoms.empty()) throw InvariantError("empty support");
  Eigen::VectorXd x = Eigen::VectorXd::Zero(atoms[0].path.ambient_edges());
  for (const auto& a : atoms)
    for (int e : a.path.edge_list()) x[e] += a.weight;
  return x;
}

MixedSupport caratheodory_distribution(const Spanner& sp, const Eigen::VectorXd& alpha,
                                       double mu) {
  if (mu < 0.0 || mu > 0.5) throw PreconditionError("mu outside [0, 0.5]");
  const int s = sp.dim();
  if (alpha.size() != s) throw PreconditionError("alpha has wrong dimension");

  // Recentre: alpha = (1-mu) z + (mu/s) 1 with z in the base polytope.
  Eigen::VectorXd z = (alpha.array() - mu / s) / (1.0 - mu);
  if (z.lpNorm<Eigen::Infinity>() > sp.theta + 1e-9)
    throw PreconditionError("alpha outside the bounded-away polytope (box)");
  Eigen::VectorXd xz = sp.b_matrix * z;
  for (int i = 0; i < xz.size(); ++i) {
    if (xz[i] < -1e-9)
      throw PreconditionError("alpha outside the bounded-away polytope (negative mass)");
    if (xz[i] < 0.0) xz[i] = 0.0;
  }

  MixedSupport support;
  support.mu = mu;
  std::vector<Atom> cara = caratheodory_dag(sp.graph, xz);
  support.caratheodory_count = cara.size();
  for (auto& a : cara) {
    support.coords.push_back(decompose_in_spanner(sp, a.path.as_vector()));
    a.weight *= (1.0 - mu);
    support.atoms.push_back(std::move(a));
  }
  if (mu > 0.0) {
    for (int h = 0; h < s; ++h) {
      support.atoms.push_back({sp.basis[h], mu / s});
      support.coords.push_back(Eigen::VectorXd::Unit(s, h));
    }
  }
  if (support.atoms.size() > static_cast<std::size_t>(sp.ambient_dim() + 1 + s))
    throw InvariantError("support larger than (m+1) + s atoms");
  return support;
}

}  // namespace bgdce
