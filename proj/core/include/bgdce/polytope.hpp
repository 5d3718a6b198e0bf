#pragma once

#include <Eigen/Core>
#include <cstddef>
#include <utility>
#include <variant>
#include <vector>

#include "bgdce/random.hpp"
#include "bgdce/spanner.hpp"

namespace bgdce {

struct BoxSet {
  Eigen::VectorXd lo, hi;
};
struct HyperplaneSet {
  Eigen::VectorXd normal;
  double offset;  // normal . x = offset
};
struct SlabSet {
  Eigen::VectorXd normal;
  double lo, hi;  // lo <= normal . x <= hi
};
using ElementarySet = std::variant<BoxSet, HyperplaneSet, SlabSet>;

// Intersection of sets that each admit a closed-form projection; projected
// onto with Dykstra's alternating scheme.
struct ConstraintSet {
  std::vector<ElementarySet> sets;
  double violation(const Eigen::VectorXd& x) const;
};

// D = {|alpha_h| <= theta, sum alpha = 1, 0 <= (B alpha)_e <= 1}. Flow
// conservation needs no rows of its own: every basis column is a unit flow,
// so B alpha conserves automatically.
ConstraintSet base_constraints(const Spanner& sp);

// Image of D under alpha -> (1-mu) alpha + (mu/s) 1, written out as
// elementary sets. Only used to cross-check the affine projection identity.
ConstraintSet bounded_away_constraints(const Spanner& sp, double mu);

// Dykstra projection. Stops when a full cycle moves the iterate less than
// 1e-10; throws ProjectionError if the violation budget of 1e-8 is still
// exceeded after 20000 cycles.
Eigen::VectorXd project_onto(const ConstraintSet& cs, const Eigen::VectorXd& z);

inline Eigen::VectorXd project_base(const ConstraintSet& base, const Eigen::VectorXd& z) {
  return project_onto(base, z);
}

// Projection onto the mu-bounded-away polytope via the base projection:
// (1-mu) P_D((z - (mu/s)1)/(1-mu)) + (mu/s)1.
Eigen::VectorXd project_bounded_away(const ConstraintSet& base, const Eigen::VectorXd& z,
                                     double mu);

struct Atom {
  PathVec path;
  double weight;
};

// Decompose a flow point into <= m_i paths by repeated elimination of the
// minimum-mass support edge.
std::vector<Atom> caratheodory_dag(const AgentGraph& g, const Eigen::VectorXd& x,
                                   double tol = 1e-9);

// Convex coefficients of x over an explicit vertex list (phase-1 simplex,
// Bland's rule). Returns (vertex index, weight) pairs, <= m+1 of them.
std::vector<std::pair<int, double>> caratheodory_explicit(
    const std::vector<Eigen::VectorXd>& vertices, const Eigen::VectorXd& x,
    double tol = 1e-8);

// Sampling distribution with marginal B alpha: Caratheodory atoms of the
// recentred point carry total mass 1-mu, each basis path carries mass mu/s.
struct MixedSupport {
  std::vector<Atom> atoms;  // Caratheodory part first, then basis part
  std::size_t caratheodory_count = 0;
  double mu = 0.0;
  std::vector<Eigen::VectorXd> coords;  // spanner coordinates per atom

  int sample_index(Rng& rng) const;  // single inverse-CDF draw
  Eigen::VectorXd marginal() const;
};

MixedSupport caratheodory_distribution(const Spanner& sp, const Eigen::VectorXd& alpha,
                                       double mu);

}  // namespace bgdce
