#pragma once

#include <Eigen/Core>
#include <vector>

#include "bgdce/polytope.hpp"
#include "bgdce/spanner.hpp"

namespace bgdce {

// Brute-force reference game; strategies are explicit 0/1 resource vectors.
// Deliberately tiny: every oracle enumerates the full joint space.
struct ExplicitGame {
  int resources = 0;
  std::vector<std::vector<Eigen::VectorXd>> strategies;  // per agent
  std::vector<std::vector<double>> cost_tables;          // per resource, n+1
};

// Refuses n > 4 agents, more than 8 strategies per agent, or more than 12
// resources.
void validate_explicit_game(const ExplicitGame& game);

// Exact expected Rosenthal potential of the product distribution given by
// per-agent strategy probabilities, by full joint enumeration.
double exact_expected_potential(const ExplicitGame& game,
                                const std::vector<Eigen::VectorXd>& strategy_probs);

// Exact equilibrium gap of the product distribution: best pure deviation per
// agent against the others' mixture.
double exact_nash_gap(const ExplicitGame& game,
                      const std::vector<Eigen::VectorXd>& strategy_probs);

struct EstimatorMoments {
  Eigen::VectorXd mean;        // E[g] over the support
  double second_moment = 0.0;  // E[|g|^2]
};

// Closed-form expectation of the one-sample estimator over a round's
// support under a fixed cost vector.
EstimatorMoments estimator_expectation(const MixedSupport& support,
                                       const Eigen::VectorXd& cost);

}  // namespace bgdce
