#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <vector>

#include "bgdce/graph.hpp"
#include "bgdce/learner.hpp"
#include "bgdce/spanner.hpp"

namespace bgdce {

// Network congestion game: every agent routes one unit source->sink, edge e
// with load l costs each user cost_tables[e][l]. Tables have n+1 entries,
// entry 0 is zero, entries are nondecreasing and bounded by c_max.
struct GameSpec {
  std::shared_ptr<const Dag> dag;
  std::vector<std::pair<int, int>> agents;  // (source, sink)
  std::vector<std::vector<double>> cost_tables;
  double c_max = 1.0;

  int agent_count() const { return static_cast<int>(agents.size()); }
  int edge_count() const { return dag->edge_count(); }
};

void validate_game(const GameSpec& spec);  // throws PreconditionError

// Per-agent reachable subgraphs and spanners, built once.
struct GameRuntime {
  GameSpec spec;
  std::vector<AgentGraph> graphs;
  std::vector<std::shared_ptr<const Spanner>> spanners;
};

GameRuntime build_runtime(GameSpec spec);

Schedule make_schedule(const GameSpec& spec, ScheduleVariant variant,
                       double gamma_scale = 1.0);

// Pure-profile quantities.
Eigen::VectorXi loads(const GameSpec& spec, const std::vector<PathVec>& profile);
double agent_cost(const GameSpec& spec, const std::vector<PathVec>& profile, int i);
double rosenthal_potential(const GameSpec& spec, const std::vector<PathVec>& profile);

// Distribution of a sum of independent Bernoullis with the given success
// probabilities; O(k^2) convolution.
std::vector<double> poisson_binomial_pmf(const std::vector<double>& probs);

// Product-form mixed profile given by per-agent edge marginals x[i].
double expected_potential(const GameSpec& spec, const std::vector<Eigen::VectorXd>& x);

// Entry e: E[cost_e(L_e^{-i} + 1)], the expected cost agent i would see on
// edge e given the other agents' marginals.
Eigen::VectorXd potential_gradient(const GameSpec& spec,
                                   const std::vector<Eigen::VectorXd>& x, int i);

std::pair<PathVec, double> best_response(const GameRuntime& rt,
                                         const std::vector<Eigen::VectorXd>& x, int i);

// max_i <grad_i, x_i> - min_path <grad_i, path>; zero exactly at mixed
// equilibria of the potential.
double nash_gap(const GameRuntime& rt, const std::vector<Eigen::VectorXd>& x);

struct RoundRow {
  std::int64_t t;
  int agent;
  double realized_cost;
  double cum_regret;
  double mu, gamma;
  std::optional<double> nash_gap;
  std::optional<double> expected_potential;
};

struct DynamicsConfig {
  std::int64_t horizon = 1000;
  std::uint64_t seed = 1;
  int metric_stride = 100;       // gap/potential cadence; both always at t=1,T
  double gap_epsilon = 0.25;
  bool exact_regret = false;     // otherwise prefix minima at power-of-two checkpoints
  std::function<void(const RoundRow&)> sink;  // optional row consumer
  std::function<void(std::int64_t)> progress; // optional, called per round
};

struct SeedStats {
  std::vector<double> final_regret;  // per agent
  double final_gap = 0.0;
  double time_avg_gap = 0.0;         // over evaluated rounds
  double frac_gap_below_eps = 0.0;   // over evaluated rounds
  double gap_first_decile_mean = 0.0;
  double gap_last_decile_mean = 0.0;
  double frac_gap_below_eps_last_half = 0.0;
};

// Simultaneous self-play: every agent runs the bandit learner, sees only its
// own realized cost, and the per-round metrics are evaluated on the joint
// marginal before the round's update.
SeedStats run_dynamics(const GameRuntime& rt, const Schedule& schedule,
                       const DynamicsConfig& cfg);

}  // namespace bgdce
