#include "bgdce/oracle.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <limits>
#include <string>

#include "bgdce/errors.hpp"
#include "bgdce/estimator.hpp"

namespace bgdce {
namespace {

// Walks every joint pure profile of a tiny explicit game.
template <typename Fn>
void for_each_profile(const ExplicitGame& game,
                      const std::vector<Eigen::VectorXd>& strategy_probs, Fn&& fn) {
  const int n = static_cast<int>(game.strategies.size());
  std::vector<int> pick(n, 0);
  while (true) {
    double prob = 1.0;
    for (int i = 0; i < n; ++i) prob *= strategy_probs[i][pick[i]];
    if (prob > 0.0) fn(pick, prob);
    int i = n - 1;
    while (i >= 0 && pick[i] + 1 == static_cast<int>(game.strategies[i].size())) {
      pick[i] = 0;
      --i;
    }
    if (i < 0) break;
    ++pick[i];
  }
}

std::vector<int> profile_loads(const ExplicitGame& game, const std::vector<int>& pick) {
  std::vector<int> loads(game.resources, 0);
  for (std::size_t i = 0; i < pick.size(); ++i)
    for (int r = 0; r < game.resources; ++r)
      if (game.strategies[i][pick[i]][r] > 0.5) ++loads[r];
  return loads;
}

double profile_cost(const ExplicitGame& game, const std::vector<int>& pick, int agent,
                    const std::vector<int>& loads) {
  double total = 0.0;
  for (int r = 0; r < game.resources; ++r)
    if (game.strategies[agent][pick[agent]][r] > 0.5)
      total += game.cost_tables[r][loads[r]];
  return total;
}

void check_probs(const ExplicitGame& game,
                 const std::vector<Eigen::VectorXd>& strategy_probs) {
  if (strategy_probs.size() != game.strategies.size())
    throw PreconditionError("one probability vector per agent required");
  for (std::size_t i = 0; i < strategy_probs.size(); ++i) {
    const auto& p = strategy_probs[i];
    if (p.size() != static_cast<int>(game.strategies[i].size()))
      throw PreconditionError("probability vector has wrong length");
    double sum = 0.0;
    for (int j = 0; j < p.size(); ++j) {
      if (p[j] < -1e-12) throw PreconditionError("negative strategy probability");
      sum += p[j];
    }
    if (std::abs(sum - 1.0) > 1e-9)
      throw PreconditionError("strategy probabilities sum to " + std::to_string(sum));
  }
}

}  // namespace

void validate_explicit_game(const ExplicitGame& game) {
  const int n = static_cast<int>(game.strategies.size());
  if (n < 1) throw PreconditionError("explicit game needs at least one agent");
  if (n > 4) throw PreconditionError("explicit oracle refuses more than 4 agents");
  if (game.resources < 1 || game.resources > 12)
    throw PreconditionError("explicit oracle refuses more than 12 resources");
  for (const auto& list : game.strategies) {
    if (list.empty()) throw PreconditionError("agent with empty strategy list");
    if (list.size() > 8)
      throw PreconditionError("explicit oracle refuses more than 8 strategies per agent");
    for (const auto& v : list) {
      if (v.size() != game.resources)
        throw PreconditionError("strategy vector has wrong dimension");
      for (int r = 0; r < v.size(); ++r)
        if (v[r] != 0.0 && v[r] != 1.0)
          throw PreconditionError("strategy vectors must be 0/1");
    }
  }
  if (static_cast<int>(game.cost_tables.size()) != game.resources)
    throw PreconditionError("expected one cost table per resource");
  for (const auto& table : game.cost_tables) {
    if (static_cast<int>(table.size()) != n + 1)
      throw PreconditionError("cost table must have n+1 entries");
    if (table[0] != 0.0) throw PreconditionError("cost table must start at 0");
  }
}

double exact_expected_potential(const ExplicitGame& game,
                                const std::vector<Eigen::VectorXd>& strategy_probs) {
  validate_explicit_game(game);
  check_probs(game, strategy_probs);
  double total = 0.0;
  for_each_profile(game, strategy_probs, [&](const std::vector<int>& pick, double prob) {
    std::vector<int> loads = profile_loads(game, pick);
    double phi = 0.0;
    for (int r = 0; r < game.resources; ++r)
      for (int k = 1; k <= loads[r]; ++k) phi += game.cost_tables[r][k];
    total += prob * phi;
  });
  return total;
}

double exact_nash_gap(const ExplicitGame& game,
                      const std::vector<Eigen::VectorXd>& strategy_probs) {
  validate_explicit_game(game);
  check_probs(game, strategy_probs);
  const int n = static_cast<int>(game.strategies.size());
  double worst = -std::numeric_limits<double>::infinity();
  for (int i = 0; i < n; ++i) {
    double current = 0.0;
    for_each_profile(game, strategy_probs, [&](const std::vector<int>& pick, double prob) {
      current += prob * profile_cost(game, pick, i, profile_loads(game, pick));
    });
    double best_deviation = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < game.strategies[i].size(); ++k) {
      double dev = 0.0;
      for_each_profile(game, strategy_probs,
                       [&](const std::vector<int>& pick, double prob) {
                         std::vector<int> forced = pick;
                         forced[i] = static_cast<int>(k);
                         dev += prob * profile_cost(game, forced, i,
                                                    profile_loads(game, forced));
                       });
      best_deviation = std::min(best_deviation, dev);
    }
    worst = std::max(worst, current - best_deviation);
  }
  return worst;
}

EstimatorMoments estimator_expectation(const MixedSupport& support,
                                       const Eigen::VectorXd& cost) {
  SecondMoment moment = second_moment(support);
  Eigen::LLT<Eigen::MatrixXd> llt(moment.n_matrix);
  if (llt.info() != Eigen::Success)
    throw InvariantError("second-moment matrix is not positive definite");
  EstimatorMoments out;
  out.mean = Eigen::VectorXd::Zero(moment.n_matrix.rows());
  for (std::size_t p = 0; p < support.atoms.size(); ++p) {
    double loss = support.atoms[p].path.cost_under(cost);
    Eigen::VectorXd g = loss * llt.solve(support.coords[p]);
    out.mean += support.atoms[p].weight * g;
    out.second_moment += support.atoms[p].weight * g.squaredNorm();
  }
  return out;
}

}  // namespace bgdce
