#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <memory>
#include <optional>
#include <vector>

#include "bgdce/polytope.hpp"
#include "bgdce/random.hpp"
#include "bgdce/spanner.hpp"

namespace bgdce {

enum class ScheduleVariant { kNash, kRegret };

struct Schedule {
  ScheduleVariant variant = ScheduleVariant::kNash;
  int n = 1;       // agents
  int m = 1;       // resources
  double c_max = 1.0;
  double theta = 1.0;
  double gamma_scale = 1.0;  // multiplies gamma_t only
};

struct ScheduleValues {
  double gamma;
  double mu;
};

// nash:   mu_t = min{n^{1/5} / (m^{7/5} t^{1/5} c_max^{1/5}), 1/2}
//         gamma_t = sqrt(c_max mu_t / (theta n^3 m^6 t))
// regret: mu_t = 1 / (2 t^{1/4})
//         gamma_t = mu_t / (m^2 c_max theta sqrt(t))
ScheduleValues schedule_values(const Schedule& s, std::int64_t t);

// Bandit gradient learner over one agent's flow polytope. Per round:
// sample_strategy() draws a pure path from the Caratheodory-plus-basis
// distribution at the current iterate, step(loss) forms the one-sample
// gradient estimate and projects the gradient step onto the next
// bounded-away polytope.
class Learner {
 public:
  Learner(std::shared_ptr<const Spanner> spanner, Schedule schedule,
          std::uint64_t seed);

  const PathVec& sample_strategy();
  void step(double loss);

  const Eigen::VectorXd& alpha() const { return alpha_; }
  Eigen::VectorXd marginal() const;  // B alpha
  std::int64_t round() const { return t_; }
  double cumulative_cost() const { return cumulative_cost_; }
  ScheduleValues current_schedule() const;
  const Spanner& spanner() const { return *spanner_; }

  // Round state between sample_strategy and step; for cross-checks.
  bool has_pending() const { return pending_.has_value(); }
  const MixedSupport& pending_support() const { return pending_->support; }
  const Eigen::VectorXd& pending_coords() const;

 private:
  struct Pending {
    MixedSupport support;
    int atom_index;
    ScheduleValues values;
  };

  std::shared_ptr<const Spanner> spanner_;
  Schedule schedule_;
  ConstraintSet base_;
  Eigen::VectorXd alpha_;
  Rng rng_;
  std::int64_t t_ = 1;
  double cumulative_cost_ = 0.0;
  std::optional<Pending> pending_;
};

// Cumulative regret series against the best fixed path in hindsight,
// prefix minima recomputed exactly every round.
std::vector<double> realized_regret(const AgentGraph& g,
                                    const std::vector<PathVec>& played,
                                    const std::vector<Eigen::VectorXd>& costs);

}  // namespace bgdce
