#include "bgdce/learner.hpp"

#include <cmath>
#include <string>

#include "bgdce/errors.hpp"
#include "bgdce/estimator.hpp"

namespace bgdce {

ScheduleValues schedule_values(const Schedule& s, std::int64_t t) {
  if (t < 1) throw PreconditionError("rounds are 1-based");
  if (s.n < 1 || s.m < 1 || s.c_max <= 0.0 || s.theta <= 0.0 || s.gamma_scale <= 0.0)
    throw PreconditionError("schedule constants must be positive");
  const double td = static_cast<double>(t);
  double mu, gamma;
  if (s.variant == ScheduleVariant::kNash) {
    mu = std::min(std::pow(s.n, 0.2) /
                      (std::pow(s.m, 1.4) * std::pow(td, 0.2) * std::pow(s.c_max, 0.2)),
                  0.5);
    gamma = std::sqrt(s.c_max * mu /
                      (s.theta * std::pow(s.n, 3) * std::pow(s.m, 6) * td));
  } else {
    mu = 0.5 / std::pow(td, 0.25);
    gamma = mu / (s.m * s.m * s.c_max * s.theta * std::sqrt(td));
  }
  return {s.gamma_scale * gamma, mu};
}

Learner::Learner(std::shared_ptr<const Spanner> spanner, Schedule schedule,
                 std::uint64_t seed)
    : spanner_(std::move(spanner)),
      schedule_(schedule),
      base_(base_constraints(*spanner_)),
      rng_(seed) {
  if (schedule_.m != spanner_->ambient_dim())
    throw PreconditionError("schedule resource count does not match the graph");
  if (schedule_.theta != spanner_->theta)
    throw PreconditionError("schedule theta does not match the spanner");
  const int s = spanner_->dim();
  alpha_ = Eigen::VectorXd::Constant(s, 1.0 / s);  // uniform basis mixture
}

const PathVec& Learner::sample_strategy() {
  if (pending_)
    throw PreconditionError("sample_strategy called twice without a step");
  ScheduleValues values = schedule_values(schedule_, t_);
  MixedSupport support = caratheodory_distribution(*spanner_, alpha_, values.mu);
  int idx = support.sample_index(rng_);
  pending_ = Pending{std::move(support), idx, values};
  return pending_->support.atoms[idx].path;
}

void Learner::step(double loss) {
  if (!pending_) throw PreconditionError("step called before sample_strategy");
  const double bound = schedule_.m * schedule_.c_max;
  if (loss < -1e-9 || loss > bound + 1e-9)
    throw PreconditionError("loss " + std::to_string(loss) + " outside [0, m c_max]");

  const auto& pending = *pending_;
  SecondMoment moment = second_moment(pending.support);
  Eigen::VectorXd g =
      estimate_cost(moment, pending.support.coords[pending.atom_index], loss);

  // |g|_2 <= theta m^{5/2} c_max / mu, with a hair of slack for roundoff.
  const double g_bound = schedule_.theta * std::pow(schedule_.m, 2.5) * schedule_.c_max /
                         pending.values.mu;
  if (g.norm() > g_bound * (1.0 + 1e-9))
    throw InvariantError("gradient estimate exceeds its norm bound");

  cumulative_cost_ += loss;
  ScheduleValues next = schedule_values(schedule_, t_ + 1);
  alpha_ = project_bounded_away(base_, alpha_ - pending.values.gamma * g, next.mu);
  ++t_;
  pending_.reset();
}

Eigen::VectorXd Learner::marginal() const { return spanner_->b_matrix * alpha_; }

ScheduleValues Learner::current_schedule() const { return schedule_values(schedule_, t_); }

const Eigen::VectorXd& Learner::pending_coords() const {
  if (!pending_) throw PreconditionError("no pending round");
  return pending_->support.coords[pending_->atom_index];
}

std::vector<double> realized_regret(const AgentGraph& g,
                                    const std::vector<PathVec>& played,
                                    const std::vector<Eigen::VectorXd>& costs) {
  if (played.size() != costs.size())
    throw PreconditionError("played paths and cost vectors differ in length");
  std::vector<double> regret(played.size());
  Eigen::VectorXd csum = Eigen::VectorXd::Zero(g.dag().edge_count());
  double cumulative = 0.0;
  for (std::size_t t = 0; t < played.size(); ++t) {
    cumulative += played[t].cost_under(costs[t]);
    csum += costs[t];
    regret[t] = cumulative - shortest_path(g, csum).second;
  }
  return regret;
}

}  // namespace bgdce
