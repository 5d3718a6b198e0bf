#include "bgdce/game.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "bgdce/errors.hpp"
#include "bgdce/random.hpp"

namespace bgdce {

void validate_game(const GameSpec& spec) {
  if (!spec.dag) throw PreconditionError("game has no graph");
  const int n = spec.agent_count();
  if (n < 1) throw PreconditionError("game needs at least one agent");
  if (spec.c_max <= 0.0) throw PreconditionError("c_max must be positive");
  if (static_cast<int>(spec.cost_tables.size()) != spec.edge_count())
    throw PreconditionError("expected one cost table per edge");
  for (int e = 0; e < spec.edge_count(); ++e) {
    const auto& table = spec.cost_tables[e];
    if (static_cast<int>(table.size()) != n + 1)
      throw PreconditionError("cost table for edge " + std::to_string(e) +
                              " must have n+1 = " + std::to_string(n + 1) + " entries");
    if (table[0] != 0.0)
      throw PreconditionError("cost table for edge " + std::to_string(e) +
                              " must start at 0");
    for (int l = 1; l <= n; ++l) {
      if (table[l] < table[l - 1])
        throw PreconditionError("cost table for edge " + std::to_string(e) +
                                " is decreasing");
      if (table[l] > spec.c_max)
        throw PreconditionError("cost table for edge " + std::to_string(e) +
                                " exceeds c_max");
    }
  }
}

GameRuntime build_runtime(GameSpec spec) {
  validate_game(spec);
  GameRuntime rt{std::move(spec), {}, {}};
  for (auto [s, t] : rt.spec.agents) {
    rt.graphs.emplace_back(rt.spec.dag, s, t);
    rt.spanners.push_back(std::make_shared<const Spanner>(build_dag_spanner(rt.graphs.back())));
  }
  return rt;
}

Schedule make_schedule(const GameSpec& spec, ScheduleVariant variant, double gamma_scale) {
  Schedule s;
  s.variant = variant;
  s.n = spec.agent_count();
  s.m = spec.edge_count();
  s.c_max = spec.c_max;
  s.theta = 1.0;
  s.gamma_scale = gamma_scale;
  return s;
}

Eigen::VectorXi loads(const GameSpec& spec, const std::vector<PathVec>& profile) {
  if (static_cast<int>(profile.size()) != spec.agent_count())
    throw PreconditionError("profile size does not match agent count");
  Eigen::VectorXi l = Eigen::VectorXi::Zero(spec.edge_count());
  for (const auto& p : profile)
    for (int e : p.edge_list()) ++l[e];
  return l;
}

double agent_cost(const GameSpec& spec, const std::vector<PathVec>& profile, int i) {
  Eigen::VectorXi l = loads(spec, profile);
  double total = 0.0;
  for (int e : profile[i].edge_list()) total += spec.cost_tables[e][l[e]];
  return total;
}

double rosenthal_potential(const GameSpec& spec, const std::vector<PathVec>& profile) {
  Eigen::VectorXi l = loads(spec, profile);
  double total = 0.0;
  for (int e = 0; e < spec.edge_count(); ++e)
    for (int k = 1; k <= l[e]; ++k) total += spec.cost_tables[e][k];
  return total;
}

std::vector<double> poisson_binomial_pmf(const std::vector<double>& probs) {
  std::vector<double> pmf = {1.0};
  for (double p : probs) {
    if (p < -1e-9 || p > 1.0 + 1e-9)
      throw PreconditionError("probability outside [0, 1]");
    p = std::clamp(p, 0.0, 1.0);
    pmf.push_back(0.0);
    for (auto k = pmf.size(); k-- > 1;)
      pmf[k] = pmf[k] * (1.0 - p) + pmf[k - 1] * p;
    pmf[0] *= (1.0 - p);
  }
  return pmf;
}

namespace {

void check_marginals(const GameSpec& spec, const std::vector<Eigen::VectorXd>& x) {
  if (static_cast<int>(x.size()) != spec.agent_count())
    throw PreconditionError("marginal profile size does not match agent count");
  for (const auto& xi : x)
    if (xi.size() != spec.edge_count())
      throw PreconditionError("marginal vector has wrong dimension");
}

}  // namespace

double expected_potential(const GameSpec& spec, const std::vector<Eigen::VectorXd>& x) {
  check_marginals(spec, x);
  const int n = spec.agent_count();
  double total = 0.0;
  std::vector<double> probs(n);
  for (int e = 0; e < spec.edge_count(); ++e) {
    for (int i = 0; i < n; ++i) probs[i] = x[i][e];
    std::vector<double> pmf = poisson_binomial_pmf(probs);
    double prefix = 0.0;
    for (int k = 1; k <= n; ++k) {
      prefix += spec.cost_tables[e][k];
      total += pmf[k] * prefix;
    }
  }
  return total;
}

Eigen::VectorXd potential_gradient(const GameSpec& spec,
                                   const std::vector<Eigen::VectorXd>& x, int i) {
  check_marginals(spec, x);
  const int n = spec.agent_count();
  if (i < 0 || i >= n) throw PreconditionError("agent index out of range");
  Eigen::VectorXd grad(spec.edge_count());
  std::vector<double> probs;
  probs.reserve(n - 1);
  for (int e = 0; e < spec.edge_count(); ++e) {
    probs.clear();
    for (int j = 0; j < n; ++j)
      if (j != i) probs.push_back(x[j][e]);
    std::vector<double> pmf = poisson_binomial_pmf(probs);
    double v = 0.0;
    for (int k = 0; k <= n - 1; ++k) v += pmf[k] * spec.cost_tables[e][k + 1];
    grad[e] = v;
  }
  return grad;
}

std::pair<PathVec, double> best_response(const GameRuntime& rt,
                                         const std::vector<Eigen::VectorXd>& x, int i) {
  return shortest_path(rt.graphs[i], potential_gradient(rt.spec, x, i));
}

double nash_gap(const GameRuntime& rt, const std::vector<Eigen::VectorXd>& x) {
  check_marginals(rt.spec, x);
  double worst = -std::numeric_limits<double>::infinity();
  for (int i = 0; i < rt.spec.agent_count(); ++i) {
    Eigen::VectorXd grad = potential_gradient(rt.spec, x, i);
    double br = shortest_path(rt.graphs[i], grad).second;
    worst = std::max(worst, grad.dot(x[i]) - br);
  }
  return worst;
}

SeedStats run_dynamics(const GameRuntime& rt, const Schedule& schedule,
                       const DynamicsConfig& cfg) {
  const GameSpec& spec = rt.spec;
  const int n = spec.agent_count();
  const int m = spec.edge_count();
  if (cfg.horizon < 1) throw PreconditionError("horizon must be at least 1");
  if (cfg.metric_stride < 1) throw PreconditionError("metric stride must be at least 1");

  std::vector<Learner> learners;
  learners.reserve(n);
  for (int i = 0; i < n; ++i)
    learners.emplace_back(rt.spanners[i], schedule, derive_seed(cfg.seed, i));

  // Hindsight-best tracking per agent against its counterfactual cost
  // sequence c_e = cost_e(L_e^{-i} + 1).
  std::vector<Eigen::VectorXd> csum(n, Eigen::VectorXd::Zero(m));
  std::vector<double> cum_cost(n, 0.0), best_val(n, 0.0), cum_regret(n, 0.0);
  std::vector<PathVec> best_path(n);
  for (int i = 0; i < n; ++i) best_path[i] = shortest_path(rt.graphs[i], csum[i]).first;

  auto is_checkpoint = [&](std::int64_t t) {
    if (cfg.exact_regret || t == cfg.horizon) return true;
    return (t & (t - 1)) == 0;  // powers of two
  };

  std::vector<std::pair<std::int64_t, double>> gap_series;
  std::vector<PathVec> profile(n);
  std::vector<Eigen::VectorXd> x(n);
  SeedStats stats;

  for (std::int64_t t = 1; t <= cfg.horizon; ++t) {
    const bool metric_round = ((t - 1) % cfg.metric_stride == 0) || t == cfg.horizon;
    ScheduleValues values = learners[0].current_schedule();

    std::optional<double> gap, pot;
    if (metric_round) {
      for (int i = 0; i < n; ++i) x[i] = learners[i].marginal();
      gap = nash_gap(rt, x);
      pot = expected_potential(spec, x);
      if (*gap < -1e-9) throw InvariantError("negative equilibrium gap emitted");
      gap_series.emplace_back(t, *gap);
    }

    for (int i = 0; i < n; ++i) profile[i] = learners[i].sample_strategy();
    Eigen::VectorXi l = loads(spec, profile);

    for (int i = 0; i < n; ++i) {
      double loss = 0.0;
      for (int e : profile[i].edge_list()) loss += spec.cost_tables[e][l[e]];
      cum_cost[i] += loss;

      Eigen::VectorXd c(m);
      for (int e = 0; e < m; ++e) {
        int others = l[e] - (profile[i].contains(e) ? 1 : 0);
        c[e] = spec.cost_tables[e][others + 1];
      }
      csum[i] += c;
      best_val[i] += best_path[i].cost_under(c);
      if (is_checkpoint(t)) {
        auto [path, val] = shortest_path(rt.graphs[i], csum[i]);
        best_path[i] = std::move(path);
        best_val[i] = val;
      }
      cum_regret[i] = cum_cost[i] - best_val[i];

      if (cfg.sink)
        cfg.sink(RoundRow{t, i, loss, cum_regret[i], values.mu, values.gamma, gap, pot});
      learners[i].step(loss);
    }
    if (cfg.progress) cfg.progress(t);
  }

  stats.final_regret = cum_regret;
  if (!gap_series.empty()) {
    stats.final_gap = gap_series.back().second;
    double sum = 0.0, below = 0.0;
    double first_sum = 0.0, last_sum = 0.0, half_count = 0.0, half_below = 0.0;
    std::size_t first_count = 0, last_count = 0;
    const std::int64_t decile = cfg.horizon / 10;
    for (auto [t, g] : gap_series) {
      sum += g;
      if (g <= cfg.gap_epsilon) below += 1.0;
      if (t <= std::max<std::int64_t>(decile, 1)) { first_sum += g; ++first_count; }
      if (t > cfg.horizon - decile) { last_sum += g; ++last_count; }
      if (t > cfg.horizon / 2) {
        half_count += 1.0;
        if (g <= cfg.gap_epsilon) half_below += 1.0;
      }
    }
    stats.time_avg_gap = sum / gap_series.size();
    stats.frac_gap_below_eps = below / gap_series.size();
    if (first_count > 0) stats.gap_first_decile_mean = first_sum / first_count;
    if (last_count > 0) stats.gap_last_decile_mean = last_sum / last_count;
    if (half_count > 0) stats.frac_gap_below_eps_last_half = half_below / half_count;
  }
  return stats;
}

}  // namespace bgdce
