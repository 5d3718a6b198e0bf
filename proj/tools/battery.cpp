#include "battery.hpp"

#include <cmath>
#include <functional>
#include <string>
#include <vector>

#include "bgdce/estimator.hpp"
#include "bgdce/game.hpp"
#include "bgdce/graph.hpp"
#include "bgdce/learner.hpp"
#include "bgdce/oracle.hpp"
#include "bgdce/polytope.hpp"
#include "bgdce/spanner.hpp"
#include "bgdce/testing.hpp"

namespace bgdce {
namespace {

constexpr std::uint64_t kBatterySeed = 42;

struct CheckResult {
  bool pass = true;
  double max_err = 0.0;
  std::string note;

  void track(double err, double tol) {
    max_err = std::max(max_err, err);
    if (err > tol) pass = false;
  }
  void require(bool ok, const std::string& msg) {
    if (!ok) {
      pass = false;
      if (note.empty()) note = msg;
    }
  }
};

AgentGraph agent_graph(const GraphSpec& spec, int i = 0) {
  return AgentGraph(spec.dag, spec.agents[i].first, spec.agents[i].second);
}

// Random distribution over the agent's paths; returns (probs, marginal).
std::pair<Eigen::VectorXd, Eigen::VectorXd> random_path_mixture(
    const std::vector<PathVec>& paths, int m, Rng& rng) {
  Eigen::VectorXd probs(static_cast<int>(paths.size()));
  double total = 0.0;
  for (int k = 0; k < probs.size(); ++k) {
    probs[k] = -std::log(1.0 - rng.next_double());
    total += probs[k];
  }
  probs /= total;
  Eigen::VectorXd x = Eigen::VectorXd::Zero(m);
  for (int k = 0; k < probs.size(); ++k) x += probs[k] * paths[k].as_vector();
  return {probs, x};
}

CheckResult check_spanner_figure() {
  CheckResult r;
  GraphSpec spec = figure_graph();
  AgentGraph g = agent_graph(spec);
  Spanner sp = build_dag_spanner(g);
  r.require(sp.dim() == 3, "expected 3 basis paths");
  r.require(sp.partition.red_edges == std::vector<int>{0, 1, 6}, "red set mismatch");
  r.require(sp.prefix == std::vector<int>{-1, -1, 1}, "prefix mismatch");
  for (const PathVec& p : enumerate_paths(g, 10)) {
    Eigen::VectorXd alpha = decompose_in_spanner(sp, p.as_vector());
    for (int h = 0; h < alpha.size(); ++h)
      r.track(std::abs(alpha[h] - std::round(alpha[h])), 1e-9);
    r.track((sp.b_matrix * alpha - p.as_vector()).lpNorm<Eigen::Infinity>(), 1e-9);
  }
  return r;
}

CheckResult check_spanner_random() {
  CheckResult r;
  Rng rng(derive_seed(kBatterySeed, 1));
  for (int rep = 0; rep < 20; ++rep) {
    GraphSpec spec = random_layered_dag(rng);
    AgentGraph g = agent_graph(spec);
    Spanner sp = build_dag_spanner(g);
    for (int h = 0; h < sp.dim(); ++h)
      r.require(sp.prefix[h] < h, "prefix must point backwards");
    for (const PathVec& p : enumerate_paths(g, 300)) {
      Eigen::VectorXd alpha = decompose_in_spanner(sp, p.as_vector());
      r.track(std::max(0.0, alpha.lpNorm<Eigen::Infinity>() - 1.0), 1e-9);
      r.track(std::abs(alpha.sum() - 1.0), 1e-9);
      r.track((sp.b_matrix * alpha - p.as_vector()).lpNorm<Eigen::Infinity>(), 1e-9);
    }
  }
  return r;
}

CheckResult check_spanner_vs_brute_force() {
  CheckResult r;
  for (const GraphSpec& spec : {parallel_edges(3), diamond(), figure_graph()}) {
    AgentGraph g = agent_graph(spec);
    std::vector<PathVec> paths = enumerate_paths(g, 12);
    std::vector<Eigen::VectorXd> vertices;
    for (const PathVec& p : paths) vertices.push_back(p.as_vector());
    ExplicitSpanner bf = brute_force_spanner(vertices);
    r.track(std::abs(bf.theta - 1.0), 1e-6);
    Spanner sp = build_dag_spanner(g);
    for (const Eigen::VectorXd& v : vertices) {
      Eigen::VectorXd alpha = decompose_in_spanner(sp, v);
      r.track(std::max(0.0, alpha.lpNorm<Eigen::Infinity>() - 1.0), 1e-9);
    }
  }
  return r;
}

CheckResult check_caratheodory_dag() {
  CheckResult r;
  Rng rng(derive_seed(kBatterySeed, 2));
  std::vector<GraphSpec> specs = {diamond(), figure_graph(), random_layered_dag(rng),
                                  random_layered_dag(rng)};
  for (const GraphSpec& spec : specs) {
    AgentGraph g = agent_graph(spec);
    for (int rep = 0; rep < 50; ++rep) {
      Eigen::VectorXd x = random_flow_point(g, rng, 1 + rng.next_index(5));
      std::vector<Atom> atoms = caratheodory_dag(g, x);
      r.require(static_cast<int>(atoms.size()) <= g.dag().edge_count(),
                "more atoms than edges");
      Eigen::VectorXd back = Eigen::VectorXd::Zero(x.size());
      double mass = 0.0;
      for (const Atom& a : atoms) {
        r.require(a.weight > 0.0, "nonpositive atom weight");
        back += a.weight * a.path.as_vector();
        mass += a.weight;
      }
      r.track(std::abs(mass - 1.0), 1e-9);
      r.track((back - x).lpNorm<Eigen::Infinity>(), 1e-8);
    }
  }
  return r;
}

CheckResult check_caratheodory_explicit() {
  CheckResult r;
  Rng rng(derive_seed(kBatterySeed, 3));
  for (const GraphSpec& spec : {parallel_edges(4), diamond(), figure_graph()}) {
    AgentGraph g = agent_graph(spec);
    std::vector<PathVec> paths = enumerate_paths(g, 12);
    std::vector<Eigen::VectorXd> vertices;
    for (const PathVec& p : paths) vertices.push_back(p.as_vector());
    const int m = g.dag().edge_count();
    for (int rep = 0; rep < 20; ++rep) {
      auto [probs, x] = random_path_mixture(paths, m, rng);
      auto combo = caratheodory_explicit(vertices, x);
      r.require(static_cast<int>(combo.size()) <= m + 1, "too many atoms");
      Eigen::VectorXd back = Eigen::VectorXd::Zero(m);
      for (auto [idx, w] : combo) back += w * vertices[idx];
      r.track((back - x).lpNorm<Eigen::Infinity>(), 1e-8);
    }
  }
  return r;
}

CheckResult check_projection() {
  CheckResult r;
  Rng rng(derive_seed(kBatterySeed, 4));
  GraphSpec spec = figure_graph();
  AgentGraph g = agent_graph(spec);
  Spanner sp = build_dag_spanner(g);
  ConstraintSet base = base_constraints(sp);
  const int s = sp.dim();
  auto random_z = [&]() {
    Eigen::VectorXd z(s);
    for (int h = 0; h < s; ++h) z[h] = 4.0 * rng.next_double() - 2.0;
    return z;
  };
  for (int rep = 0; rep < 25; ++rep) {
    Eigen::VectorXd z = random_z(), w = random_z();
    Eigen::VectorXd pz = project_onto(base, z), pw = project_onto(base, w);
    r.track(base.violation(pz), 1e-8);
    r.track((project_onto(base, pz) - pz).lpNorm<Eigen::Infinity>(), 1e-7);
    r.track(std::max(0.0, (pz - pw).norm() - (z - w).norm()), 1e-9);
  }
  return r;
}

CheckResult check_projection_affine_identity() {
  CheckResult r;
  Rng rng(derive_seed(kBatterySeed, 5));
  GraphSpec spec = figure_graph();
  AgentGraph g = agent_graph(spec);
  Spanner sp = build_dag_spanner(g);
  ConstraintSet base = base_constraints(sp);
  const int s = sp.dim();
  for (double mu : {0.1, 0.35}) {
    ConstraintSet direct = bounded_away_constraints(sp, mu);
    for (int rep = 0; rep < 15; ++rep) {
      Eigen::VectorXd z(s);
      for (int h = 0; h < s; ++h) z[h] = 4.0 * rng.next_double() - 2.0;
      Eigen::VectorXd via_base = project_bounded_away(base, z, mu);
      Eigen::VectorXd via_direct = project_onto(direct, z);
      r.track((via_base - via_direct).lpNorm<Eigen::Infinity>(), 1e-6);
    }
  }
  return r;
}

CheckResult check_potential_vs_subset_sum() {
  CheckResult r;
  Rng rng(derive_seed(kBatterySeed, 6));
  GraphSpec graph = diamond();
  graph.agents = {{0, 3}, {0, 3}, {0, 3}};
  GameSpec game = random_game(graph, rng, 2.0);
  AgentGraph g = agent_graph(graph);
  std::vector<PathVec> paths = enumerate_paths(g, 10);
  const int m = game.edge_count();

  ExplicitGame eg;
  eg.resources = m;
  eg.cost_tables = game.cost_tables;
  std::vector<Eigen::VectorXd> verts;
  for (const PathVec& p : paths) verts.push_back(p.as_vector());
  eg.strategies = {verts, verts, verts};
  validate_explicit_game(eg);

  for (int rep = 0; rep < 20; ++rep) {
    std::vector<Eigen::VectorXd> probs, x;
    for (int i = 0; i < 3; ++i) {
      auto [p, xi] = random_path_mixture(paths, m, rng);
      probs.push_back(p);
      x.push_back(xi);
    }
    double fast = expected_potential(game, x);
    double exact = exact_expected_potential(eg, probs);
    r.track(std::abs(fast - exact) / std::max(1.0, std::abs(exact)), 1e-12);
  }
  return r;
}

CheckResult check_exact_potential_identity() {
  CheckResult r;
  Rng rng(derive_seed(kBatterySeed, 7));
  GraphSpec graph = diamond();
  graph.agents = {{0, 3}, {0, 3}, {0, 3}};
  GameSpec game = random_game(graph, rng, 2.0);
  AgentGraph g = agent_graph(graph);
  std::vector<PathVec> paths = enumerate_paths(g, 10);
  const int n = game.agent_count();

  for (int rep = 0; rep < 1000; ++rep) {
    std::vector<PathVec> prof(n);
    for (int i = 0; i < n; ++i)
      prof[i] = paths[rng.next_index(static_cast<int>(paths.size()))];
    int i = rng.next_index(n);
    std::vector<PathVec> dev = prof;
    dev[i] = paths[rng.next_index(static_cast<int>(paths.size()))];
    double cost_delta = agent_cost(game, dev, i) - agent_cost(game, prof, i);
    double pot_delta = rosenthal_potential(game, dev) - rosenthal_potential(game, prof);
    r.track(std::abs(cost_delta - pot_delta), 1e-12);
  }
  return r;
}

CheckResult check_nash_gap_vs_explicit() {
  CheckResult r;
  Rng rng(derive_seed(kBatterySeed, 8));
  GraphSpec graph = diamond();
  graph.agents = {{0, 3}, {0, 3}};
  GameSpec game = random_game(graph, rng, 2.0);
  GameRuntime rt = build_runtime(game);
  std::vector<PathVec> paths = enumerate_paths(rt.graphs[0], 10);
  const int m = game.edge_count();

  ExplicitGame eg;
  eg.resources = m;
  eg.cost_tables = game.cost_tables;
  std::vector<Eigen::VectorXd> verts;
  for (const PathVec& p : paths) verts.push_back(p.as_vector());
  eg.strategies = {verts, verts};
  validate_explicit_game(eg);

  for (int rep = 0; rep < 20; ++rep) {
    std::vector<Eigen::VectorXd> probs, x;
    for (int i = 0; i < 2; ++i) {
      auto [p, xi] = random_path_mixture(paths, m, rng);
      probs.push_back(p);
      x.push_back(xi);
    }
    double fast = nash_gap(rt, x);
    double exact = exact_nash_gap(eg, probs);
    r.require(fast >= -1e-12, "negative gap");
    r.track(std::abs(fast - exact), 1e-9);
  }
  return r;
}

CheckResult check_gradient_finite_differences() {
  CheckResult r;
  Rng rng(derive_seed(kBatterySeed, 9));
  GraphSpec graph = diamond();
  graph.agents = {{0, 3}, {0, 3}, {0, 3}};
  GameSpec game = random_game(graph, rng, 2.0);
  AgentGraph g = agent_graph(graph);
  std::vector<PathVec> paths = enumerate_paths(g, 10);
  const int m = game.edge_count();
  const double h = 1e-5;

  for (int rep = 0; rep < 10; ++rep) {
    std::vector<Eigen::VectorXd> x;
    for (int i = 0; i < 3; ++i) {
      auto [p, xi] = random_path_mixture(paths, m, rng);
      // keep entries interior so the +-h stencil stays in [0, 1]
      x.push_back(0.9 * xi + Eigen::VectorXd::Constant(m, 0.02));
    }
    for (int i = 0; i < 3; ++i) {
      Eigen::VectorXd grad = potential_gradient(game, x, i);
      for (int e = 0; e < m; ++e) {
        std::vector<Eigen::VectorXd> hi = x, lo = x;
        hi[i][e] += h;
        lo[i][e] -= h;
        double fd =
            (expected_potential(game, hi) - expected_potential(game, lo)) / (2.0 * h);
        r.track(std::abs(fd - grad[e]) / std::max(1.0, std::abs(grad[e])), 1e-6);
      }
    }
  }
  return r;
}

CheckResult check_estimator_identity() {
  CheckResult r;
  Rng rng(derive_seed(kBatterySeed, 10));
  GraphSpec spec = figure_graph();
  AgentGraph g = agent_graph(spec);
  Spanner sp = build_dag_spanner(g);
  ConstraintSet base = base_constraints(sp);
  const int m = sp.ambient_dim();

  for (double mu : {0.1, 0.3}) {
    for (int rep = 0; rep < 15; ++rep) {
      Eigen::VectorXd alpha0 =
          decompose_in_spanner(sp, random_flow_point(g, rng, 3));
      Eigen::VectorXd alpha = project_bounded_away(base, alpha0, mu);
      MixedSupport support = caratheodory_distribution(sp, alpha, mu);
      Eigen::VectorXd c(m);
      for (int e = 0; e < m; ++e) c[e] = rng.next_double();
      EstimatorMoments mom = estimator_expectation(support, c);
      r.track((mom.mean - sp.b_matrix.transpose() * c).lpNorm<Eigen::Infinity>(),
              1e-9);
      double bound = std::pow(m, 4) / mu;
      r.require(mom.second_moment <= bound * (1.0 + 1e-9),
                "second moment above its bound");
    }
  }
  return r;
}

CheckResult check_schedule_formulas() {
  CheckResult r;
  Schedule nash{ScheduleVariant::kNash, 2, 2, 2.0, 1.0, 1.0};
  ScheduleValues v1 = schedule_values(nash, 1);
  r.track(std::abs(v1.mu - std::pow(2.0, -1.4)), 1e-15);
  r.track(std::abs(v1.gamma - std::sqrt(2.0 * v1.mu / (8.0 * 64.0))), 1e-15);

  Schedule regret{ScheduleVariant::kRegret, 1, 2, 1.0, 1.0, 1.0};
  ScheduleValues v16 = schedule_values(regret, 16);
  r.track(std::abs(v16.mu - 0.25), 1e-15);
  r.track(std::abs(v16.gamma - 0.25 / (4.0 * 4.0)), 1e-15);

  for (const Schedule& s : {nash, regret}) {
    double prev_mu = 1.0;
    for (std::int64_t t = 1; t <= 1000; ++t) {
      ScheduleValues v = schedule_values(s, t);
      r.require(v.mu <= 0.5 + 1e-15 && v.mu > 0.0, "mu out of range");
      r.require(v.mu <= prev_mu + 1e-15, "mu must be nonincreasing");
      r.require(v.gamma > 0.0, "gamma must be positive");
      prev_mu = v.mu;
    }
  }
  return r;
}

using CheckFn = CheckResult (*)();

}  // namespace

nlohmann::json run_validation_battery() {
  const std::pair<const char*, CheckFn> checks[] = {
      {"spanner_figure_graph", check_spanner_figure},
      {"spanner_random_dags", check_spanner_random},
      {"spanner_vs_brute_force", check_spanner_vs_brute_force},
      {"caratheodory_dag", check_caratheodory_dag},
      {"caratheodory_explicit", check_caratheodory_explicit},
      {"projection_dykstra", check_projection},
      {"projection_affine_identity", check_projection_affine_identity},
      {"potential_dp_vs_subset_sum", check_potential_vs_subset_sum},
      {"exact_potential_identity", check_exact_potential_identity},
      {"nash_gap_vs_explicit", check_nash_gap_vs_explicit},
      {"potential_gradient_fd", check_gradient_finite_differences},
      {"estimator_identity", check_estimator_identity},
      {"schedule_formulas", check_schedule_formulas},
  };

  nlohmann::json out;
  out["checks"] = nlohmann::json::array();
  bool all_pass = true;
  for (const auto& [name, fn] : checks) {
    CheckResult r;
    try {
      r = fn();
    } catch (const std::exception& e) {
      r.pass = false;
      r.note = e.what();
    }
    all_pass = all_pass && r.pass;
    nlohmann::json row = {{"name", name}, {"pass", r.pass}, {"max_err", r.max_err}};
    if (!r.note.empty()) row["note"] = r.note;
    out["checks"].push_back(std::move(row));
  }
  out["all_pass"] = all_pass;
  return out;
}

}  // namespace bgdce
