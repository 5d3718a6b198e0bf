// Acceptance battery for the simulator: each criterion prints one PASS/FAIL
// line and the process exits nonzero if any criterion fails. Tolerances and
// runtime budgets are pinned here.

#include <Eigen/Core>
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <nlohmann/json.hpp>
#include <sstream>
#include <string>
#include <vector>

#include "bgdce/estimator.hpp"
#include "bgdce/game.hpp"
#include "bgdce/graph.hpp"
#include "bgdce/harness.hpp"
#include "bgdce/io.hpp"
#include "bgdce/learner.hpp"
#include "bgdce/oracle.hpp"
#include "bgdce/polytope.hpp"
#include "bgdce/random.hpp"
#include "bgdce/spanner.hpp"
#include "bgdce/testing.hpp"

using namespace bgdce;

namespace {

constexpr std::uint64_t kSeed = 20240817;

struct Outcome {
  bool pass = true;
  std::string detail;

  void fail(const std::string& why) {
    pass = false;
    if (!detail.empty()) detail += "; ";
    detail += why;
  }
};

AgentGraph first_agent(const GraphSpec& spec) {
  return AgentGraph(spec.dag, spec.agents[0].first, spec.agents[0].second);
}

bool reaches(const AgentGraph& g, int from, int to) {
  if (from == to) return true;
  std::vector<char> seen(g.dag().node_count(), 0);
  std::vector<int> stack = {from};
  seen[from] = 1;
  while (!stack.empty()) {
    int v = stack.back();
    stack.pop_back();
    for (int e : g.out_edges(v)) {
      int w = g.dag().edge_dest(e);
      if (w == to) return true;
      if (!seen[w]) {
        seen[w] = 1;
        stack.push_back(w);
      }
    }
  }
  return false;
}

// ---- 1: exact spanner on the eight-node running example ------------------

Outcome criterion_spanner_exactness() {
  Outcome out;
  AgentGraph g = first_agent(figure_graph());
  Spanner sp = build_dag_spanner(g);

  if (sp.dim() != 3) out.fail("expected 3 basis paths, got " + std::to_string(sp.dim()));
  const std::vector<std::vector<int>> expected = {
      {0, 2, 4, 5, 8}, {1, 3, 4, 5, 8}, {1, 3, 4, 6, 7}};
  for (int h = 0; h < sp.dim() && h < 3; ++h)
    if (sp.basis[h].edge_list() != expected[h])
      out.fail("basis path " + std::to_string(h) + " differs from the worked trace");
  if (sp.prefix != std::vector<int>{-1, -1, 1}) out.fail("prefix chain differs");

  double worst = 0.0;
  for (const PathVec& p : enumerate_paths(g, 10)) {
    Eigen::VectorXd a = decompose_in_spanner(sp, p.as_vector());
    for (int h = 0; h < a.size(); ++h)
      worst = std::max(worst, std::abs(a[h] - std::round(a[h])));
    if ((sp.b_matrix * a - p.as_vector()).lpNorm<Eigen::Infinity>() > 1e-9)
      out.fail("recombination off for a path");
    if (a.lpNorm<Eigen::Infinity>() > 1.0 + 1e-9) out.fail("coefficient above 1");
  }
  if (worst > 1e-9) out.fail("coefficients not integral");
  out.detail = "max distance from {-1,0,1}: " + std::to_string(worst);
  return out;
}

// ---- 2: unit-coefficient decomposition on random layered DAGs ------------

Outcome criterion_spanner_fuzz() {
  Outcome out;
  Rng rng(derive_seed(kSeed, 2));
  double worst = 0.0;
  for (int rep = 0; rep < 200; ++rep) {
    GraphSpec spec = random_layered_dag(rng);
    AgentGraph g = first_agent(spec);
    Spanner sp = build_dag_spanner(g);

    for (const PathVec& p : enumerate_paths(g, 300)) {
      Eigen::VectorXd a = decompose_in_spanner(sp, p.as_vector());
      worst = std::max(worst, a.lpNorm<Eigen::Infinity>());
      if (a.lpNorm<Eigen::Infinity>() > 1.0 + 1e-9) {
        out.fail("coefficient above 1 on graph " + std::to_string(rep));
        break;
      }
    }

    for (int k = 0; k < sp.dim() && out.pass; ++k)
      for (int l = k + 1; l < sp.dim(); ++l) {
        int dest_k = g.dag().edge_dest(sp.partition.red_edges[k]);
        int src_l = g.dag().edge_source(sp.partition.red_edges[l]);
        if (reaches(g, dest_k, src_l) && sp.prefix[k] == sp.prefix[l]) {
          out.fail("connected red edges share a prefix on graph " + std::to_string(rep));
          break;
        }
      }
    if (!out.pass) break;
  }
  if (out.pass) out.detail = "200 graphs, max |coefficient| " + std::to_string(worst);
  return out;
}

// ---- 3: path decomposition of random flow points --------------------------

Outcome criterion_caratheodory() {
  Outcome out;
  Rng rng(derive_seed(kSeed, 3));
  std::vector<GraphSpec> graphs = {parallel_edges(3), diamond(), figure_graph(),
                                   random_layered_dag(rng), random_layered_dag(rng)};
  double worst = 0.0;
  for (std::size_t gi = 0; gi < graphs.size() && out.pass; ++gi) {
    AgentGraph g = first_agent(graphs[gi]);
    for (int rep = 0; rep < 1000; ++rep) {
      Eigen::VectorXd x = random_flow_point(g, rng, 6);
      std::vector<Atom> atoms = caratheodory_dag(g, x);
      if (atoms.size() > static_cast<std::size_t>(g.edge_count())) {
        out.fail("more than m atoms on graph " + std::to_string(gi));
        break;
      }
      Eigen::VectorXd back = Eigen::VectorXd::Zero(x.size());
      for (const Atom& a : atoms) back += a.weight * a.path.as_vector();
      double err = (back - x).lpNorm<Eigen::Infinity>();
      worst = std::max(worst, err);
      if (err > 1e-8) {
        out.fail("recombination error " + std::to_string(err));
        break;
      }
    }
  }
  if (out.pass)
    out.detail = "5 graphs x 1000 points, max recombination error " +
                 std::to_string(worst);
  return out;
}

// ---- 4: direct projection vs the affine reduction -------------------------

Outcome criterion_projection() {
  Outcome out;
  Rng rng(derive_seed(kSeed, 4));
  double worst = 0.0;
  for (const GraphSpec& spec : {parallel_edges(2), diamond(), figure_graph()}) {
    AgentGraph g = first_agent(spec);
    Spanner sp = build_dag_spanner(g);
    ConstraintSet base = base_constraints(sp);
    for (int rep = 0; rep < 500; ++rep) {
      double mu = 0.02 + 0.48 * rng.next_double();
      Eigen::VectorXd z(sp.dim());
      for (int h = 0; h < sp.dim(); ++h) z[h] = 6.0 * rng.next_double() - 3.0;

      Eigen::VectorXd affine = project_bounded_away(base, z, mu);
      Eigen::VectorXd direct = project_onto(bounded_away_constraints(sp, mu), z);
      double err = (affine - direct).lpNorm<Eigen::Infinity>();
      worst = std::max(worst, err);
      if (err > 1e-7) {
        out.fail("projection mismatch " + std::to_string(err));
        return out;
      }
    }
  }
  out.detail = "3 graphs x 500 pairs, max mismatch " + std::to_string(worst);
  return out;
}

// ---- 5: one-sample estimator bias and moment bounds ------------------------

Outcome criterion_estimator() {
  Outcome out;
  Rng rng(derive_seed(kSeed, 5));
  const double c_max = 2.0;
  double worst_bias = 0.0;

  std::vector<GraphSpec> graphs = {diamond(), figure_graph()};
  for (int rep = 0; rep < 200; ++rep) {
    const GraphSpec& spec = graphs[rep % graphs.size()];
    AgentGraph g = first_agent(spec);
    Spanner sp = build_dag_spanner(g);
    ConstraintSet base = base_constraints(sp);
    const double m = sp.ambient_dim();

    double mu = 0.05 + 0.45 * rng.next_double();
    Eigen::VectorXd z(sp.dim());
    for (int h = 0; h < sp.dim(); ++h) z[h] = 4.0 * rng.next_double() - 2.0;
    Eigen::VectorXd alpha = project_bounded_away(base, z, mu);
    MixedSupport support = caratheodory_distribution(sp, alpha, mu);
    SecondMoment moment = second_moment(support);

    Eigen::VectorXd c(sp.ambient_dim());
    for (int e = 0; e < c.size(); ++e) c[e] = c_max * rng.next_double();

    EstimatorMoments exact = estimator_expectation(support, c);
    for (int h = 0; h < sp.dim(); ++h) {
      double bias = std::abs(exact.mean[h] - sp.basis[h].cost_under(c));
      worst_bias = std::max(worst_bias, bias);
      if (bias > 1e-7) {
        out.fail("bias " + std::to_string(bias) + " on a basis direction");
        return out;
      }
    }

    const double norm_bound = sp.theta * std::pow(m, 2.5) * c_max / mu;
    for (std::size_t i = 0; i < support.atoms.size(); ++i) {
      double loss = support.atoms[i].path.cost_under(c);
      Eigen::VectorXd gv = estimate_cost(moment, support.coords[i], loss);
      if (gv.norm() > norm_bound + 1e-9) {
        out.fail("sample estimate above the norm bound");
        return out;
      }
    }

    if (exact.second_moment > std::pow(m, 4) * c_max * c_max / mu + 1e-9) {
      out.fail("second moment above its bound");
      return out;
    }
  }
  out.detail = "200 supports, max bias " + std::to_string(worst_bias);
  return out;
}

// ---- 6: potential identities ----------------------------------------------

Outcome criterion_potential() {
  Outcome out;
  Rng rng(derive_seed(kSeed, 6));

  // Exact-potential identity over unilateral deviations.
  GraphSpec dia = diamond();
  dia.agents = {{0, 3}, {0, 3}, {0, 3}};
  GameSpec game = random_game(dia, rng, 2.0);
  AgentGraph g = first_agent(dia);
  std::vector<PathVec> strategies = enumerate_paths(g, 10);
  double worst_dev = 0.0;
  for (int rep = 0; rep < 1000; ++rep) {
    std::vector<PathVec> profile;
    for (int i = 0; i < 3; ++i)
      profile.push_back(strategies[rng.next_index(static_cast<int>(strategies.size()))]);
    int i = rng.next_index(3);
    std::vector<PathVec> deviated = profile;
    deviated[i] = strategies[rng.next_index(static_cast<int>(strategies.size()))];
    double lhs = agent_cost(game, deviated, i) - agent_cost(game, profile, i);
    double rhs = rosenthal_potential(game, deviated) - rosenthal_potential(game, profile);
    worst_dev = std::max(worst_dev, std::abs(lhs - rhs));
  }
  if (worst_dev > 1e-12)
    out.fail("deviation identity off by " + std::to_string(worst_dev));

  // Convolution DP vs explicit joint enumeration, n = 3 and n = 4.
  double worst_dp = 0.0;
  {
    ExplicitGame oracle_game;
    oracle_game.resources = 4;
    std::vector<Eigen::VectorXd> paths;
    for (const PathVec& p : strategies) paths.push_back(p.as_vector());
    oracle_game.strategies.assign(3, paths);
    oracle_game.cost_tables = game.cost_tables;
    for (int rep = 0; rep < 100; ++rep) {
      std::vector<Eigen::VectorXd> probs, marginals;
      for (int i = 0; i < 3; ++i) {
        double p = rng.next_double();
        probs.push_back(Eigen::Vector2d(p, 1.0 - p));
        marginals.push_back(p * paths[0] + (1.0 - p) * paths[1]);
      }
      worst_dp = std::max(worst_dp, std::abs(exact_expected_potential(oracle_game, probs) -
                                             expected_potential(game, marginals)));
    }
  }
  {
    GraphSpec par = parallel_edges(2);
    par.agents.assign(4, {0, 1});
    GameSpec game4 = random_game(par, rng, 1.0);
    ExplicitGame oracle_game;
    oracle_game.resources = 2;
    oracle_game.strategies.assign(
        4, {Eigen::Vector2d(1.0, 0.0), Eigen::Vector2d(0.0, 1.0)});
    oracle_game.cost_tables = game4.cost_tables;
    for (int rep = 0; rep < 100; ++rep) {
      std::vector<Eigen::VectorXd> probs, marginals;
      for (int i = 0; i < 4; ++i) {
        double p = rng.next_double();
        probs.push_back(Eigen::Vector2d(p, 1.0 - p));
        marginals.push_back(Eigen::Vector2d(p, 1.0 - p));
      }
      worst_dp = std::max(worst_dp, std::abs(exact_expected_potential(oracle_game, probs) -
                                             expected_potential(game4, marginals)));
    }
  }
  if (worst_dp > 1e-12) out.fail("DP vs enumeration off by " + std::to_string(worst_dp));

  // Gradient vs central differences on interior marginals.
  double worst_fd = 0.0;
  const double h = 1e-5;
  for (int rep = 0; rep < 20; ++rep) {
    std::vector<Eigen::VectorXd> x;
    for (int i = 0; i < 3; ++i) {
      double p = 0.1 + 0.8 * rng.next_double();
      Eigen::VectorXd xi(4);
      xi << p, 1.0 - p, p, 1.0 - p;
      x.push_back(xi);
    }
    for (int i = 0; i < 3; ++i) {
      Eigen::VectorXd grad = potential_gradient(game, x, i);
      for (int e = 0; e < 4; ++e) {
        auto shifted = x;
        shifted[i][e] = x[i][e] + h;
        double up = expected_potential(game, shifted);
        shifted[i][e] = x[i][e] - h;
        double down = expected_potential(game, shifted);
        double fd = (up - down) / (2.0 * h);
        double rel = std::abs(grad[e] - fd) / std::max(1.0, std::abs(fd));
        worst_fd = std::max(worst_fd, rel);
      }
    }
  }
  if (worst_fd > 1e-6) out.fail("gradient vs differences off by " + std::to_string(worst_fd));

  if (out.pass)
    out.detail = "deviation " + std::to_string(worst_dev) + ", dp " +
                 std::to_string(worst_dp) + ", fd " + std::to_string(worst_fd);
  return out;
}

// ---- 7: zero gap at known equilibria ---------------------------------------

GameSpec two_agent_parallel() {
  GraphSpec graph = parallel_edges(2);
  graph.agents = {{0, 1}, {0, 1}};
  GameSpec spec;
  spec.dag = graph.dag;
  spec.agents = graph.agents;
  spec.cost_tables = {{0.0, 1.0, 2.0}, {0.0, 1.0, 2.0}};
  spec.c_max = 2.0;
  return spec;
}

Outcome criterion_equilibria() {
  Outcome out;
  GameRuntime rt = build_runtime(two_agent_parallel());

  std::vector<Eigen::VectorXd> split = {Eigen::Vector2d(1.0, 0.0),
                                        Eigen::Vector2d(0.0, 1.0)};
  double split_gap = nash_gap(rt, split);
  std::vector<Eigen::VectorXd> uniform = {Eigen::Vector2d(0.5, 0.5),
                                          Eigen::Vector2d(0.5, 0.5)};
  double mixed_gap = nash_gap(rt, uniform);

  if (std::abs(split_gap) > 1e-9) out.fail("split profile gap " + std::to_string(split_gap));
  if (std::abs(mixed_gap) > 1e-9) out.fail("uniform profile gap " + std::to_string(mixed_gap));
  out.detail = "split " + std::to_string(split_gap) + ", mixed " + std::to_string(mixed_gap);
  return out;
}

// ---- 8: self-play equilibrium trend ----------------------------------------

Outcome criterion_self_play() {
  Outcome out;
  GameRuntime rt = build_runtime(two_agent_parallel());
  Schedule sched = make_schedule(rt.spec, ScheduleVariant::kNash);

  int improved = 0;
  double frac_sum = 0.0;
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    DynamicsConfig cfg;
    cfg.horizon = 50000;
    cfg.seed = seed;
    cfg.metric_stride = 1;
    cfg.gap_epsilon = 0.25;
    SeedStats stats = run_dynamics(rt, sched, cfg);
    if (stats.gap_last_decile_mean < stats.gap_first_decile_mean) ++improved;
    frac_sum += stats.frac_gap_below_eps_last_half;
  }
  double mean_frac = frac_sum / 10.0;
  if (improved < 9)
    out.fail("late window improved in only " + std::to_string(improved) + "/10 seeds");
  if (mean_frac <= 0.5)
    out.fail("fraction of late rounds with gap <= 0.25 is " + std::to_string(mean_frac));
  out.detail = std::to_string(improved) + "/10 seeds improved, late-half frac " +
               std::to_string(mean_frac);
  return out;
}

// ---- 9: sublinear regret against a periodic adversary ----------------------

Outcome criterion_regret_trend() {
  Outcome out;
  GraphSpec graph = parallel_edges(2);
  auto sp = std::make_shared<const Spanner>(build_dag_spanner(first_agent(graph)));

  Schedule sched;
  sched.variant = ScheduleVariant::kRegret;
  sched.n = 1;
  sched.m = 2;
  sched.c_max = 2.0;

  AdversarySpec adv;
  adv.kind = AdversaryKind::kPeriodic;
  adv.c_max = 2.0;
  adv.costs = {Eigen::Vector2d(1.0, 2.0), Eigen::Vector2d(1.0, 2.0),
               Eigen::Vector2d(2.0, 1.0), Eigen::Vector2d(1.0, 2.0)};

  const std::vector<std::int64_t> horizons = {1000, 10000, 100000};
  double worst_slope = 0.0;
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    Learner learner(sp, sched, derive_seed(seed, 1));
    Rng adv_rng(derive_seed(seed, 2));
    std::vector<PathVec> played;
    std::vector<Eigen::VectorXd> costs;
    played.reserve(100000);
    costs.reserve(100000);
    for (std::int64_t t = 1; t <= 100000; ++t) {
      Eigen::VectorXd c = adversary_costs(adv, t, learner.marginal(), adv_rng);
      const PathVec& p = learner.sample_strategy();
      played.push_back(p);
      costs.push_back(c);
      learner.step(p.cost_under(c));
    }
    std::vector<double> regret = realized_regret(sp->graph, played, costs);

    std::vector<double> r;
    for (std::int64_t T : horizons) r.push_back(regret[T - 1]);
    for (std::size_t k = 0; k + 1 < horizons.size(); ++k)
      if (r[k + 1] / static_cast<double>(horizons[k + 1]) >=
          r[k] / static_cast<double>(horizons[k])) {
        out.fail("seed " + std::to_string(seed) + ": regret/T not decreasing");
        break;
      }

    if (r[0] > 0.0 && r[1] > 0.0 && r[2] > 0.0) {
      double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
      for (std::size_t k = 0; k < 3; ++k) {
        double lx = std::log(static_cast<double>(horizons[k]));
        double ly = std::log(r[k]);
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
      }
      double slope = (3.0 * sxy - sx * sy) / (3.0 * sxx - sx * sx);
      worst_slope = std::max(worst_slope, slope);
      if (slope > 0.9)
        out.fail("seed " + std::to_string(seed) + ": log-log slope " +
                 std::to_string(slope));
    }
    if (!out.pass) break;
  }
  if (out.pass) out.detail = "5 seeds, worst log-log slope " + std::to_string(worst_slope);
  return out;
}

// ---- 10: byte-identical reruns ---------------------------------------------

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Outcome criterion_determinism() {
  Outcome out;
  ExperimentConfig cfg;
  cfg.game = two_agent_parallel();
  cfg.variant = ScheduleVariant::kNash;
  cfg.horizon = 50000;
  cfg.seeds = {1};
  cfg.metric_stride = 1;
  cfg.progress = false;

  auto root = std::filesystem::temp_directory_path() / "bgdce_acceptance";
  std::filesystem::remove_all(root);
  auto dir_a = root / "a";
  auto dir_b = root / "b";
  run_experiment(cfg, dir_a.string());
  run_experiment(cfg, dir_b.string());

  std::string a = slurp(dir_a / "seed_1.csv");
  std::string b = slurp(dir_b / "seed_1.csv");
  if (a.empty()) out.fail("first run produced no output");
  if (a != b) out.fail("reruns differ");
  out.detail = std::to_string(a.size()) + " bytes compared";
  std::filesystem::remove_all(root);
  return out;
}

struct Criterion {
  int id;
  const char* name;
  std::function<Outcome()> run;
  double budget_seconds;  // 0 = no budget
};

}  // namespace

int main() {
  std::vector<Criterion> criteria = {
      {1, "spanner exactness on the running example", criterion_spanner_exactness, 1.0},
      {2, "unit-coefficient decomposition on 200 random DAGs", criterion_spanner_fuzz, 30.0},
      {3, "flow decomposition recombines within m atoms", criterion_caratheodory, 10.0},
      {4, "direct vs affine projection agreement", criterion_projection, 0.0},
      {5, "estimator bias and moment bounds", criterion_estimator, 0.0},
      {6, "potential identities and gradients", criterion_potential, 0.0},
      {7, "zero equilibrium gap at known equilibria", criterion_equilibria, 0.0},
      {8, "self-play equilibrium gap trend", criterion_self_play, 300.0},
      {9, "sublinear regret against a periodic adversary", criterion_regret_trend, 300.0},
      {10, "byte-identical reruns", criterion_determinism, 0.0},
  };

  int failures = 0;
  for (const Criterion& c : criteria) {
    auto start = std::chrono::steady_clock::now();
    Outcome out;
    try {
      out = c.run();
    } catch (const std::exception& e) {
      out.pass = false;
      out.detail = std::string("exception: ") + e.what();
    }
    double elapsed =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (c.budget_seconds > 0.0 && elapsed > c.budget_seconds) {
      out.pass = false;
      if (!out.detail.empty()) out.detail += "; ";
      out.detail += "exceeded " + std::to_string(c.budget_seconds) + "s budget";
    }
    if (!out.pass) ++failures;
    std::printf("[%2d] %s  %s (%.2fs)%s%s\n", c.id, out.pass ? "PASS" : "FAIL", c.name,
                elapsed, out.detail.empty() ? "" : " -- ", out.detail.c_str());
    std::fflush(stdout);
  }

  std::printf("acceptance: %d/10 criteria passed\n", 10 - failures);
  return failures == 0 ? 0 : 1;
}
