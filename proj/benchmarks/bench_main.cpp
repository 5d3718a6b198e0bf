#include <benchmark/benchmark.h>

#include <Eigen/Core>
#include <memory>
#include <vector>

#include "bgdce/game.hpp"
#include "bgdce/graph.hpp"
#include "bgdce/learner.hpp"
#include "bgdce/polytope.hpp"
#include "bgdce/random.hpp"
#include "bgdce/spanner.hpp"
#include "bgdce/testing.hpp"

using namespace bgdce;

namespace {

AgentGraph first_agent(const GraphSpec& spec) {
  return AgentGraph(spec.dag, spec.agents[0].first, spec.agents[0].second);
}

// Medium layered DAG, fixed across runs so numbers are comparable.
GraphSpec bench_dag() {
  Rng rng(derive_seed(1729, 4));
  LayeredDagParams params;
  params.min_layers = 5;
  params.max_layers = 6;
  params.extra_edges = 6;
  return random_layered_dag(rng, params);
}

void BM_BuildSpanner(benchmark::State& state) {
  GraphSpec spec = bench_dag();
  AgentGraph g = first_agent(spec);
  for (auto _ : state) benchmark::DoNotOptimize(build_dag_spanner(g));
}
BENCHMARK(BM_BuildSpanner);

void BM_DecomposeInSpanner(benchmark::State& state) {
  GraphSpec spec = bench_dag();
  AgentGraph g = first_agent(spec);
  Spanner sp = build_dag_spanner(g);
  Rng rng(derive_seed(1729, 5));
  Eigen::VectorXd x = random_flow_point(g, rng, 6);
  for (auto _ : state) benchmark::DoNotOptimize(decompose_in_spanner(sp, x));
}
BENCHMARK(BM_DecomposeInSpanner);

void BM_CaratheodoryDag(benchmark::State& state) {
  GraphSpec spec = bench_dag();
  AgentGraph g = first_agent(spec);
  Rng rng(derive_seed(1729, 6));
  Eigen::VectorXd x = random_flow_point(g, rng, 6);
  for (auto _ : state) benchmark::DoNotOptimize(caratheodory_dag(g, x));
}
BENCHMARK(BM_CaratheodoryDag);

void BM_ProjectBoundedAway(benchmark::State& state) {
  GraphSpec spec = bench_dag();
  AgentGraph g = first_agent(spec);
  Spanner sp = build_dag_spanner(g);
  ConstraintSet base = base_constraints(sp);
  Rng rng(derive_seed(1729, 7));
  Eigen::VectorXd z(sp.dim());
  for (int h = 0; h < sp.dim(); ++h) z[h] = 4.0 * rng.next_double() - 2.0;
  for (auto _ : state)
    benchmark::DoNotOptimize(project_bounded_away(base, z, 0.2));
}
BENCHMARK(BM_ProjectBoundedAway);

void BM_CaratheodoryDistribution(benchmark::State& state) {
  GraphSpec spec = bench_dag();
  AgentGraph g = first_agent(spec);
  Spanner sp = build_dag_spanner(g);
  ConstraintSet base = base_constraints(sp);
  Rng rng(derive_seed(1729, 8));
  Eigen::VectorXd z(sp.dim());
  for (int h = 0; h < sp.dim(); ++h) z[h] = 4.0 * rng.next_double() - 2.0;
  Eigen::VectorXd alpha = project_bounded_away(base, z, 0.2);
  for (auto _ : state)
    benchmark::DoNotOptimize(caratheodory_distribution(sp, alpha, 0.2));
}
BENCHMARK(BM_CaratheodoryDistribution);

// One full bandit round: sample a path, feed the loss back, project.
void BM_LearnerRound(benchmark::State& state) {
  GraphSpec spec = bench_dag();
  auto sp = std::make_shared<const Spanner>(build_dag_spanner(first_agent(spec)));
  Schedule sched;
  sched.variant = ScheduleVariant::kRegret;
  sched.m = sp->ambient_dim();
  sched.c_max = 1.0;
  Learner learner(sp, sched, 99);
  Eigen::VectorXd costs =
      Eigen::VectorXd::Constant(sp->ambient_dim(), 0.25);
  for (auto _ : state) {
    const PathVec& p = learner.sample_strategy();
    learner.step(p.cost_under(costs));
  }
  state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_LearnerRound);

void BM_ExpectedPotential(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  GraphSpec graph = diamond();
  graph.agents.assign(n, {0, 3});
  Rng rng(derive_seed(1729, 9));
  GameSpec spec = random_game(graph, rng, 2.0);
  std::vector<Eigen::VectorXd> x;
  for (int i = 0; i < n; ++i) {
    double p = rng.next_double();
    Eigen::VectorXd xi(4);
    xi << p, 1.0 - p, p, 1.0 - p;
    x.push_back(xi);
  }
  for (auto _ : state) benchmark::DoNotOptimize(expected_potential(spec, x));
}
BENCHMARK(BM_ExpectedPotential)->Arg(2)->Arg(4)->Arg(8);

void BM_NashGap(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  GraphSpec graph = figure_graph();
  graph.agents.assign(n, {0, 7});
  Rng rng(derive_seed(1729, 10));
  GameSpec spec = random_game(graph, rng, 2.0);
  GameRuntime rt = build_runtime(spec);
  std::vector<Eigen::VectorXd> x;
  for (int i = 0; i < n; ++i) {
    Eigen::VectorXd z(3);
    for (int h = 0; h < 3; ++h) z[h] = rng.next_double();
    ConstraintSet base = base_constraints(*rt.spanners[i]);
    x.push_back(rt.spanners[i]->b_matrix * project_bounded_away(base, z, 0.1));
  }
  for (auto _ : state) benchmark::DoNotOptimize(nash_gap(rt, x));
}
BENCHMARK(BM_NashGap)->Arg(2)->Arg(4);

}  // namespace

BENCHMARK_MAIN();
