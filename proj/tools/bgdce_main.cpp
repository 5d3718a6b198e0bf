#include <cstdio>
#include <exception>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "battery.hpp"
#include "bgdce/errors.hpp"
#include "bgdce/harness.hpp"
#include "bgdce/io.hpp"
#include "bgdce/polytope.hpp"
#include "bgdce/spanner.hpp"

namespace {

bgdce::AgentGraph agent_graph_from_file(const std::string& path, int agent) {
  bgdce::GraphSpec spec = bgdce::load_graph_json(bgdce::load_json_file(path));
  if (agent < 0 || agent >= static_cast<int>(spec.agents.size()))
    throw bgdce::PreconditionError("agent index out of range (graph has " +
                                   std::to_string(spec.agents.size()) + " agents)");
  auto [s, t] = spec.agents[agent];
  return bgdce::AgentGraph(spec.dag, s, t);
}

int cmd_run(const std::string& config_path, const std::string& out_flag) {
  bgdce::ExperimentConfig cfg = bgdce::load_config_file(config_path);
  std::string out = out_flag.empty() ? cfg.out_dir : out_flag;
  nlohmann::json summary = bgdce::run_experiment(cfg, out);
  std::fprintf(stderr, "wrote %s/summary.json\n", out.c_str());
  auto failed = summary.at("failed_seeds").get<std::size_t>();
  if (failed > 0) {
    for (const auto& row : summary.at("per_seed"))
      if (row.contains("error"))
        std::fprintf(stderr, "seed %llu failed: %s\n",
                     static_cast<unsigned long long>(row.at("seed").get<std::uint64_t>()),
                     row.at("error").get<std::string>().c_str());
    return 1;
  }
  return 0;
}

int cmd_validate() {
  nlohmann::json report = bgdce::run_validation_battery();
  std::cout << report.dump(2) << '\n';
  return report.at("all_pass").get<bool>() ? 0 : 1;
}

int cmd_spanner(const std::string& graph_path, int agent) {
  bgdce::AgentGraph g = agent_graph_from_file(graph_path, agent);
  bgdce::Spanner sp = bgdce::build_dag_spanner(g);

  nlohmann::json out;
  out["agent"] = agent;
  out["dim"] = sp.dim();
  out["theta"] = sp.theta;
  out["red_edges"] = sp.partition.red_edges;
  auto prefix = nlohmann::json::array();
  for (int p : sp.prefix)
    prefix.push_back(p < 0 ? nlohmann::json() : nlohmann::json(p));
  out["prefix"] = std::move(prefix);
  auto basis = nlohmann::json::array();
  for (const auto& b : sp.basis) basis.push_back(b.edge_list());
  out["basis"] = std::move(basis);
  std::cout << out.dump(2) << '\n';
  return 0;
}

int cmd_decompose(const std::string& graph_path, const std::string& point_json,
                  int agent) {
  bgdce::AgentGraph g = agent_graph_from_file(graph_path, agent);
  nlohmann::json pj = nlohmann::json::parse(point_json);
  if (!pj.is_array() || static_cast<int>(pj.size()) != g.dag().edge_count())
    throw bgdce::PreconditionError("point must be a JSON array with one entry per edge (" +
                                   std::to_string(g.dag().edge_count()) + ")");
  Eigen::VectorXd x(g.dag().edge_count());
  for (int e = 0; e < x.size(); ++e) x[e] = pj[e].get<double>();

  std::vector<bgdce::Atom> atoms = bgdce::caratheodory_dag(g, x);
  Eigen::VectorXd back = Eigen::VectorXd::Zero(x.size());
  nlohmann::json out;
  out["agent"] = agent;
  out["atoms"] = nlohmann::json::array();
  for (const bgdce::Atom& a : atoms) {
    out["atoms"].push_back({{"edges", a.path.edge_list()}, {"weight", a.weight}});
    back += a.weight * a.path.as_vector();
  }
  out["recombination_error"] = (back - x).lpNorm<Eigen::Infinity>();
  std::cout << out.dump(2) << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Bandit gradient descent with Caratheodory exploration over DAG "
               "congestion games"};
  app.require_subcommand(1);

  std::string config_path, out_dir, graph_path, point_json;
  int agent = 0;

  CLI::App* run = app.add_subcommand("run", "Run the experiment described by a config");
  run->add_option("--config", config_path, "Experiment config JSON")->required();
  run->add_option("--out", out_dir, "Output directory (defaults to the config's out_dir)");

  CLI::App* validate =
      app.add_subcommand("validate", "Cross-check fast paths against brute-force "
                                     "oracles; prints a pass/fail report");

  CLI::App* spanner = app.add_subcommand("spanner", "Print the basis paths, prefix "
                                                    "map and theta for one agent");
  spanner->add_option("--graph", graph_path, "Graph JSON")->required();
  spanner->add_option("--agent", agent, "Agent index (default 0)");

  CLI::App* decompose =
      app.add_subcommand("decompose", "Decompose a flow point into path atoms");
  decompose->add_option("--graph", graph_path, "Graph JSON")->required();
  decompose->add_option("--point", point_json, "Flow point as a JSON array")->required();
  decompose->add_option("--agent", agent, "Agent index (default 0)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (run->parsed()) return cmd_run(config_path, out_dir);
    if (validate->parsed()) return cmd_validate();
    if (spanner->parsed()) return cmd_spanner(graph_path, agent);
    if (decompose->parsed()) return cmd_decompose(graph_path, point_json, agent);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
