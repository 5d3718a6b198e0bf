#include "bgdce/io.hpp"

#include <cstdio>
#include <fstream>

#include "bgdce/errors.hpp"

namespace bgdce {
namespace {

const nlohmann::json& require_key(const nlohmann::json& j, const std::string& key,
                                  const char* context) {
  if (!j.contains(key))
    throw PreconditionError(std::string(context) + ": missing key \"" + key + "\"");
  return j.at(key);
}

}  // namespace

GraphSpec load_graph_json(const nlohmann::json& j) {
  if (!j.is_object()) throw PreconditionError("graph: expected an object");
  for (const auto& [key, value] : j.items())
    if (key != "nodes" && key != "edges" && key != "agents")
      throw PreconditionError("graph: unknown key \"" + key + "\"");

  const auto& nodes = require_key(j, "nodes", "graph");
  if (!nodes.is_number_integer() || nodes.get<int>() < 1)
    throw PreconditionError("graph: \"nodes\" must be a positive integer");

  const auto& edges_json = require_key(j, "edges", "graph");
  if (!edges_json.is_array()) throw PreconditionError("graph: \"edges\" must be an array");
  std::vector<std::pair<int, int>> edges;
  for (const auto& e : edges_json) {
    if (!e.is_array() || e.size() != 2 || !e[0].is_number_integer() ||
        !e[1].is_number_integer())
      throw PreconditionError("graph: each edge must be a [source, dest] pair");
    edges.emplace_back(e[0].get<int>(), e[1].get<int>());
  }

  const auto& agents_json = require_key(j, "agents", "graph");
  if (!agents_json.is_array() || agents_json.empty())
    throw PreconditionError("graph: \"agents\" must be a non-empty array");
  std::vector<std::pair<int, int>> agents;
  for (const auto& a : agents_json) {
    if (!a.is_object() || !a.contains("s") || !a.contains("t"))
      throw PreconditionError("graph: each agent needs keys \"s\" and \"t\"");
    agents.emplace_back(a.at("s").get<int>(), a.at("t").get<int>());
  }

  GraphSpec spec;
  spec.dag = std::make_shared<Dag>(nodes.get<int>(), std::move(edges));
  spec.agents = std::move(agents);
  return spec;
}

nlohmann::json graph_to_json(const Dag& dag, const std::vector<std::pair<int, int>>& agents) {
  nlohmann::json j;
  j["nodes"] = dag.node_count();
  auto edges = nlohmann::json::array();
  for (const auto& [u, v] : dag.edges()) edges.push_back({u, v});
  j["edges"] = std::move(edges);
  auto agents_json = nlohmann::json::array();
  for (const auto& [s, t] : agents) agents_json.push_back({{"s", s}, {"t", t}});
  j["agents"] = std::move(agents_json);
  return j;
}

GameSpec load_game_json(const nlohmann::json& j) {
  if (!j.is_object()) throw PreconditionError("game: expected an object");
  for (const auto& [key, value] : j.items())
    if (key != "graph" && key != "cost_tables" && key != "c_max")
      throw PreconditionError("game: unknown key \"" + key + "\"");

  GraphSpec graph = load_graph_json(require_key(j, "graph", "game"));
  GameSpec spec;
  spec.dag = graph.dag;
  spec.agents = graph.agents;

  const auto& tables = require_key(j, "cost_tables", "game");
  if (!tables.is_array() || static_cast<int>(tables.size()) != spec.dag->edge_count())
    throw PreconditionError("game: \"cost_tables\" must list one table per edge");
  const int n = static_cast<int>(spec.agents.size());
  for (int e = 0; e < static_cast<int>(tables.size()); ++e) {
    const auto& t = tables[e];
    if (!t.is_array() || static_cast<int>(t.size()) != n + 1)
      throw PreconditionError("game: cost table for edge " + std::to_string(e) +
                              " needs n+1 = " + std::to_string(n + 1) + " entries");
    spec.cost_tables.push_back(t.get<std::vector<double>>());
  }

  const auto& c_max = require_key(j, "c_max", "game");
  if (!c_max.is_number()) throw PreconditionError("game: \"c_max\" must be a number");
  spec.c_max = c_max.get<double>();

  validate_game(spec);
  return spec;
}

nlohmann::json load_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw PreconditionError("cannot open " + path);
  try {
    return nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& err) {
    throw PreconditionError(path + ": " + err.what());
  }
}

void write_json_file(const std::string& path, const nlohmann::json& j) {
  std::ofstream out(path);
  if (!out) throw PreconditionError("cannot open " + path + " for writing");
  out << j.dump(2) << '\n';
}

std::string format_double(double v) {
  char buffer[32];
  std::snprintf(buffer, sizeof(buffer), "%.17g", v);
  return buffer;
}

std::string csv_header() {
  return "t,agent_id,realized_cost,cum_regret,mu,gamma,nash_gap,expected_potential";
}

std::string csv_row(const RoundRow& row) {
  std::string out = std::to_string(row.t);
  out += ',';
  out += std::to_string(row.agent);
  out += ',';
  out += format_double(row.realized_cost);
  out += ',';
  out += format_double(row.cum_regret);
  out += ',';
  out += format_double(row.mu);
  out += ',';
  out += format_double(row.gamma);
  out += ',';
  if (row.nash_gap) out += format_double(*row.nash_gap);
  out += ',';
  if (row.expected_potential) out += format_double(*row.expected_potential);
  return out;
}

}  // namespace bgdce
