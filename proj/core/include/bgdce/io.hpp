#pragma once

#include <memory>
#include <nlohmann/json.hpp>
#include <string>
#include <utility>
#include <vector>

#include "bgdce/game.hpp"
#include "bgdce/graph.hpp"

namespace bgdce {

// {"nodes": N, "edges": [[u,v], ...], "agents": [{"s": id, "t": id}, ...]}
struct GraphSpec {
  std::shared_ptr<const Dag> dag;
  std::vector<std::pair<int, int>> agents;
};

GraphSpec load_graph_json(const nlohmann::json& j);
nlohmann::json graph_to_json(const Dag& dag, const std::vector<std::pair<int, int>>& agents);

// Graph plus "cost_tables" (per edge, n+1 entries each) and "c_max".
GameSpec load_game_json(const nlohmann::json& j);

nlohmann::json load_json_file(const std::string& path);
void write_json_file(const std::string& path, const nlohmann::json& j);

// %.17g, so parsed doubles round-trip exactly.
std::string format_double(double v);

std::string csv_header();
std::string csv_row(const RoundRow& row);

}  // namespace bgdce
