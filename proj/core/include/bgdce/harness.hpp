#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <nlohmann/json.hpp>
#include <optional>
#include <string>
#include <vector>

#include "bgdce/game.hpp"
#include "bgdce/random.hpp"

namespace bgdce {

enum class AdversaryKind { kConstant, kPeriodic, kUniformRandom, kAdaptive };

struct AdversarySpec {
  AdversaryKind kind = AdversaryKind::kConstant;
  // kConstant uses costs[0]; kPeriodic cycles through costs.
  std::vector<Eigen::VectorXd> costs;
  double c_max = 1.0;
};

// Cost vector for round t. The adaptive script reads the learner's current
// marginal: c_max on the most likely edge, 0 on the least likely one,
// c_max/2 elsewhere (ties toward the lower edge index).
Eigen::VectorXd adversary_costs(const AdversarySpec& adv, std::int64_t t,
                                const Eigen::VectorXd& marginal, Rng& rng);

enum class ExperimentMode { kSelfPlay, kAdversary };

struct ExperimentConfig {
  GameSpec game;
  ScheduleVariant variant = ScheduleVariant::kNash;
  double gamma_scale = 1.0;
  ExperimentMode mode = ExperimentMode::kSelfPlay;
  std::optional<AdversarySpec> adversary;
  std::int64_t horizon = 1000;
  std::vector<std::uint64_t> seeds = {1};
  int metric_stride = 100;
  double gap_epsilon = 0.25;
  bool exact_regret = false;
  std::string out_dir = "results";
  int workers = 0;  // 0 = hardware concurrency
  bool progress = true;
};

ExperimentConfig load_config(const nlohmann::json& j);
ExperimentConfig load_config_file(const std::string& path);

// Runs every seed (parallel across worker threads), writes one
// seed_<seed>.csv per seed plus summary.json under out_dir, and returns the
// summary. Identical config and seed give byte-identical CSV output.
nlohmann::json run_experiment(const ExperimentConfig& cfg, const std::string& out_dir);

}  // namespace bgdce
