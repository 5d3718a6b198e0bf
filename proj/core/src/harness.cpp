#include "bgdce/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <exception>
#include <filesystem>
#include <fstream>
#include <thread>

#include "bgdce/errors.hpp"
#include "bgdce/io.hpp"

namespace bgdce {
namespace {

constexpr std::uint64_t kAdversaryStream = 0x00adbeef;

const char* variant_name(ScheduleVariant v) {
  return v == ScheduleVariant::kNash ? "nash" : "regret";
}

struct Aggregate {
  double mean = 0.0;
  double std = 0.0;
};

Aggregate aggregate_of(const std::vector<double>& values) {
  Aggregate a;
  for (double v : values) a.mean += v;
  a.mean /= values.size();
  if (values.size() > 1) {
    double ss = 0.0;
    for (double v : values) ss += (v - a.mean) * (v - a.mean);
    a.std = std::sqrt(ss / (values.size() - 1));
  }
  return a;
}

nlohmann::json aggregate_json(const std::vector<double>& values) {
  Aggregate a = aggregate_of(values);
  return {{"mean", a.mean}, {"std", a.std}};
}

SeedStats run_adversary_seed(const GameRuntime& rt, const Schedule& schedule,
                             const ExperimentConfig& cfg, std::uint64_t seed,
                             const std::function<void(const RoundRow&)>& sink,
                             const std::function<void(std::int64_t)>& progress) {
  const AdversarySpec& adv = *cfg.adversary;
  Learner learner(rt.spanners[0], schedule, derive_seed(seed, 0));
  Rng adv_rng(derive_seed(seed, kAdversaryStream));

  const int m = rt.spec.edge_count();
  Eigen::VectorXd csum = Eigen::VectorXd::Zero(m);
  PathVec best_path = shortest_path(rt.graphs[0], csum).first;
  double cum_cost = 0.0, best_val = 0.0, cum_regret = 0.0;

  for (std::int64_t t = 1; t <= cfg.horizon; ++t) {
    ScheduleValues values = learner.current_schedule();
    Eigen::VectorXd c = adversary_costs(adv, t, learner.marginal(), adv_rng);
    const PathVec& path = learner.sample_strategy();
    double loss = path.cost_under(c);

    cum_cost += loss;
    csum += c;
    best_val += best_path.cost_under(c);
    if (cfg.exact_regret || t == cfg.horizon || (t & (t - 1)) == 0) {
      auto [p, val] = shortest_path(rt.graphs[0], csum);
      best_path = std::move(p);
      best_val = val;
    }
    cum_regret = cum_cost - best_val;

    if (sink)
      sink(RoundRow{t, 0, loss, cum_regret, values.mu, values.gamma,
                    std::nullopt, std::nullopt});
    learner.step(loss);
    if (progress) progress(t);
  }

  SeedStats stats;
  stats.final_regret = {cum_regret};
  return stats;
}

}  // namespace

Eigen::VectorXd adversary_costs(const AdversarySpec& adv, std::int64_t t,
                                const Eigen::VectorXd& marginal, Rng& rng) {
  if (t < 1) throw PreconditionError("round index must be at least 1");
  const int m = static_cast<int>(marginal.size());
  switch (adv.kind) {
    case AdversaryKind::kConstant:
    case AdversaryKind::kPeriodic: {
      if (adv.costs.empty())
        throw PreconditionError("scripted adversary has no cost vectors");
      const Eigen::VectorXd& c =
          adv.costs[static_cast<std::size_t>((t - 1) % adv.costs.size())];
      if (c.size() != m)
        throw PreconditionError("adversary cost vector has wrong dimension");
      return c;
    }
    case AdversaryKind::kUniformRandom: {
      Eigen::VectorXd c(m);
      for (int e = 0; e < m; ++e) c[e] = adv.c_max * rng.next_double();
      return c;
    }
    case AdversaryKind::kAdaptive: {
      int hi = 0;
      for (int e = 1; e < m; ++e)
        if (marginal[e] > marginal[hi]) hi = e;
      Eigen::VectorXd c = Eigen::VectorXd::Constant(m, adv.c_max / 2.0);
      c[hi] = adv.c_max;
      if (m > 1) {
        int lo = hi == 0 ? 1 : 0;
        for (int e = 0; e < m; ++e)
          if (e != hi && marginal[e] < marginal[lo]) lo = e;
        c[lo] = 0.0;
      }
      return c;
    }
  }
  throw InvariantError("unhandled adversary kind");
}

ExperimentConfig load_config(const nlohmann::json& j) {
  if (!j.is_object()) throw PreconditionError("config: expected an object");
  static const char* kKeys[] = {"game",        "variant",      "gamma_scale",
                                "mode",        "adversary",    "horizon",
                                "seeds",       "metric_stride", "gap_epsilon",
                                "exact_regret", "out_dir",      "workers",
                                "progress"};
  for (const auto& [key, value] : j.items()) {
    bool known = false;
    for (const char* k : kKeys) known = known || key == k;
    if (!known) throw PreconditionError("config: unknown key \"" + key + "\"");
  }
  if (!j.contains("game")) throw PreconditionError("config: missing key \"game\"");

  ExperimentConfig cfg;
  cfg.game = load_game_json(j.at("game"));
  const int m = cfg.game.edge_count();

  if (j.contains("variant")) {
    std::string v = j.at("variant").get<std::string>();
    if (v == "nash")
      cfg.variant = ScheduleVariant::kNash;
    else if (v == "regret")
      cfg.variant = ScheduleVariant::kRegret;
    else
      throw PreconditionError("config: variant must be \"nash\" or \"regret\", got \"" +
                              v + "\"");
  }
  if (j.contains("gamma_scale")) {
    cfg.gamma_scale = j.at("gamma_scale").get<double>();
    if (!(cfg.gamma_scale > 0.0))
      throw PreconditionError("config: \"gamma_scale\" must be positive");
  }
  if (j.contains("mode")) {
    std::string v = j.at("mode").get<std::string>();
    if (v == "self_play")
      cfg.mode = ExperimentMode::kSelfPlay;
    else if (v == "adversary")
      cfg.mode = ExperimentMode::kAdversary;
    else
      throw PreconditionError(
          "config: mode must be \"self_play\" or \"adversary\", got \"" + v + "\"");
  }

  if (j.contains("adversary")) {
    if (cfg.mode != ExperimentMode::kAdversary)
      throw PreconditionError(
          "config: \"adversary\" is only valid when mode is \"adversary\"");
    const auto& a = j.at("adversary");
    if (!a.is_object()) throw PreconditionError("config: \"adversary\" must be an object");
    for (const auto& [key, value] : a.items())
      if (key != "kind" && key != "costs")
        throw PreconditionError("config: unknown adversary key \"" + key + "\"");
    if (!a.contains("kind"))
      throw PreconditionError("config: adversary needs a \"kind\"");
    std::string kind = a.at("kind").get<std::string>();

    AdversarySpec adv;
    adv.c_max = cfg.game.c_max;
    bool scripted;
    if (kind == "constant") {
      adv.kind = AdversaryKind::kConstant;
      scripted = true;
    } else if (kind == "periodic") {
      adv.kind = AdversaryKind::kPeriodic;
      scripted = true;
    } else if (kind == "uniform_random") {
      adv.kind = AdversaryKind::kUniformRandom;
      scripted = false;
    } else if (kind == "adaptive") {
      adv.kind = AdversaryKind::kAdaptive;
      scripted = false;
    } else {
      throw PreconditionError("config: unknown adversary kind \"" + kind + "\"");
    }

    if (scripted) {
      if (!a.contains("costs") || !a.at("costs").is_array() || a.at("costs").empty())
        throw PreconditionError("config: adversary kind \"" + kind +
                                "\" needs a non-empty \"costs\" array");
      if (adv.kind == AdversaryKind::kConstant && a.at("costs").size() != 1)
        throw PreconditionError(
            "config: constant adversary takes exactly one cost vector");
      for (const auto& row : a.at("costs")) {
        std::vector<double> vals = row.get<std::vector<double>>();
        if (static_cast<int>(vals.size()) != m)
          throw PreconditionError("config: adversary cost vectors need one entry per "
                                  "edge (" + std::to_string(m) + ")");
        Eigen::VectorXd c(m);
        for (int e = 0; e < m; ++e) {
          if (vals[e] < 0.0 || vals[e] > adv.c_max)
            throw PreconditionError(
                "config: adversary costs must lie in [0, c_max]");
          c[e] = vals[e];
        }
        adv.costs.push_back(std::move(c));
      }
    } else if (a.contains("costs")) {
      throw PreconditionError("config: \"costs\" is only valid for constant and "
                              "periodic adversaries");
    }
    cfg.adversary = std::move(adv);
  }

  if (cfg.mode == ExperimentMode::kAdversary) {
    if (!cfg.adversary)
      throw PreconditionError("config: adversary mode needs an \"adversary\" object");
    if (cfg.game.agent_count() != 1)
      throw PreconditionError("config: adversary mode requires exactly one agent");
  }

  if (j.contains("horizon")) {
    cfg.horizon = j.at("horizon").get<std::int64_t>();
    if (cfg.horizon < 1) throw PreconditionError("config: \"horizon\" must be >= 1");
  }
  if (j.contains("seeds")) {
    cfg.seeds = j.at("seeds").get<std::vector<std::uint64_t>>();
    if (cfg.seeds.empty())
      throw PreconditionError("config: \"seeds\" must be non-empty");
    std::vector<std::uint64_t> sorted = cfg.seeds;
    std::sort(sorted.begin(), sorted.end());
    if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
      throw PreconditionError("config: \"seeds\" contains duplicates");
  }
  if (j.contains("metric_stride")) {
    cfg.metric_stride = j.at("metric_stride").get<int>();
    if (cfg.metric_stride < 1)
      throw PreconditionError("config: \"metric_stride\" must be >= 1");
  }
  if (j.contains("gap_epsilon")) {
    cfg.gap_epsilon = j.at("gap_epsilon").get<double>();
    if (!(cfg.gap_epsilon > 0.0))
      throw PreconditionError("config: \"gap_epsilon\" must be positive");
  }
  if (j.contains("exact_regret")) cfg.exact_regret = j.at("exact_regret").get<bool>();
  if (j.contains("out_dir")) cfg.out_dir = j.at("out_dir").get<std::string>();
  if (j.contains("workers")) {
    cfg.workers = j.at("workers").get<int>();
    if (cfg.workers < 0) throw PreconditionError("config: \"workers\" must be >= 0");
  }
  if (j.contains("progress")) cfg.progress = j.at("progress").get<bool>();
  return cfg;
}

ExperimentConfig load_config_file(const std::string& path) {
  return load_config(load_json_file(path));
}

nlohmann::json run_experiment(const ExperimentConfig& cfg, const std::string& out_dir) {
  const GameRuntime rt = build_runtime(cfg.game);
  const Schedule schedule = make_schedule(cfg.game, cfg.variant, cfg.gamma_scale);
  const bool self_play = cfg.mode == ExperimentMode::kSelfPlay;
  const std::size_t seed_count = cfg.seeds.size();

  std::filesystem::create_directories(out_dir);

  const std::int64_t total_rounds =
      cfg.horizon * static_cast<std::int64_t>(seed_count);
  std::atomic<std::int64_t> rounds_done{0};
  auto report_progress = [&](std::int64_t) {
    std::int64_t done = rounds_done.fetch_add(1) + 1;
    std::int64_t prev = (done - 1) * 100 / total_rounds;
    std::int64_t now = done * 100 / total_rounds;
    if (now != prev) std::fprintf(stderr, "progress %d%%\n", static_cast<int>(now));
  };

  std::vector<SeedStats> stats(seed_count);
  std::vector<std::string> seed_error(seed_count);
  std::vector<char> seed_failed(seed_count, 0);
  std::atomic<std::size_t> next_seed{0};

  auto worker = [&]() {
    for (;;) {
      std::size_t idx = next_seed.fetch_add(1);
      if (idx >= seed_count) return;
      std::uint64_t seed = cfg.seeds[idx];
      try {
        std::ofstream out(out_dir + "/seed_" + std::to_string(seed) + ".csv");
        if (!out)
          throw PreconditionError("cannot write seed CSV under " + out_dir);
        out << csv_header() << '\n';
        auto sink = [&out](const RoundRow& row) { out << csv_row(row) << '\n'; };
        std::function<void(std::int64_t)> progress;
        if (cfg.progress) progress = report_progress;

        if (self_play) {
          DynamicsConfig dcfg;
          dcfg.horizon = cfg.horizon;
          dcfg.seed = seed;
          dcfg.metric_stride = cfg.metric_stride;
          dcfg.gap_epsilon = cfg.gap_epsilon;
          dcfg.exact_regret = cfg.exact_regret;
          dcfg.sink = sink;
          dcfg.progress = progress;
          stats[idx] = run_dynamics(rt, schedule, dcfg);
        } else {
          stats[idx] = run_adversary_seed(rt, schedule, cfg, seed, sink, progress);
        }
      } catch (const std::exception& e) {
        seed_failed[idx] = 1;
        seed_error[idx] = e.what();
      } catch (...) {
        seed_failed[idx] = 1;
        seed_error[idx] = "unknown error";
      }
    }
  };

  unsigned hw = std::thread::hardware_concurrency();
  std::size_t pool = cfg.workers > 0 ? static_cast<std::size_t>(cfg.workers)
                                     : std::max(1u, hw);
  pool = std::min(pool, seed_count);
  if (pool <= 1) {
    worker();
  } else {
    std::vector<std::thread> threads;
    threads.reserve(pool);
    for (std::size_t i = 0; i < pool; ++i) threads.emplace_back(worker);
    for (auto& th : threads) th.join();
  }

  const int n = cfg.game.agent_count();
  std::vector<std::size_t> ok;
  nlohmann::json per_seed = nlohmann::json::array();
  for (std::size_t idx = 0; idx < seed_count; ++idx) {
    if (seed_failed[idx]) {
      per_seed.push_back({{"seed", cfg.seeds[idx]}, {"error", seed_error[idx]}});
      continue;
    }
    ok.push_back(idx);
    const SeedStats& s = stats[idx];
    nlohmann::json row = {{"seed", cfg.seeds[idx]}, {"final_regret", s.final_regret}};
    if (self_play) {
      row["final_gap"] = s.final_gap;
      row["time_avg_gap"] = s.time_avg_gap;
      row["frac_gap_below_eps"] = s.frac_gap_below_eps;
      row["gap_first_decile_mean"] = s.gap_first_decile_mean;
      row["gap_last_decile_mean"] = s.gap_last_decile_mean;
      row["frac_gap_below_eps_last_half"] = s.frac_gap_below_eps_last_half;
    }
    per_seed.push_back(std::move(row));
  }

  nlohmann::json aggregate;
  if (!ok.empty()) {
    nlohmann::json means = nlohmann::json::array();
    nlohmann::json stds = nlohmann::json::array();
    std::vector<double> column(ok.size());
    for (int i = 0; i < n; ++i) {
      for (std::size_t k = 0; k < ok.size(); ++k)
        column[k] = stats[ok[k]].final_regret[i];
      Aggregate a = aggregate_of(column);
      means.push_back(a.mean);
      stds.push_back(a.std);
    }
    aggregate["final_regret"] = {{"mean", std::move(means)}, {"std", std::move(stds)}};
    if (self_play) {
      auto column_of = [&](double SeedStats::*field) {
        std::vector<double> vals(ok.size());
        for (std::size_t k = 0; k < ok.size(); ++k) vals[k] = stats[ok[k]].*field;
        return vals;
      };
      aggregate["final_gap"] = aggregate_json(column_of(&SeedStats::final_gap));
      aggregate["time_avg_gap"] = aggregate_json(column_of(&SeedStats::time_avg_gap));
      aggregate["frac_gap_below_eps"] =
          aggregate_json(column_of(&SeedStats::frac_gap_below_eps));
      aggregate["gap_first_decile_mean"] =
          aggregate_json(column_of(&SeedStats::gap_first_decile_mean));
      aggregate["gap_last_decile_mean"] =
          aggregate_json(column_of(&SeedStats::gap_last_decile_mean));
      aggregate["frac_gap_below_eps_last_half"] =
          aggregate_json(column_of(&SeedStats::frac_gap_below_eps_last_half));
    }
  }

  nlohmann::json summary = {
      {"mode", self_play ? "self_play" : "adversary"},
      {"variant", variant_name(cfg.variant)},
      {"horizon", cfg.horizon},
      {"agents", n},
      {"edges", cfg.game.edge_count()},
      {"gamma_scale", cfg.gamma_scale},
      {"gap_epsilon", cfg.gap_epsilon},
      {"metric_stride", cfg.metric_stride},
      {"exact_regret", cfg.exact_regret},
      {"seeds", cfg.seeds},
      {"failed_seeds", seed_count - ok.size()},
      {"per_seed", std::move(per_seed)},
      {"aggregate", std::move(aggregate)},
  };
  write_json_file(out_dir + "/summary.json", summary);
  return summary;
}

}  // namespace bgdce
