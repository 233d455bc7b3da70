#include "infoplan/runner.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <numeric>
#include <ostream>
#include <random>
#include <sstream>
#include <thread>

#include "infoplan/matrix_io.hpp"
#include "json.hpp"

namespace infoplan {

namespace {

namespace fs = std::filesystem;

struct CellResult {
  std::string strategy;
  std::uint64_t seed = 0;
  double objective = 0.0;
  int stages = 0;
  long evaluations = 0;
  bool converged = true;
  std::string trace_file;  // empty when the strategy has no trace
};

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void write_summary_csv(std::ostream& os, const std::vector<CellResult>& rows) {
  os << "strategy,seed,objective,stages,evaluations,converged\n";
  for (const auto& r : rows)
    os << r.strategy << ',' << r.seed << ',' << fmt(r.objective) << ',' << r.stages << ','
       << r.evaluations << ',' << (r.converged ? 1 : 0) << '\n';
}

CellResult run_game_strategy(const RunConfig& cfg, const SensingGame& game,
                             const std::string& strategy, std::uint64_t seed,
                             const std::string& out_dir) {
  CellResult r;
  r.strategy = strategy;
  r.seed = seed;
  const SolveTrace* trace = nullptr;
  SolveTrace owned;

  if (strategy == "jsfp" || strategy == "jsfp-noinertia") {
    JsfpOptions opts;
    opts.alpha_bar = strategy == "jsfp-noinertia" ? 1.0 : cfg.alpha_bar;
    opts.seed = seed;
    opts.max_stages = cfg.max_stages;
    JsfpResult res = solve_jsfp(game, opts);
    r.objective = game.potential(res.joint);
    r.stages = res.stages;
    r.evaluations = res.mi_evaluations;
    r.converged = res.converged;
    owned = std::move(res.trace);
    trace = &owned;
  } else if (strategy == "iterative") {
    IterativeGreedyResult res = solve_iterative_greedy(game, cfg.max_stages);
    r.objective = game.potential(res.joint);
    r.stages = static_cast<int>(res.trace.stages.size());
    r.evaluations = res.trace.total_evaluations;
    r.converged = res.converged;
    owned = std::move(res.trace);
    trace = &owned;
  } else if (strategy == "optimal") {
    JointAction joint = solve_optimal(game, cfg.enumeration_budget);
    r.objective = game.potential(joint);
  } else if (strategy == "local") {
    JointAction joint = solve_local_greedy(game);
    r.objective = game.potential(joint);
  } else if (strategy == "sequential") {
    std::vector<int> perm(game.num_agents());
    std::iota(perm.begin(), perm.end(), 0);
    JointAction joint = solve_sequential_greedy(game, perm);
    r.objective = game.potential(joint);
  } else if (strategy == "random") {
    std::mt19937_64 rng(seed);
    std::vector<int> ids(game.num_agents());
    for (int i = 0; i < game.num_agents(); ++i) {
      std::uniform_int_distribution<int> pick(0, static_cast<int>(game.actions(i).size()) - 1);
      ids[i] = pick(rng);
    }
    r.objective = game.potential(game.joint_from_ids(ids));
  } else {
    throw ConfigError("strategy '" + strategy + "' is not valid here");
  }

  if (trace) {
    r.trace_file = "trace_" + strategy + "_" + std::to_string(seed) + ".csv";
    std::ofstream os(fs::path(out_dir) / r.trace_file);
    write_solve_trace_csv(os, game, *trace);
  }
  return r;
}

CellResult run_tracking_strategy(const RunConfig& cfg, const std::string& strategy,
                                 std::uint64_t seed, const std::string& out_dir) {
  tracking::TrackingConfig tc = cfg.track;
  tc.audit = strategy == "audit";
  if (!tc.audit) tc.strategy = tracking::strategy_by_name(strategy);
  tracking::EpisodeTrace trace = tracking::run_episode(tc, seed);

  CellResult r;
  r.strategy = strategy;
  r.seed = seed;
  double mi = 0.0;
  long stages = 0, evals = 0;
  for (const auto& s : trace.steps) {
    mi += s.chosen_mi;
    stages += s.jsfp_stages;
    evals += s.jsfp_evaluations;
  }
  const double n = trace.steps.empty() ? 1.0 : static_cast<double>(trace.steps.size());
  r.objective = mi / n;  // mean per-step planned MI
  r.stages = static_cast<int>(std::lround(stages / n));
  r.evaluations = static_cast<long>(std::lround(evals / n));

  r.trace_file = "episode_" + strategy + "_" + std::to_string(seed) + ".csv";
  std::ofstream os(fs::path(out_dir) / r.trace_file);
  tracking::write_episode_csv(os, trace);
  return r;
}

}  // namespace

SensingGame build_game(const RunConfig& cfg, std::uint64_t seed) {
  if (cfg.scenario == "synthetic-gaussian") return synthetic::make_game(cfg.synth, seed);
  if (cfg.scenario == "lorenz-targeting") {
    auto [scenario, jg] = lorenz95::build_targeting_scenario(cfg.lorenz, seed);
    auto engine = std::make_shared<GaussianEngine>(std::move(jg));
    return SensingGame(engine, scenario.agent_regions,
                       std::vector<int>(scenario.agent_regions.size(), cfg.lorenz_cardinality));
  }
  throw ConfigError("scenario '" + cfg.scenario + "' is not a game scenario");
}

void run_solve(const RunConfig& cfg, const std::string& out_dir_arg, int jobs) {
  const std::string out_dir = out_dir_arg.empty() ? cfg.output_dir : out_dir_arg;
  fs::create_directories(out_dir);
  if (jobs < 1) jobs = 1;

  const std::size_t n_seeds = cfg.seeds.size();
  const std::size_t n_strats = cfg.strategies.size();
  std::vector<CellResult> rows(n_seeds * n_strats);
  std::vector<std::string> extra_outputs(n_seeds);

  // One unit of work per seed: the game / scenario build is shared by all
  // strategies and, for engines with memo caches, so are the MI evaluations.
  auto run_seed = [&](std::size_t si) {
    const std::uint64_t seed = cfg.seeds[si];
    if (cfg.scenario == "tracking") {
      for (std::size_t ki = 0; ki < n_strats; ++ki)
        rows[si * n_strats + ki] = run_tracking_strategy(cfg, cfg.strategies[ki], seed, out_dir);
      return;
    }
    SensingGame game = build_game(cfg, seed);
    if (cfg.scenario == "lorenz-targeting") {
      const auto& engine = dynamic_cast<const GaussianEngine&>(game.engine());
      std::string name = "model_" + std::to_string(seed) + ".cov";
      save_joint_gaussian((fs::path(out_dir) / name).string(), engine.model());
      extra_outputs[si] = name;
    }
    for (std::size_t ki = 0; ki < n_strats; ++ki)
      rows[si * n_strats + ki] = run_game_strategy(cfg, game, cfg.strategies[ki], seed, out_dir);
  };

  if (jobs == 1 || n_seeds == 1) {
    for (std::size_t si = 0; si < n_seeds; ++si) run_seed(si);
  } else {
    std::atomic<std::size_t> next{0};
    std::exception_ptr first_error;
    std::mutex err_mutex;
    auto worker = [&] {
      for (;;) {
        std::size_t si = next.fetch_add(1);
        if (si >= n_seeds) return;
        try {
          run_seed(si);
        } catch (...) {
          std::lock_guard<std::mutex> lk(err_mutex);
          if (!first_error) first_error = std::current_exception();
        }
      }
    };
    std::vector<std::thread> pool;
    for (int t = 0; t < std::min<int>(jobs, static_cast<int>(n_seeds)); ++t)
      pool.emplace_back(worker);
    for (auto& t : pool) t.join();
    if (first_error) std::rethrow_exception(first_error);
  }

  {
    std::ofstream os(fs::path(out_dir) / "summary.csv");
    write_summary_csv(os, rows);
  }

  nlohmann::json manifest;
  char hash[32];
  std::snprintf(hash, sizeof hash, "%016llx",
                static_cast<unsigned long long>(fnv1a64(cfg.canonical)));
  manifest["tool_version"] = kToolVersion;
  manifest["schema_version"] = cfg.schema_version;
  manifest["scenario"] = cfg.scenario;
  manifest["config_hash"] = hash;
  manifest["seeds"] = cfg.seeds;
  manifest["strategies"] = cfg.strategies;
  std::vector<std::string> outputs = {"summary.csv"};
  for (const auto& e : extra_outputs)
    if (!e.empty()) outputs.push_back(e);
  for (const auto& r : rows)
    if (!r.trace_file.empty()) outputs.push_back(r.trace_file);
  manifest["outputs"] = outputs;
  std::ofstream mos(fs::path(out_dir) / "manifest.json");
  mos << manifest.dump(2) << '\n';
}

JointAction last_joint_action_from_trace(const std::string& trace_path, int num_agents) {
  std::ifstream is(trace_path);
  if (!is) throw ArgumentError("cannot open trace file '" + trace_path + "'");
  std::string line;
  std::getline(is, line);  // header
  int last_stage = -1;
  std::vector<std::string> chosen(num_agents);
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string stage_s, agent_s, action_s;
    std::getline(ss, stage_s, ',');
    std::getline(ss, agent_s, ',');
    std::getline(ss, action_s, ',');
    int stage = std::stoi(stage_s);
    int agent = std::stoi(agent_s);
    if (agent < 0 || agent >= num_agents)
      throw ArgumentError("trace agent id " + agent_s + " out of range");
    if (stage > last_stage) last_stage = stage;
    if (stage == last_stage) chosen[agent] = action_s;
  }
  if (last_stage < 0) throw ArgumentError("trace file '" + trace_path + "' has no stages");
  JointAction joint;
  for (int i = 0; i < num_agents; ++i) {
    Action a;
    a.agent = i;
    std::stringstream ss(chosen[i]);
    std::string tok;
    while (std::getline(ss, tok, '|')) a.points.push_back(std::stoull(tok));
    joint.actions.push_back(std::move(a));
  }
  return joint;
}

void run_audit(const RunConfig& cfg, std::uint64_t seed, const std::string& trace_path,
               std::ostream& os) {
  SensingGame game = build_game(cfg, seed);
  JointAction joint;
  std::string how;
  if (!trace_path.empty()) {
    joint = last_joint_action_from_trace(trace_path, game.num_agents());
    game.validate_joint(joint);
    how = "trace";
  } else {
    JsfpOptions opts;
    opts.alpha_bar = cfg.alpha_bar;
    opts.seed = seed;
    opts.max_stages = cfg.max_stages;
    JsfpResult res = solve_jsfp(game, opts);
    joint = res.joint;
    how = res.converged ? "jsfp (converged)" : "jsfp (not converged)";
  }
  auto [is_ne, gain] = audit_nash(game, joint);
  os << "seed " << seed << " [" << how << "]: potential " << fmt(game.potential(joint))
     << ", nash " << (is_ne ? "yes" : "no") << ", max unilateral gain " << fmt(gain) << '\n';
}

}  // namespace infoplan
