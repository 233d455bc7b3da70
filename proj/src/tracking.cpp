#include "infoplan/tracking.hpp"

#include <cmath>
#include <cstdio>
#include <memory>
#include <ostream>
#include <random>

namespace infoplan {
namespace tracking {

Strategy strategy_by_name(const std::string& name) {
  if (name == "jsfp") return Strategy::kJsfp;
  if (name == "optimal") return Strategy::kOptimal;
  if (name == "local") return Strategy::kLocalGreedy;
  if (name == "sequential") return Strategy::kSequentialGreedy;
  if (name == "random") return Strategy::kRandom;
  throw ArgumentError("unknown strategy '" + name + "'");
}

std::string strategy_name(Strategy s) {
  switch (s) {
    case Strategy::kJsfp: return "jsfp";
    case Strategy::kOptimal: return "optimal";
    case Strategy::kLocalGreedy: return "local";
    case Strategy::kSequentialGreedy: return "sequential";
    case Strategy::kRandom: return "random";
  }
  return "?";
}

namespace {

struct CandidateSet {
  std::vector<Eigen::Vector2d> positions;  // per agent, concatenated
  std::vector<int> tags;
  std::vector<std::vector<int>> heading_of;       // per agent: candidate -> heading index
  std::vector<std::vector<Eigen::Vector2d>> per_agent;
};

CandidateSet candidate_moves(const TrackingConfig& cfg,
                             const std::vector<Eigen::Vector2d>& uav_positions) {
  CandidateSet cs;
  cs.heading_of.resize(uav_positions.size());
  cs.per_agent.resize(uav_positions.size());
  for (std::size_t i = 0; i < uav_positions.size(); ++i) {
    for (int h = 0; h < cfg.headings; ++h) {
      double th = 2.0 * M_PI * h / cfg.headings;
      Eigen::Vector2d cand = uav_positions[i] + cfg.step_length * Eigen::Vector2d(std::cos(th), std::sin(th));
      if (!cfg.region.contains(cand)) continue;
      cs.positions.push_back(cand);
      cs.tags.push_back(static_cast<int>(i));
      cs.heading_of[i].push_back(h);
      cs.per_agent[i].push_back(cand);
    }
    if (cs.per_agent[i].empty()) {  // hold position (cannot happen in a convex region)
      cs.positions.push_back(uav_positions[i]);
      cs.tags.push_back(static_cast<int>(i));
      cs.heading_of[i].push_back(-1);
      cs.per_agent[i].push_back(uav_positions[i]);
    }
  }
  return cs;
}

SensingGame make_game(const TrackingConfig& cfg, const particle::ParticleSet& ps,
                      const CandidateSet& cs) {
  particle::RangeSensorModel model{std::make_shared<particle::GaussianNoise>(cfg.noise_sigma)};
  auto engine = std::make_shared<particle::ParticleEngine>(ps, model, cs.positions, cs.tags,
                                                           cfg.quadrature);
  std::vector<IndexSet> regions;
  for (std::size_t i = 0; i < cs.per_agent.size(); ++i)
    regions.push_back(engine->catalog().region(static_cast<int>(i)));
  return SensingGame(engine, regions, std::vector<int>(cs.per_agent.size(), 1));
}

}  // namespace

namespace {

PlanResult run_strategy(const TrackingConfig& cfg, const SensingGame& game, const CandidateSet& cs,
                        Strategy strategy, std::uint64_t seed) {
  const int n = game.num_agents();
  PlanResult out;
  std::vector<int> ids(n, 0);
  switch (strategy) {
    case Strategy::kJsfp: {
      JsfpOptions opts;
      opts.alpha_bar = cfg.alpha_bar;
      opts.seed = seed;
      opts.max_stages = cfg.jsfp_max_stages;
      JsfpResult res = solve_jsfp(game, opts);
      for (int i = 0; i < n; ++i) {
        const auto& acts = game.actions(i);
        for (std::size_t a = 0; a < acts.size(); ++a)
          if (acts[a].points == res.joint.actions[i].points) ids[i] = static_cast<int>(a);
      }
      out.jsfp_stages = res.stages;
      out.jsfp_evaluations = res.mi_evaluations;
      out.jsfp_converged = res.converged;
      break;
    }
    case Strategy::kOptimal:
    case Strategy::kLocalGreedy:
    case Strategy::kSequentialGreedy: {
      JointAction joint;
      if (strategy == Strategy::kOptimal) joint = solve_optimal(game);
      else if (strategy == Strategy::kLocalGreedy) joint = solve_local_greedy(game);
      else {
        std::vector<int> perm(n);
        for (int i = 0; i < n; ++i) perm[i] = i;
        joint = solve_sequential_greedy(game, perm);
      }
      for (int i = 0; i < n; ++i) {
        const auto& acts = game.actions(i);
        for (std::size_t a = 0; a < acts.size(); ++a)
          if (acts[a].points == joint.actions[i].points) ids[i] = static_cast<int>(a);
      }
      break;
    }
    case Strategy::kRandom: {
      std::mt19937_64 rng(seed);
      for (int i = 0; i < n; ++i) {
        std::uniform_int_distribution<int> pick(0, static_cast<int>(game.actions(i).size()) - 1);
        ids[i] = pick(rng);
      }
      break;
    }
  }

  out.heading_choice = ids;
  for (int i = 0; i < n; ++i) out.targets.push_back(cs.per_agent[i][ids[i]]);
  out.mi = game.potential(game.joint_from_ids(ids));
  return out;
}

}  // namespace

PlanResult plan_step(const TrackingConfig& cfg, const particle::ParticleSet& particles,
                     const std::vector<Eigen::Vector2d>& uav_positions, Strategy strategy,
                     std::uint64_t seed) {
  CandidateSet cs = candidate_moves(cfg, uav_positions);
  SensingGame game = make_game(cfg, particles, cs);
  return run_strategy(cfg, game, cs, strategy, seed);
}

EpisodeTrace run_episode(const TrackingConfig& cfg, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  particle::ParticleSet ps = particle::uniform_particles(cfg.region, cfg.particles, rng);
  particle::RangeSensorModel model{std::make_shared<particle::GaussianNoise>(cfg.noise_sigma)};
  std::normal_distribution<double> noise(0.0, cfg.noise_sigma);

  std::vector<Eigen::Vector2d> positions(cfg.num_uavs, cfg.initial_position);
  EpisodeTrace trace;

  for (int step = 1; step <= cfg.horizon; ++step) {
    std::uint64_t plan_seed = rng();
    CandidateSet cs = candidate_moves(cfg, positions);
    SensingGame game = make_game(cfg, ps, cs);

    Strategy motion = cfg.audit ? Strategy::kRandom : cfg.strategy;
    PlanResult plan = run_strategy(cfg, game, cs, motion, plan_seed);

    StepRecord rec;
    rec.step = step;
    rec.chosen_mi = plan.mi;
    rec.jsfp_stages = plan.jsfp_stages;
    rec.jsfp_evaluations = plan.jsfp_evaluations;
    if (cfg.audit) {
      // one game, one shared engine cache for the whole per-step comparison
      PlanResult best = run_strategy(cfg, game, cs, Strategy::kOptimal, plan_seed);
      PlanResult jsfp = run_strategy(cfg, game, cs, Strategy::kJsfp, plan_seed);
      rec.optimal_mi = best.mi;
      rec.gap = best.mi - jsfp.mi;
      rec.jsfp_stages = jsfp.jsfp_stages;
      rec.jsfp_evaluations = jsfp.jsfp_evaluations;
    }

    for (int i = 0; i < cfg.num_uavs; ++i) {
      int h = cs.heading_of[i][plan.heading_choice[i]];
      rec.headings_deg.push_back(h >= 0 ? 360.0 * h / cfg.headings : -1.0);
    }
    positions = plan.targets;
    rec.positions = positions;

    std::vector<double> ranges;
    for (int i = 0; i < cfg.num_uavs; ++i)
      ranges.push_back((positions[i] - cfg.target).norm() + noise(rng));
    rec.measured_ranges = ranges;

    ps = particle::pf_update(ps, model, positions, ranges, rng, &cfg.region);
    trace.steps.push_back(std::move(rec));
  }
  return trace;
}

void write_episode_csv(std::ostream& os, const EpisodeTrace& trace) {
  os << "step,uav,x,y,heading,measured_range,chosen_mi,optimal_mi,gap,jsfp_stages,jsfp_evals\n";
  char buf[256];
  for (const auto& rec : trace.steps) {
    for (std::size_t i = 0; i < rec.positions.size(); ++i) {
      std::snprintf(buf, sizeof buf, "%d,%zu,%.17g,%.17g,%.17g,%.17g,%.17g,", rec.step, i,
                    rec.positions[i].x(), rec.positions[i].y(), rec.headings_deg[i],
                    rec.measured_ranges[i], rec.chosen_mi);
      os << buf;
      if (rec.optimal_mi) {
        std::snprintf(buf, sizeof buf, "%.17g,%.17g,", *rec.optimal_mi, *rec.gap);
        os << buf;
      } else {
        os << ",,";
      }
      os << rec.jsfp_stages << ',' << rec.jsfp_evaluations << '\n';
    }
  }
}

}  // namespace tracking
}  // namespace infoplan
