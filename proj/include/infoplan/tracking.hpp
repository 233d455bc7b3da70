#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>

#include "infoplan/game.hpp"
#include "infoplan/particle.hpp"

namespace infoplan {
namespace tracking {

enum class Strategy { kJsfp, kOptimal, kLocalGreedy, kSequentialGreedy, kRandom };

Strategy strategy_by_name(const std::string& name);
std::string strategy_name(Strategy s);

struct TrackingConfig {
  particle::Region2d region;            // 40 m x 40 m
  int num_uavs = 3;
  Eigen::Vector2d initial_position{5.0, 5.0};
  int headings = 12;                    // equally spaced; 12 at 30 deg (8 at 45 deg via config)
  double step_length = 2.0;             // meters per step (working default)
  Eigen::Vector2d target{25.0, 28.0};   // stationary truth (working default)
  int horizon = 20;
  Strategy strategy = Strategy::kJsfp;
  double alpha_bar = 0.3;
  int particles = 1000;
  double noise_sigma = 0.5;             // meters (working default)
  particle::QuadratureSpec quadrature;
  /// Audit mode: motion is random-walk, but every step the planning problem
  /// is solved for optimal/jsfp/local/sequential and the gap recorded.
  bool audit = false;
  int jsfp_max_stages = 200;
};

struct PlanResult {
  std::vector<int> heading_choice;       // per UAV, index into its candidate list
  std::vector<Eigen::Vector2d> targets;  // chosen next positions
  double mi = 0.0;                       // potential of the chosen joint action
  int jsfp_stages = 0;
  long jsfp_evaluations = 0;
  bool jsfp_converged = true;
};

/// Builds the per-step sensing game (candidate next positions as actions,
/// particle engine over the current posterior) and runs the named strategy.
/// Out-of-region candidates are dropped from the action set.
PlanResult plan_step(const TrackingConfig& cfg, const particle::ParticleSet& particles,
                     const std::vector<Eigen::Vector2d>& uav_positions, Strategy strategy,
                     std::uint64_t seed);

struct StepRecord {
  int step = 0;
  std::vector<Eigen::Vector2d> positions;  // after the move
  std::vector<double> headings_deg;
  std::vector<double> measured_ranges;
  double chosen_mi = 0.0;
  std::optional<double> optimal_mi;  // audit mode
  std::optional<double> gap;
  int jsfp_stages = 0;
  long jsfp_evaluations = 0;
};

struct EpisodeTrace {
  std::vector<StepRecord> steps;
};

/// plan -> move -> measure -> filter update, for cfg.horizon steps.
/// Deterministic per seed.
EpisodeTrace run_episode(const TrackingConfig& cfg, std::uint64_t seed);

/// CSV columns: step,uav,x,y,heading,measured_range,chosen_mi,optimal_mi,gap,
/// jsfp_stages,jsfp_evals (empty fields where not audited).
void write_episode_csv(std::ostream& os, const EpisodeTrace& trace);

}  // namespace tracking
}  // namespace infoplan
