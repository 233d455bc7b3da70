#pragma once

#include <iosfwd>
#include <string>

#include "infoplan/config.hpp"

namespace infoplan {

inline constexpr const char* kToolVersion = "infoplan 1.0.0";

/// Executes every (strategy, seed) cell of the configured run and writes
/// per-cell trace CSVs, a summary.csv, and a manifest.json into out_dir
/// (cfg.output_dir when out_dir is empty). Outputs are byte-identical across
/// reruns of the same configuration. jobs > 1 parallelizes across seeds.
void run_solve(const RunConfig& cfg, const std::string& out_dir, int jobs);

/// Rebuilds the configured game for one seed and checks a joint action for
/// Nash equilibrium (largest unilateral local-utility gain <= 1e-9). With a
/// trace file the audited action is the last stage recorded there; without
/// one the game is re-solved with JSFP first. Game scenarios only.
void run_audit(const RunConfig& cfg, std::uint64_t seed, const std::string& trace_path,
               std::ostream& os);

/// Reads the joint action of the last stage of a solve-trace CSV
/// (stage,agent,chosen_action,... with '|'-joined catalog indices).
JointAction last_joint_action_from_trace(const std::string& trace_path, int num_agents);

/// Builds the sensing game for a game scenario (synthetic-gaussian or
/// lorenz-targeting) for one seed. Shared by the runner and the test suites.
SensingGame build_game(const RunConfig& cfg, std::uint64_t seed);

}  // namespace infoplan
