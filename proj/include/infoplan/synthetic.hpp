#pragma once

#include <cstdint>
#include <memory>

#include "infoplan/game.hpp"
#include "infoplan/gaussian.hpp"

namespace infoplan {
namespace synthetic {

/// Random synthetic Gaussian game family. Correlations come from a random
/// Gram factor of rank roughly rank_fraction * dimension; smaller fractions
/// give stronger cross-agent coupling.
struct SyntheticSpec {
  int num_agents = 2;
  int min_actions = 3;
  int max_actions = 6;
  int cardinality = 1;          // n_i, same for all agents
  int verification_vars = 2;
  bool verification_is_state = false;  // V = X instances (submodular regime)
  double rank_fraction = 0.5;
  double noise_frac = 0.05;     // R_s relative to unit variances
};

JointGaussian random_joint_gaussian(const SyntheticSpec& spec, std::uint64_t seed);

SensingGame make_game(const SyntheticSpec& spec, std::uint64_t seed);

SensingGame make_game(std::shared_ptr<const GaussianEngine> engine, int cardinality = 1);

}  // namespace synthetic
}  // namespace infoplan
