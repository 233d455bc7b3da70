#include "infoplan/synthetic.hpp"

#include <random>

namespace infoplan {
namespace synthetic {

JointGaussian random_joint_gaussian(const SyntheticSpec& spec, std::uint64_t seed) {
  if (spec.num_agents < 1) throw ArgumentError("synthetic: num_agents must be >= 1");
  if (spec.min_actions < 1 || spec.max_actions < spec.min_actions)
    throw ArgumentError("synthetic: need 1 <= min_actions <= max_actions");
  if (!spec.verification_is_state && spec.verification_vars < 1)
    throw ArgumentError("synthetic: verification_vars must be >= 1 unless V = X");

  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> region_size(spec.min_actions, spec.max_actions);

  std::vector<int> tags;
  for (int a = 0; a < spec.num_agents; ++a) {
    int sz = region_size(rng);
    // with cardinality k an agent needs at least k variables in its region
    if (sz < spec.cardinality) sz = spec.cardinality;
    tags.insert(tags.end(), sz, a);
  }
  const int verif = spec.verification_is_state ? 0 : spec.verification_vars;
  tags.insert(tags.end(), verif, -1);
  const int d = static_cast<int>(tags.size());

  const int rank = std::max(1, static_cast<int>(std::lround(spec.rank_fraction * d)));
  std::normal_distribution<double> gauss(0.0, 1.0);
  Eigen::MatrixXd g(d, rank);
  for (int r = 0; r < d; ++r)
    for (int c = 0; c < rank; ++c) g(r, c) = gauss(rng);

  Eigen::MatrixXd cov = g * g.transpose();
  cov.diagonal().array() += 0.05;  // keep full rank so conditioning stays stable
  Eigen::VectorXd inv_sd = cov.diagonal().array().sqrt().inverse();
  cov = inv_sd.asDiagonal() * cov * inv_sd.asDiagonal();
  cov = 0.5 * (cov + cov.transpose()).eval();

  JointGaussian jg;
  jg.catalog = VariableCatalog(std::move(tags));
  jg.mean = Eigen::VectorXd::Zero(d);
  jg.cov = std::move(cov);
  jg.noise.assign(d, spec.noise_frac);
  jg.verification_is_state = spec.verification_is_state;
  jg.validate();
  return jg;
}

SensingGame make_game(std::shared_ptr<const GaussianEngine> engine, int cardinality) {
  const VariableCatalog& cat = engine->catalog();
  std::vector<IndexSet> regions;
  for (int r = 0; r < cat.num_regions(); ++r) regions.push_back(cat.region(r));
  return SensingGame(engine, regions, std::vector<int>(regions.size(), cardinality));
}

SensingGame make_game(const SyntheticSpec& spec, std::uint64_t seed) {
  auto engine = std::make_shared<GaussianEngine>(random_joint_gaussian(spec, seed));
  return make_game(std::move(engine), spec.cardinality);
}

}  // namespace synthetic
}  // namespace infoplan
