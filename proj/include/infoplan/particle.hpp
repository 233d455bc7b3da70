#pragma once

#include <Eigen/Dense>
#include <map>
#include <memory>
#include <mutex>
#include <random>

#include "infoplan/engine.hpp"

namespace infoplan {
namespace particle {

/// M weighted target-position hypotheses.
struct ParticleSet {
  std::vector<Eigen::Vector2d> positions;  // meters
  std::vector<double> weights;

  std::size_t size() const { return positions.size(); }
  void validate() const;
  double effective_sample_size() const;
};

/// Density of the additive range noise W. Implementations must integrate to 1
/// (spot-checked at construction) and decay to tail mass < 1e-6 outside
/// [-halfwidth, halfwidth].
class NoiseModel {
 public:
  virtual ~NoiseModel() = default;
  virtual double pdf(double w) const = 0;
  virtual double halfwidth() const = 0;

 protected:
  /// Simpson check that pdf integrates to 1 over the support window.
  void check_normalization() const;
};

class GaussianNoise : public NoiseModel {
 public:
  explicit GaussianNoise(double sigma);
  double pdf(double w) const override;
  double halfwidth() const override { return 6.0 * sigma_; }
  double sigma() const { return sigma_; }

 private:
  double sigma_;
};

/// Two-component Gaussian mixture noise (used to exercise the non-Gaussian path).
class GaussianMixtureNoise : public NoiseModel {
 public:
  GaussianMixtureNoise(double w1, double mu1, double sigma1, double mu2, double sigma2);
  double pdf(double w) const override;
  double halfwidth() const override;

 private:
  double w1_, mu1_, s1_, mu2_, s2_;
};

/// Z = ||s - r|| + W.
struct RangeSensorModel {
  std::shared_ptr<const NoiseModel> noise;

  double likelihood(double z, const Eigen::Vector2d& sensor, const Eigen::Vector2d& target) const {
    return noise->pdf(z - (sensor - target).norm());
  }
};

struct QuadratureSpec {
  int nodes_per_dim = 64;  // Gauss-Legendre, tensorized
  int joint_limit = 3;     // largest evaluated sensor set
};

/// Gauss-Legendre nodes and weights on [-1, 1].
void gauss_legendre(int n, std::vector<double>& nodes, std::vector<double>& weights);

/// H(Z_sensors | prior): entropy of the measurement mixture
/// q(z) = sum_p w_p prod_j pdf(z_j - ||s_j - V_p||) over the tensor grid.
double entropy_prior(const ParticleSet& ps, const RangeSensorModel& model,
                     const std::vector<Eigen::Vector2d>& sensors, const QuadratureSpec& quad);

/// H(Z_sensor | V); equals the noise entropy for location-independent noise.
double entropy_given_state(const ParticleSet& ps, const RangeSensorModel& model,
                           const Eigen::Vector2d& sensor, const QuadratureSpec& quad);

/// H(Z_i | Z_others, prior) = H(Z_{i u others}) - H(Z_others).
double conditional_entropy(const ParticleSet& ps, const RangeSensorModel& model,
                           const std::vector<Eigen::Vector2d>& i_sensors,
                           const std::vector<Eigen::Vector2d>& other_sensors,
                           const QuadratureSpec& quad);

/// I(V; Z_sel | Z_given) = H(Z_sel | Z_given) - sum_j H(Z_j | V).
double particle_mi(const ParticleSet& ps, const RangeSensorModel& model,
                   const std::vector<Eigen::Vector2d>& sel_sensors,
                   const std::vector<Eigen::Vector2d>& given_sensors, const QuadratureSpec& quad);

struct Region2d {
  Eigen::Vector2d lo{0.0, 0.0};
  Eigen::Vector2d hi{40.0, 40.0};
  bool contains(const Eigen::Vector2d& p) const {
    return p.x() >= lo.x() && p.x() <= hi.x() && p.y() >= lo.y() && p.y() <= hi.y();
  }
};

/// Bayes weight update followed by systematic resampling when ESS < M/2.
/// An all-zero likelihood resets the filter to uniform over reset_region
/// (with a warning); without a region it is a NumericError.
ParticleSet pf_update(const ParticleSet& ps, const RangeSensorModel& model,
                      const std::vector<Eigen::Vector2d>& sensors,
                      const std::vector<double>& observed_ranges, std::mt19937_64& rng,
                      const Region2d* reset_region = nullptr);

/// Uniform prior over a rectangle.
ParticleSet uniform_particles(const Region2d& region, int count, std::mt19937_64& rng);

/// CSV columns: x,y,w.
void write_particles_csv(std::ostream& os, const ParticleSet& ps);

/// InformationEngine over an immutable ParticleSet snapshot. The catalog
/// enumerates candidate sensor positions; region tags group them per agent.
class ParticleEngine : public InformationEngine {
 public:
  ParticleEngine(ParticleSet snapshot, RangeSensorModel model,
                 std::vector<Eigen::Vector2d> candidate_positions, std::vector<int> region_tags,
                 QuadratureSpec quad = {});

  const VariableCatalog& catalog() const override { return catalog_; }
  double clamp_tolerance() const override { return 1e-4; }
  const ParticleSet& particles() const { return particles_; }
  const QuadratureSpec& quadrature() const { return quad_; }
  const Eigen::Vector2d& position(VariableIndex v) const { return positions_.at(v); }

 protected:
  double evaluate(const IndexSet& sel, const IndexSet& given) const override;

 private:
  double cached_entropy_prior(const IndexSet& set) const;

  ParticleSet particles_;
  RangeSensorModel model_;
  std::vector<Eigen::Vector2d> positions_;
  VariableCatalog catalog_;
  QuadratureSpec quad_;
  mutable std::mutex cache_mutex_;
  mutable std::map<IndexSet, double> prior_entropy_cache_;
  mutable std::map<VariableIndex, double> state_entropy_cache_;
};

}  // namespace particle
}  // namespace infoplan
