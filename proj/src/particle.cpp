#include "infoplan/particle.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <iostream>
#include <numeric>
#include <ostream>

namespace infoplan {
namespace particle {

void ParticleSet::validate() const {
  if (positions.empty()) throw ArgumentError("ParticleSet: need at least one particle");
  if (positions.size() != weights.size())
    throw ArgumentError("ParticleSet: position/weight size mismatch");
  double sum = 0.0;
  for (double w : weights) {
    if (w < 0.0) throw ArgumentError("ParticleSet: negative weight");
    sum += w;
  }
  if (std::abs(sum - 1.0) > 1e-12)
    throw ArgumentError("ParticleSet: weights sum to " + std::to_string(sum));
}

double ParticleSet::effective_sample_size() const {
  double s = 0.0;
  for (double w : weights) s += w * w;
  return s > 0.0 ? 1.0 / s : 0.0;
}

void NoiseModel::check_normalization() const {
  const double h = halfwidth();
  const int n = 4000;  // Simpson panels
  const double dx = 2.0 * h / n;
  double sum = pdf(-h) + pdf(h);
  for (int i = 1; i < n; ++i) sum += (i % 2 ? 4.0 : 2.0) * pdf(-h + i * dx);
  sum *= dx / 3.0;
  if (std::abs(sum - 1.0) > 1e-5)
    throw ArgumentError("noise density integrates to " + std::to_string(sum) +
                        " over its support window");
}

GaussianNoise::GaussianNoise(double sigma) : sigma_(sigma) {
  if (sigma <= 0.0) throw ArgumentError("GaussianNoise: sigma must be positive");
  check_normalization();
}

double GaussianNoise::pdf(double w) const {
  static const double inv_sqrt_2pi = 0.3989422804014327;
  double u = w / sigma_;
  return inv_sqrt_2pi / sigma_ * std::exp(-0.5 * u * u);
}

GaussianMixtureNoise::GaussianMixtureNoise(double w1, double mu1, double sigma1, double mu2,
                                           double sigma2)
    : w1_(w1), mu1_(mu1), s1_(sigma1), mu2_(mu2), s2_(sigma2) {
  if (w1 < 0.0 || w1 > 1.0) throw ArgumentError("mixture weight must be in [0,1]");
  if (sigma1 <= 0.0 || sigma2 <= 0.0) throw ArgumentError("mixture sigmas must be positive");
  check_normalization();
}

double GaussianMixtureNoise::pdf(double w) const {
  static const double c = 0.3989422804014327;
  double u1 = (w - mu1_) / s1_, u2 = (w - mu2_) / s2_;
  return w1_ * c / s1_ * std::exp(-0.5 * u1 * u1) + (1.0 - w1_) * c / s2_ * std::exp(-0.5 * u2 * u2);
}

double GaussianMixtureNoise::halfwidth() const {
  return std::max(std::abs(mu1_) + 7.0 * s1_, std::abs(mu2_) + 7.0 * s2_);
}

void gauss_legendre(int n, std::vector<double>& nodes, std::vector<double>& weights) {
  if (n < 1) throw ArgumentError("gauss_legendre: need at least one node");
  nodes.resize(n);
  weights.resize(n);
  const int half = (n + 1) / 2;
  for (int i = 0; i < half; ++i) {
    // Newton iteration from the Chebyshev estimate
    double x = std::cos(M_PI * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= n; ++k) {
        double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-15) break;
    }
    nodes[i] = -x;
    nodes[n - 1 - i] = x;
    double w = 2.0 / ((1.0 - x * x) * dp * dp);
    weights[i] = w;
    weights[n - 1 - i] = w;
  }
}

namespace {

struct SensorGrid {
  std::vector<double> nodes;    // measurement values
  std::vector<double> weights;  // scaled quadrature weights
  std::vector<double> mu;       // per-particle expected range
};

SensorGrid build_grid(const ParticleSet& ps, const RangeSensorModel& model,
                      const Eigen::Vector2d& sensor, int n_nodes) {
  SensorGrid g;
  g.mu.resize(ps.size());
  double lo = std::numeric_limits<double>::max(), hi = std::numeric_limits<double>::lowest();
  for (std::size_t p = 0; p < ps.size(); ++p) {
    g.mu[p] = (sensor - ps.positions[p]).norm();
    lo = std::min(lo, g.mu[p]);
    hi = std::max(hi, g.mu[p]);
  }
  const double h = model.noise->halfwidth();
  lo -= h;
  hi += h;
  std::vector<double> xs, ws;
  gauss_legendre(n_nodes, xs, ws);
  const double mid = 0.5 * (lo + hi), span = 0.5 * (hi - lo);
  g.nodes.resize(n_nodes);
  g.weights.resize(n_nodes);
  for (int t = 0; t < n_nodes; ++t) {
    g.nodes[t] = mid + span * xs[t];
    g.weights[t] = span * ws[t];
  }
  return g;
}

// L(t, p) = pdf(node_t - mu_p)
Eigen::MatrixXd likelihood_table(const RangeSensorModel& model, const SensorGrid& g) {
  Eigen::MatrixXd L(g.nodes.size(), g.mu.size());
  for (std::size_t p = 0; p < g.mu.size(); ++p)
    for (std::size_t t = 0; t < g.nodes.size(); ++t)
      L(t, p) = model.noise->pdf(g.nodes[t] - g.mu[p]);
  return L;
}

inline double neg_q_log_q(double q) { return q > 0.0 ? -q * std::log(q) : 0.0; }

}  // namespace

double entropy_prior(const ParticleSet& ps, const RangeSensorModel& model,
                     const std::vector<Eigen::Vector2d>& sensors, const QuadratureSpec& quad) {
  ps.validate();
  const int d = static_cast<int>(sensors.size());
  if (d == 0) return 0.0;
  if (d > quad.joint_limit)
    throw ArgumentError("entropy_prior: sensor set of size " + std::to_string(d) +
                        " exceeds joint limit " + std::to_string(quad.joint_limit));

  const int n = quad.nodes_per_dim;
  const Eigen::Index m = static_cast<Eigen::Index>(ps.size());
  Eigen::VectorXd w = Eigen::Map<const Eigen::VectorXd>(ps.weights.data(), m);

  std::vector<SensorGrid> grids;
  std::vector<Eigen::MatrixXd> tables;
  for (const auto& s : sensors) {
    grids.push_back(build_grid(ps, model, s, n));
    tables.push_back(likelihood_table(model, grids.back()));
  }

  double h = 0.0;
  if (d == 1) {
    Eigen::VectorXd q = tables[0] * w;
    for (int t = 0; t < n; ++t) h += grids[0].weights[t] * neg_q_log_q(q(t));
  } else if (d == 2) {
    Eigen::MatrixXd q = tables[0] * w.asDiagonal() * tables[1].transpose();
    for (int a = 0; a < n; ++a)
      for (int b = 0; b < n; ++b)
        h += grids[0].weights[a] * grids[1].weights[b] * neg_q_log_q(q(a, b));
  } else {
    Eigen::MatrixXd scaled(m, n);  // column p-major slabs of sensor 0
    for (int a = 0; a < n; ++a) scaled.col(a) = w.cwiseProduct(tables[0].row(a).transpose());
    for (int a = 0; a < n; ++a) {
      Eigen::MatrixXd q = tables[1] * scaled.col(a).asDiagonal() * tables[2].transpose();
      double slab = 0.0;
      for (int b = 0; b < n; ++b)
        for (int c = 0; c < n; ++c)
          slab += grids[1].weights[b] * grids[2].weights[c] * neg_q_log_q(q(b, c));
      h += grids[0].weights[a] * slab;
    }
  }
  return h;
}

double entropy_given_state(const ParticleSet& ps, const RangeSensorModel& model,
                           const Eigen::Vector2d& sensor, const QuadratureSpec& quad) {
  ps.validate();
  (void)sensor;  // additive range noise: H(Z | X) is the noise entropy itself
  const double hw = model.noise->halfwidth();
  std::vector<double> xs, ws;
  gauss_legendre(quad.nodes_per_dim, xs, ws);
  double h = 0.0;
  for (int t = 0; t < quad.nodes_per_dim; ++t) {
    double l = model.noise->pdf(hw * xs[t]);
    if (l > 0.0) h -= hw * ws[t] * l * std::log(l);
  }
  return h;
}

double conditional_entropy(const ParticleSet& ps, const RangeSensorModel& model,
                           const std::vector<Eigen::Vector2d>& i_sensors,
                           const std::vector<Eigen::Vector2d>& other_sensors,
                           const QuadratureSpec& quad) {
  if (other_sensors.empty()) return entropy_prior(ps, model, i_sensors, quad);
  std::vector<Eigen::Vector2d> joint = i_sensors;
  joint.insert(joint.end(), other_sensors.begin(), other_sensors.end());
  return entropy_prior(ps, model, joint, quad) - entropy_prior(ps, model, other_sensors, quad);
}

double particle_mi(const ParticleSet& ps, const RangeSensorModel& model,
                   const std::vector<Eigen::Vector2d>& sel_sensors,
                   const std::vector<Eigen::Vector2d>& given_sensors, const QuadratureSpec& quad) {
  double h = conditional_entropy(ps, model, sel_sensors, given_sensors, quad);
  for (const auto& s : sel_sensors) h -= entropy_given_state(ps, model, s, quad);
  return h;
}

ParticleSet pf_update(const ParticleSet& ps, const RangeSensorModel& model,
                      const std::vector<Eigen::Vector2d>& sensors,
                      const std::vector<double>& observed_ranges, std::mt19937_64& rng,
                      const Region2d* reset_region) {
  ps.validate();
  if (sensors.size() != observed_ranges.size())
    throw ArgumentError("pf_update: sensor/range count mismatch");

  ParticleSet out = ps;
  double total = 0.0;
  for (std::size_t p = 0; p < out.size(); ++p) {
    double l = 1.0;
    for (std::size_t j = 0; j < sensors.size(); ++j)
      l *= model.likelihood(observed_ranges[j], sensors[j], ps.positions[p]);
    out.weights[p] *= l;
    total += out.weights[p];
  }
  if (total <= 0.0) {
    if (!reset_region)
      throw NumericError("pf_update: all particle weights vanished (impossible observation)");
    std::cerr << "pf_update: filter degeneracy, resetting to uniform over the region\n";
    return uniform_particles(*reset_region, static_cast<int>(ps.size()), rng);
  }
  for (double& w : out.weights) w /= total;
  // exact renormalization so the sum-to-one invariant holds to 1e-12
  double s = std::accumulate(out.weights.begin(), out.weights.end(), 0.0);
  for (double& w : out.weights) w /= s;

  if (out.effective_sample_size() < 0.5 * static_cast<double>(out.size())) {
    const std::size_t m = out.size();
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    double u0 = unit(rng) / static_cast<double>(m);
    std::vector<Eigen::Vector2d> resampled;
    resampled.reserve(m);
    double cum = out.weights[0];
    std::size_t idx = 0;
    for (std::size_t k = 0; k < m; ++k) {
      double u = u0 + static_cast<double>(k) / static_cast<double>(m);
      while (u > cum && idx + 1 < m) cum += out.weights[++idx];
      resampled.push_back(out.positions[idx]);
    }
    out.positions = std::move(resampled);
    out.weights.assign(m, 1.0 / static_cast<double>(m));
  }
  return out;
}

ParticleSet uniform_particles(const Region2d& region, int count, std::mt19937_64& rng) {
  if (count < 1) throw ArgumentError("uniform_particles: count must be >= 1");
  std::uniform_real_distribution<double> ux(region.lo.x(), region.hi.x());
  std::uniform_real_distribution<double> uy(region.lo.y(), region.hi.y());
  ParticleSet ps;
  ps.positions.reserve(count);
  for (int p = 0; p < count; ++p) ps.positions.emplace_back(ux(rng), uy(rng));
  ps.weights.assign(count, 1.0 / count);
  return ps;
}

void write_particles_csv(std::ostream& os, const ParticleSet& ps) {
  os << "x,y,w\n";
  char buf[128];
  for (std::size_t p = 0; p < ps.size(); ++p) {
    std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g\n", ps.positions[p].x(), ps.positions[p].y(),
                  ps.weights[p]);
    os << buf;
  }
}

ParticleEngine::ParticleEngine(ParticleSet snapshot, RangeSensorModel model,
                               std::vector<Eigen::Vector2d> candidate_positions,
                               std::vector<int> region_tags, QuadratureSpec quad)
    : particles_(std::move(snapshot)),
      model_(std::move(model)),
      positions_(std::move(candidate_positions)),
      catalog_(std::move(region_tags)),
      quad_(quad) {
  particles_.validate();
  if (!model_.noise) throw ArgumentError("ParticleEngine: missing noise model");
  if (positions_.size() != catalog_.size())
    throw ArgumentError("ParticleEngine: positions/tags size mismatch");
}

double ParticleEngine::cached_entropy_prior(const IndexSet& set) const {
  IndexSet key = set;
  std::sort(key.begin(), key.end());
  {
    std::lock_guard<std::mutex> lock(cache_mutex_);
    auto it = prior_entropy_cache_.find(key);
    if (it != prior_entropy_cache_.end()) return it->second;
  }
  std::vector<Eigen::Vector2d> sensors;
  for (VariableIndex v : key) sensors.push_back(positions_.at(v));
  double h = entropy_prior(particles_, model_, sensors, quad_);
  std::lock_guard<std::mutex> lock(cache_mutex_);
  prior_entropy_cache_[key] = h;
  return h;
}

double ParticleEngine::evaluate(const IndexSet& sel, const IndexSet& given) const {
  if (sel.empty()) return 0.0;
  if (static_cast<int>(sel.size() + given.size()) > quad_.joint_limit)
    throw ArgumentError("selection of " + std::to_string(sel.size() + given.size()) +
                        " sensors exceeds joint quadrature limit");
  IndexSet joint = sel;
  joint.insert(joint.end(), given.begin(), given.end());
  double h = cached_entropy_prior(joint);
  if (!given.empty()) h -= cached_entropy_prior(given);
  for (VariableIndex v : sel) {
    double hs;
    {
      std::lock_guard<std::mutex> lock(cache_mutex_);
      auto it = state_entropy_cache_.find(v);
      if (it != state_entropy_cache_.end()) {
        h -= it->second;
        continue;
      }
    }
    hs = entropy_given_state(particles_, model_, positions_.at(v), quad_);
    {
      std::lock_guard<std::mutex> lock(cache_mutex_);
      state_entropy_cache_[v] = hs;
    }
    h -= hs;
  }
  return h;
}

}  // namespace particle
}  // namespace infoplan
