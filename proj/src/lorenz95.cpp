#include "infoplan/lorenz95.hpp"

#include <cmath>
#include <iostream>
#include <set>

namespace infoplan {
namespace lorenz95 {

FieldState derivative(const FieldState& state) {
  const auto& y = state.y;
  FieldState out;
  auto wrap = [](int i) { return ((i % kLon) + kLon) % kLon; };
  // latitudinal neighbors: ghost value in the advection differences only
  auto lat = [&y](int i, int j) { return (j >= 0 && j < kLat) ? y(i, j) : kLatGhost; };
  for (int j = 0; j < kLat; ++j) {
    for (int i = 0; i < kLon; ++i) {
      double adv_lon = (y(wrap(i + 1), j) - y(wrap(i - 2), j)) * y(wrap(i - 1), j);
      double adv_lat = (2.0 / 3.0) * (lat(i, j + 1) - lat(i, j - 2)) * lat(i, j - 1);
      out.y(i, j) = adv_lon + adv_lat - y(i, j) + kForcing;
    }
  }
  return out;
}

FieldState integrate(const FieldState& y0, double dt, int steps) {
  if (dt <= 0.0) throw ArgumentError("integrate: dt must be positive");
  FieldState y = y0;
  for (int s = 0; s < steps; ++s) {
    FieldState k1 = derivative(y);
    FieldState y2{y.y + 0.5 * dt * k1.y};
    FieldState k2 = derivative(y2);
    FieldState y3{y.y + 0.5 * dt * k2.y};
    FieldState k3 = derivative(y3);
    FieldState y4{y.y + dt * k3.y};
    FieldState k4 = derivative(y4);
    y.y += (dt / 6.0) * (k1.y + 2.0 * k2.y + 2.0 * k3.y + k4.y);
    if (!y.y.allFinite())
      throw NumericError("integration blew up at step " + std::to_string(s + 1));
  }
  return y;
}

EnsembleState propagate(const EnsembleState& ens, double dt, int steps) {
  EnsembleState out = ens;
  for (int m = 0; m < ens.size(); ++m) {
    FieldState y{Eigen::Map<const Eigen::MatrixXd>(ens.members.col(m).data(), kLon, kLat)};
    FieldState yf = integrate(y, dt, steps);
    out.members.col(m) = Eigen::Map<const Eigen::VectorXd>(yf.y.data(), kLon * kLat);
  }
  out.time = ens.time + dt * steps;
  return out;
}

EnsembleState ensrf_assimilate(const EnsembleState& ens, const std::vector<int>& obs_indices,
                               const std::vector<double>& obs_values, double obs_noise_var) {
  if (obs_indices.size() != obs_values.size())
    throw ArgumentError("ensrf_assimilate: observation index/value size mismatch");
  if (obs_noise_var <= 0.0) throw ArgumentError("ensrf_assimilate: noise variance must be positive");
  const int n = static_cast<int>(ens.members.rows());
  const int m = ens.size();
  if (m < 2) throw ArgumentError("ensrf_assimilate: need at least two members");

  Eigen::VectorXd mean = ens.members.rowwise().mean();
  Eigen::MatrixXd pert = ens.members.colwise() - mean;

  for (std::size_t o = 0; o < obs_indices.size(); ++o) {
    const int k = obs_indices[o];
    if (k < 0 || k >= n) throw ArgumentError("ensrf_assimilate: observation index out of range");
    Eigen::RowVectorXd a = pert.row(k);
    double var = a.squaredNorm() / (m - 1);
    if (var <= 0.0) {
      std::cerr << "ensrf_assimilate: zero prior variance at index " << k << ", skipping observation\n";
      continue;
    }
    Eigen::VectorXd gain = (pert * a.transpose()) / ((m - 1) * (var + obs_noise_var));
    mean += gain * (obs_values[o] - mean(k));
    double shrink = 1.0 / (1.0 + std::sqrt(obs_noise_var / (var + obs_noise_var)));
    pert -= (shrink * gain) * a;
  }

  EnsembleState out = ens;
  out.members = pert.colwise() + mean;
  return out;
}

TopologySpec topology_by_name(const std::string& name) {
  if (name == "row6") return {6, 1};
  if (name == "2x3") return {3, 2};
  if (name == "3x3") return {3, 3};
  throw ArgumentError("unknown topology '" + name + "' (expected row6, 2x3 or 3x3)");
}

namespace {

std::vector<int> split_sizes(int total, int parts) {
  std::vector<int> out(parts, total / parts);
  for (int i = 0; i < total % parts; ++i) ++out[parts - 1 - i];
  return out;
}

}  // namespace

std::pair<TargetingScenario, JointGaussian> build_targeting_scenario(const ScenarioConfig& cfg,
                                                                     std::uint64_t seed) {
  if (cfg.search_lon0 < 0 || cfg.search_lon0 + cfg.search_lon_size > kLon ||
      cfg.search_lat0 < 0 || cfg.search_lat0 + cfg.search_lat_size > kLat)
    throw ArgumentError("search block outside grid");
  if (cfg.verif_lon0 < 0 || cfg.verif_lon0 + cfg.verif_lon_size > kLon ||
      cfg.verif_lat0 < 0 || cfg.verif_lat0 + cfg.verif_lat_size > kLat)
    throw ArgumentError("verification block outside grid");
  if (cfg.verif_lon0 < cfg.search_lon0 + cfg.search_lon_size && cfg.verif_lon0 + cfg.verif_lon_size > cfg.search_lon0)
    throw ArgumentError("verification block overlaps search block");
  if (cfg.ensemble_size < 2) throw ArgumentError("ensemble size must be >= 2");

  std::mt19937_64 rng(seed);

  // spin-up from a perturbed rest state onto the attractor
  FieldState truth;
  std::uniform_real_distribution<double> perturb(-0.05, 0.05);
  for (int j = 0; j < kLat; ++j)
    for (int i = 0; i < kLon; ++i) truth.y(i, j) = kForcing + perturb(rng);
  const int spin_steps = static_cast<int>(std::lround(cfg.spinup_time / cfg.dt));
  truth = integrate(truth, cfg.dt, spin_steps);

  // climatological ensemble: decorrelated attractor snapshots
  const int gap_steps = static_cast<int>(std::lround(0.2 / cfg.dt));
  EnsembleState ens;
  ens.members.resize(kLon * kLat, cfg.ensemble_size);
  for (int m = 0; m < cfg.ensemble_size; ++m) {
    truth = integrate(truth, cfg.dt, gap_steps);
    ens.members.col(m) = Eigen::Map<const Eigen::VectorXd>(truth.y.data(), kLon * kLat);
  }
  truth = integrate(truth, cfg.dt, 10 * gap_steps);  // decorrelate truth from the last member

  // routine network: uneven coverage, oceanic block mostly void
  TargetingScenario scen;
  scen.config = cfg;
  {
    std::set<int> chosen;
    std::uniform_int_distribution<int> cell(0, kLon * kLat - 1);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    while (static_cast<int>(chosen.size()) < cfg.routine_sensors) {
      int c = cell(rng);
      int lon = c % kLon, lat = c / kLon;
      bool in_block = lon >= cfg.search_lon0 && lon < cfg.search_lon0 + cfg.search_lon_size &&
                      lat >= cfg.search_lat0 && lat < cfg.search_lat0 + cfg.search_lat_size;
      if (in_block && unit(rng) > 0.1) continue;
      chosen.insert(c);
    }
    scen.routine_network.assign(chosen.begin(), chosen.end());
  }

  // routine assimilation cycles every 6 hrs (0.05 model time)
  const int cycle_steps = static_cast<int>(std::lround(cfg.t_s / cfg.dt));
  std::normal_distribution<double> obs_noise(0.0, std::sqrt(cfg.routine_noise_var));
  for (int c = 0; c < cfg.assimilation_cycles; ++c) {
    ens = propagate(ens, cfg.dt, cycle_steps);
    truth = integrate(truth, cfg.dt, cycle_steps);
    std::vector<double> obs;
    obs.reserve(scen.routine_network.size());
    for (int idx : scen.routine_network)
      obs.push_back(truth.y(idx % kLon, idx / kLon) + obs_noise(rng));
    ens = ensrf_assimilate(ens, scen.routine_network, obs, cfg.routine_noise_var);
  }

  // catalog: agent regions over the search block at t_S, then verification at t_V
  auto lon_sizes = split_sizes(cfg.search_lon_size, cfg.topology.agents_lon);
  auto lat_sizes = split_sizes(cfg.search_lat_size, cfg.topology.agents_lat);
  std::vector<int> tags;
  std::vector<int> cell_of;  // flat grid cell per catalog index
  int agent = 0;
  int lat0 = cfg.search_lat0;
  for (int al = 0; al < cfg.topology.agents_lat; ++al) {
    int lon0 = cfg.search_lon0;
    for (int an = 0; an < cfg.topology.agents_lon; ++an, ++agent) {
      for (int dj = 0; dj < lat_sizes[al]; ++dj)
        for (int di = 0; di < lon_sizes[an]; ++di) {
          tags.push_back(agent);
          cell_of.push_back(cell_index(lon0 + di, lat0 + dj));
          scen.catalog_cells.emplace_back(lon0 + di, lat0 + dj);
        }
      lon0 += lon_sizes[an];
    }
    lat0 += lat_sizes[al];
  }
  const std::size_t n_search = tags.size();
  for (int dj = 0; dj < cfg.verif_lat_size; ++dj)
    for (int di = 0; di < cfg.verif_lon_size; ++di) {
      tags.push_back(-1);
      cell_of.push_back(cell_index(cfg.verif_lon0 + di, cfg.verif_lat0 + dj));
      scen.catalog_cells.emplace_back(cfg.verif_lon0 + di, cfg.verif_lat0 + dj);
    }
  VariableCatalog catalog(tags);
  for (int a = 0; a < catalog.num_regions(); ++a) scen.agent_regions.push_back(catalog.region(a));

  // search samples at t_S, verification samples at t_V
  ens = propagate(ens, cfg.dt, cycle_steps);
  Eigen::MatrixXd data(tags.size(), cfg.ensemble_size);
  for (std::size_t r = 0; r < n_search; ++r) data.row(r) = ens.members.row(cell_of[r]);
  const int to_verif_steps = static_cast<int>(std::lround((cfg.t_v - cfg.t_s) / cfg.dt));
  ens = propagate(ens, cfg.dt, to_verif_steps);
  for (std::size_t r = n_search; r < tags.size(); ++r) data.row(r) = ens.members.row(cell_of[r]);

  JointGaussian jg;
  jg.catalog = catalog;
  jg.mean = data.rowwise().mean();
  Eigen::MatrixXd centered = data.colwise() - jg.mean;
  jg.cov = (centered * centered.transpose()) / (cfg.ensemble_size - 1);
  jg.cov = 0.5 * (jg.cov + jg.cov.transpose()).eval();

  double mean_var = jg.cov.diagonal().head(n_search).mean();
  double r_s = cfg.sensing_noise_frac * mean_var;
  jg.noise.assign(tags.size(), 0.0);
  for (std::size_t i = 0; i < n_search; ++i) jg.noise[i] = r_s;

  return {std::move(scen), std::move(jg)};
}

}  // namespace lorenz95
}  // namespace infoplan
