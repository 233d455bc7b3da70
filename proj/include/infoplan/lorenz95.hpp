#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <random>

#include "infoplan/gaussian.hpp"

namespace infoplan {
namespace lorenz95 {

constexpr int kLon = 36;
constexpr int kLat = 9;
constexpr double kForcing = 8.0;
constexpr double kLatGhost = 4.0;  // constant advection value, used in advection terms only

/// Scalar meteorological field on the cyclic-longitude / fixed-advection-latitude grid.
struct FieldState {
  Eigen::MatrixXd y;  // kLon x kLat

  FieldState() : y(Eigen::MatrixXd::Zero(kLon, kLat)) {}
  explicit FieldState(Eigen::MatrixXd values) : y(std::move(values)) {}
};

inline int cell_index(int lon, int lat) { return lon + kLon * lat; }

/// Right-hand side of the 2-D Lorenz dynamics:
///   ydot_ij = (y_{i+1,j} - y_{i-2,j}) y_{i-1,j} + (2/3)(y_{i,j+1} - y_{i,j-2}) y_{i,j-1} - y_ij + ybar
/// with cyclic wrap in longitude and ghost value 4 in the latitudinal
/// advection differences (never in the -y_ij term).
FieldState derivative(const FieldState& y);

/// Classical RK4, fixed step. Throws NumericError naming the first bad step
/// if the state stops being finite.
FieldState integrate(const FieldState& y, double dt, int steps);

/// Ensemble of field samples, flattened column-per-member (cell_index order).
struct EnsembleState {
  Eigen::MatrixXd members;  // (kLon*kLat) x M
  double time = 0.0;

  int size() const { return static_cast<int>(members.cols()); }
};

EnsembleState propagate(const EnsembleState& ens, double dt, int steps);

/// Serial (one observation at a time) ensemble square-root filter update.
/// Mean gets the Kalman update; perturbations shrink by the square-root
/// factor so the posterior variance at the observed index matches the
/// Kalman posterior. Observations with zero prior variance are skipped.
EnsembleState ensrf_assimilate(const EnsembleState& ens, const std::vector<int>& obs_indices,
                               const std::vector<double>& obs_values, double obs_noise_var);

struct TopologySpec {
  int agents_lon = 6;  // agent grid within the search block
  int agents_lat = 1;
};

TopologySpec topology_by_name(const std::string& name);  // row6 | 2x3 | 3x3

struct ScenarioConfig {
  int search_lon0 = 10, search_lat0 = 0;  // 12 x 9 oceanic block corner
  int search_lon_size = 12, search_lat_size = 9;
  int verif_lon0 = 26, verif_lat0 = 3;    // downstream verification block
  int verif_lon_size = 4, verif_lat_size = 3;
  TopologySpec topology;
  int ensemble_size = 1024;
  int routine_sensors = 93;
  double routine_noise_var = 0.5;       // working default
  double sensing_noise_frac = 0.02;     // R_s = frac * mean search-field variance (working default)
  double spinup_time = 500.0;
  int assimilation_cycles = 10;         // 6-hr (0.05) routine cycles before t_S
  double dt = 0.01;
  double t_s = 0.05;                    // sensing time, offset from last analysis
  double t_v = 0.55;                    // verification time
};

struct TargetingScenario {
  ScenarioConfig config;
  std::vector<int> routine_network;          // flat cell indices, size routine_sensors
  std::vector<IndexSet> agent_regions;       // catalog indices per agent
  std::vector<std::pair<int, int>> catalog_cells;  // catalog index -> (lon, lat)
};

/// Spins up a climatological ensemble, runs routine EnSRF cycles, takes the
/// search-block samples at t_S and the verification-block samples at t_V,
/// and returns their joint sample Gaussian. Deterministic per seed.
std::pair<TargetingScenario, JointGaussian> build_targeting_scenario(const ScenarioConfig& cfg,
                                                                     std::uint64_t seed);

}  // namespace lorenz95
}  // namespace infoplan
