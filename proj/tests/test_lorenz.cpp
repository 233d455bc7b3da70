#include <cmath>
#include <random>

#include "doctest.h"
#include "infoplan/lorenz95.hpp"

using namespace infoplan;
using namespace infoplan::lorenz95;

namespace {

// seeded bounded random field, used as a generic chaotic-ish test state
FieldState random_field(std::uint64_t seed, double lo = 2.0, double hi = 10.0) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(lo, hi);
  FieldState f;
  for (int i = 0; i < kLon; ++i)
    for (int j = 0; j < kLat; ++j) f.y(i, j) = u(rng);
  return f;
}

FieldState roll_lon(const FieldState& f, int k) {
  FieldState out;
  for (int i = 0; i < kLon; ++i)
    for (int j = 0; j < kLat; ++j) out.y((i + k) % kLon, j) = f.y(i, j);
  return out;
}

}  // namespace

TEST_CASE("derivative equilibrium and forcing at interior points") {
  SUBCASE("uniform field at the forcing value is stationary in the interior") {
    FieldState f;
    f.y.setConstant(8.0);
    FieldState d = derivative(f);
    // interior latitudes reference no ghost cells: j in [2, kLat-2)
    for (int i = 0; i < kLon; ++i)
      for (int j = 2; j < kLat - 1; ++j) CHECK(d.y(i, j) == doctest::Approx(0.0));
  }
  SUBCASE("zero field feels pure forcing in the interior") {
    FieldState f;  // zero-initialized
    FieldState d = derivative(f);
    for (int i = 0; i < kLon; ++i)
      for (int j = 2; j < kLat - 1; ++j) CHECK(d.y(i, j) == doctest::Approx(8.0));
  }
}

TEST_CASE("first-latitude row matches the hand expansion with ghost value 4") {
  FieldState f = random_field(42);
  FieldState d = derivative(f);
  for (int i = 0; i < kLon; ++i) {
    auto wrap = [](int v) { return ((v % kLon) + kLon) % kLon; };
    // j = 0: y_{i,-1} = y_{i,-2} = 4 inside advection terms only
    double adv_lon = (f.y(wrap(i + 1), 0) - f.y(wrap(i - 2), 0)) * f.y(wrap(i - 1), 0);
    double adv_lat = (2.0 / 3.0) * (f.y(i, 1) - 4.0) * 4.0;
    double expect = adv_lon + adv_lat - f.y(i, 0) + 8.0;
    CHECK(d.y(i, 0) == doctest::Approx(expect).epsilon(1e-14));
    // the -y term must use the real value, never the ghost: perturbing y_{i,0}
    // changes the derivative by exactly -delta (plus advection via neighbors)
  }
  // second latitude: only y_{i,j-2} is the ghost
  for (int i = 0; i < kLon; ++i) {
    auto wrap = [](int v) { return ((v % kLon) + kLon) % kLon; };
    double adv_lon = (f.y(wrap(i + 1), 1) - f.y(wrap(i - 2), 1)) * f.y(wrap(i - 1), 1);
    double adv_lat = (2.0 / 3.0) * (f.y(i, 2) - 4.0) * f.y(i, 0);
    double expect = adv_lon + adv_lat - f.y(i, 1) + 8.0;
    CHECK(d.y(i, 1) == doctest::Approx(expect).epsilon(1e-14));
  }
  // top latitude: y_{i,kLat} ghost in the forward difference
  for (int i = 0; i < kLon; ++i) {
    auto wrap = [](int v) { return ((v % kLon) + kLon) % kLon; };
    const int j = kLat - 1;
    double adv_lon = (f.y(wrap(i + 1), j) - f.y(wrap(i - 2), j)) * f.y(wrap(i - 1), j);
    double adv_lat = (2.0 / 3.0) * (4.0 - f.y(i, j - 2)) * f.y(i, j - 1);
    double expect = adv_lon + adv_lat - f.y(i, j) + 8.0;
    CHECK(d.y(i, j) == doctest::Approx(expect).epsilon(1e-14));
  }
}

TEST_CASE("cyclic equivariance: rolling longitude commutes with the derivative") {
  FieldState f = random_field(7);
  for (int k : {1, 5, 17}) {
    FieldState a = derivative(roll_lon(f, k));
    FieldState b = roll_lon(derivative(f), k);
    CHECK((a.y - b.y).cwiseAbs().maxCoeff() == 0.0);
  }
}

TEST_CASE("RK4 integrator") {
  SUBCASE("zero steps is the identity") {
    FieldState f = random_field(3);
    FieldState g = integrate(f, 0.01, 0);
    CHECK(g.y == f.y);
  }
  SUBCASE("determinism: identical inputs give bitwise-identical outputs") {
    FieldState f = random_field(4);
    FieldState a = integrate(f, 0.01, 50);
    FieldState b = integrate(f, 0.01, 50);
    CHECK(a.y == b.y);
  }
  SUBCASE("halving dt shrinks the error about 16x (4th order)") {
    // settle onto the attractor first
    FieldState f = random_field(5, 7.0, 9.0);
    f = integrate(f, 0.01, 500);
    const double horizon = 0.05;
    FieldState ref = integrate(f, horizon / 64.0, 64);
    double e1 = (integrate(f, horizon / 4.0, 4).y - ref.y).norm();
    double e2 = (integrate(f, horizon / 8.0, 8).y - ref.y).norm();
    double ratio = e1 / e2;
    CHECK(ratio > 10.0);
    CHECK(ratio < 24.0);
  }
  SUBCASE("blow-up raises a numeric error naming the step") {
    FieldState f;
    f.y.setConstant(1e8);
    CHECK_THROWS_AS(integrate(f, 0.5, 100), NumericError);
  }
}

TEST_CASE("EnSRF assimilation") {
  auto make_ensemble = [](int m, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> g(0.0, 1.0);
    EnsembleState ens;
    ens.members.resize(kLon * kLat, m);
    for (int i = 0; i < ens.members.rows(); ++i)
      for (int j = 0; j < m; ++j) ens.members(i, j) = g(rng);
    return ens;
  };
  auto var_at = [](const EnsembleState& ens, int idx) {
    Eigen::VectorXd row = ens.members.row(idx);
    double mean = row.mean();
    return (row.array() - mean).square().sum() / (row.size() - 1);
  };

  SUBCASE("single observation matches the Kalman posterior variance") {
    EnsembleState ens = make_ensemble(64, 1);
    const int idx = 100;
    const double prior_var = var_at(ens, idx);
    const double r = 1.0;
    EnsembleState post = ensrf_assimilate(ens, {idx}, {0.3}, r);
    const double expect = prior_var * r / (prior_var + r);
    CHECK(var_at(post, idx) == doctest::Approx(expect).epsilon(1e-8));
  }
  SUBCASE("scalar prior variance 1, R = 1 gives posterior variance 0.5") {
    EnsembleState ens = make_ensemble(256, 2);
    const int idx = 50;
    // rescale the row to unit sample variance exactly
    double sd = std::sqrt(var_at(ens, idx));
    double mean = ens.members.row(idx).mean();
    ens.members.row(idx) =
        ((ens.members.row(idx).array() - mean) / sd).matrix();
    EnsembleState post = ensrf_assimilate(ens, {idx}, {0.7}, 1.0);
    CHECK(var_at(post, idx) == doctest::Approx(0.5).epsilon(1e-8));
  }
  SUBCASE("two serial observations of one scalar match the joint closed form") {
    EnsembleState ens = make_ensemble(128, 3);
    const int idx = 10;
    const double v = var_at(ens, idx);
    const double r = 0.8;
    EnsembleState post = ensrf_assimilate(ens, {idx, idx}, {0.1, 0.2}, r);
    const double expect = 1.0 / (1.0 / v + 2.0 / r);
    CHECK(var_at(post, idx) == doctest::Approx(expect).epsilon(1e-8));
  }
  SUBCASE("an infinitely noisy observation changes nothing") {
    EnsembleState ens = make_ensemble(32, 4);
    EnsembleState post = ensrf_assimilate(ens, {5}, {1.0}, 1e12);
    CHECK((post.members - ens.members).cwiseAbs().maxCoeff() < 1e-6);
  }
  SUBCASE("assimilation never increases variance at the observed index") {
    EnsembleState ens = make_ensemble(64, 5);
    for (int idx : {0, 17, 200}) {
      double before = var_at(ens, idx);
      EnsembleState post = ensrf_assimilate(ens, {idx}, {0.0}, 0.5);
      CHECK(var_at(post, idx) <= before + 1e-12);
    }
  }
  SUBCASE("zero prior variance is skipped with a warning") {
    EnsembleState ens;
    ens.members = Eigen::MatrixXd::Constant(kLon * kLat, 8, 3.0);
    EnsembleState post = ensrf_assimilate(ens, {4}, {9.0}, 1.0);
    CHECK(post.members == ens.members);
  }
}

TEST_CASE("topology names") {
  CHECK(topology_by_name("row6").agents_lon == 6);
  CHECK(topology_by_name("row6").agents_lat == 1);
  CHECK(topology_by_name("2x3").agents_lon == 3);
  CHECK(topology_by_name("2x3").agents_lat == 2);
  CHECK(topology_by_name("3x3").agents_lon == 3);
  CHECK(topology_by_name("3x3").agents_lat == 3);
  CHECK_THROWS_AS(topology_by_name("bogus"), ArgumentError);
}

TEST_CASE("targeting scenario construction (miniature)") {
  ScenarioConfig cfg;
  cfg.ensemble_size = 48;
  cfg.spinup_time = 5.0;
  cfg.assimilation_cycles = 2;

  SUBCASE("row6 topology gives 6 agents with 18 cells each") {
    auto [scenario, jg] = build_targeting_scenario(cfg, 1);
    CHECK(scenario.agent_regions.size() == 6);
    for (const auto& region : scenario.agent_regions) CHECK(region.size() == 18);
    CHECK(jg.catalog.size() == 12 * 9 + 4 * 3);
    jg.validate();
    CHECK(static_cast<int>(scenario.routine_network.size()) == cfg.routine_sensors);
    GaussianEngine engine(jg);
    CHECK(std::isfinite(engine.mi(engine.catalog().sensing_indices())));
  }
  SUBCASE("same seed gives a bit-identical JointGaussian") {
    auto [s1, a] = build_targeting_scenario(cfg, 7);
    auto [s2, b] = build_targeting_scenario(cfg, 7);
    CHECK(a.cov == b.cov);
    CHECK(a.mean == b.mean);
    CHECK(a.noise == b.noise);
    CHECK(s1.routine_network == s2.routine_network);
  }
  SUBCASE("different seeds differ") {
    auto [s1, a] = build_targeting_scenario(cfg, 8);
    auto [s2, b] = build_targeting_scenario(cfg, 9);
    CHECK(a.cov != b.cov);
  }
}
