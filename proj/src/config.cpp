#include "infoplan/config.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

#include "json.hpp"

namespace infoplan {

namespace {

using nlohmann::json;

void check_keys(const json& obj, const std::string& path,
                std::initializer_list<const char*> allowed) {
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    bool ok = false;
    for (const char* k : allowed)
      if (it.key() == k) ok = true;
    if (!ok)
      throw ConfigError("unknown configuration key '" +
                        (path.empty() ? it.key() : path + "." + it.key()) + "'");
  }
}

std::string joined(const std::string& path, const char* key) {
  return path.empty() ? key : path + "." + key;
}

template <typename T>
T get_or(const json& obj, const std::string& path, const char* key, T fallback) {
  if (!obj.contains(key)) return fallback;
  try {
    return obj.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ConfigError("bad value for '" + joined(path, key) + "': " + e.what());
  }
}

template <typename T>
T get_req(const json& obj, const std::string& path, const char* key) {
  if (!obj.contains(key)) throw ConfigError("missing required key '" + joined(path, key) + "'");
  return get_or<T>(obj, path, key, T{});
}

void require_positive(double v, const std::string& what) {
  if (!(v > 0.0)) throw ConfigError(what + " must be positive");
}

const std::set<std::string> kGameStrategies = {"optimal",   "local", "sequential",
                                               "iterative", "jsfp",  "jsfp-noinertia",
                                               "random"};
const std::set<std::string> kTrackingStrategies = {"jsfp",       "optimal", "local",
                                                   "sequential", "random",  "audit"};

void parse_lorenz(const json& obj, RunConfig& cfg) {
  const std::string p = "lorenz";
  check_keys(obj, p,
             {"topology", "cardinality", "ensemble_size", "routine_sensors", "routine_noise_var",
              "sensing_noise_frac", "spinup_time", "assimilation_cycles", "dt", "t_s", "t_v"});
  cfg.lorenz.topology = lorenz95::topology_by_name(get_or<std::string>(obj, p, "topology", "row6"));
  cfg.lorenz_cardinality = get_or<int>(obj, p, "cardinality", 1);
  cfg.lorenz.ensemble_size = get_or<int>(obj, p, "ensemble_size", cfg.lorenz.ensemble_size);
  cfg.lorenz.routine_sensors = get_or<int>(obj, p, "routine_sensors", cfg.lorenz.routine_sensors);
  cfg.lorenz.routine_noise_var =
      get_or<double>(obj, p, "routine_noise_var", cfg.lorenz.routine_noise_var);
  cfg.lorenz.sensing_noise_frac =
      get_or<double>(obj, p, "sensing_noise_frac", cfg.lorenz.sensing_noise_frac);
  cfg.lorenz.spinup_time = get_or<double>(obj, p, "spinup_time", cfg.lorenz.spinup_time);
  cfg.lorenz.assimilation_cycles =
      get_or<int>(obj, p, "assimilation_cycles", cfg.lorenz.assimilation_cycles);
  cfg.lorenz.dt = get_or<double>(obj, p, "dt", cfg.lorenz.dt);
  cfg.lorenz.t_s = get_or<double>(obj, p, "t_s", cfg.lorenz.t_s);
  cfg.lorenz.t_v = get_or<double>(obj, p, "t_v", cfg.lorenz.t_v);
  if (cfg.lorenz_cardinality < 1) throw ConfigError("lorenz.cardinality must be >= 1");
  if (cfg.lorenz.ensemble_size < 2) throw ConfigError("lorenz.ensemble_size must be >= 2");
  require_positive(cfg.lorenz.dt, "lorenz.dt");
  require_positive(cfg.lorenz.routine_noise_var, "lorenz.routine_noise_var");
  require_positive(cfg.lorenz.sensing_noise_frac, "lorenz.sensing_noise_frac");
}

void parse_tracking(const json& obj, RunConfig& cfg) {
  const std::string p = "tracking";
  check_keys(obj, p,
             {"num_uavs", "headings", "step_length", "horizon", "particles", "noise_sigma",
              "quadrature_nodes", "joint_limit", "target", "initial", "region", "audit"});
  auto& t = cfg.track;
  t.num_uavs = get_or<int>(obj, p, "num_uavs", t.num_uavs);
  t.headings = get_or<int>(obj, p, "headings", t.headings);
  t.step_length = get_or<double>(obj, p, "step_length", t.step_length);
  t.horizon = get_or<int>(obj, p, "horizon", t.horizon);
  t.particles = get_or<int>(obj, p, "particles", t.particles);
  t.noise_sigma = get_or<double>(obj, p, "noise_sigma", t.noise_sigma);
  t.quadrature.nodes_per_dim = get_or<int>(obj, p, "quadrature_nodes", t.quadrature.nodes_per_dim);
  t.quadrature.joint_limit = get_or<int>(obj, p, "joint_limit", t.quadrature.joint_limit);
  t.audit = get_or<bool>(obj, p, "audit", false);
  auto read_vec2 = [&](const char* key, Eigen::Vector2d& out) {
    if (!obj.contains(key)) return;
    auto v = get_or<std::vector<double>>(obj, p, key, {});
    if (v.size() != 2) throw ConfigError("'" + joined(p, key) + "' must be [x, y]");
    out = Eigen::Vector2d(v[0], v[1]);
  };
  read_vec2("target", t.target);
  read_vec2("initial", t.initial_position);
  if (obj.contains("region")) {
    auto v = get_or<std::vector<double>>(obj, p, "region", {});
    if (v.size() != 2 || v[0] <= 0.0 || v[1] <= 0.0)
      throw ConfigError("'tracking.region' must be positive [width, height]");
    t.region.lo = Eigen::Vector2d::Zero();
    t.region.hi = Eigen::Vector2d(v[0], v[1]);
  }
  if (t.num_uavs < 1) throw ConfigError("tracking.num_uavs must be >= 1");
  if (t.headings < 2) throw ConfigError("tracking.headings must be >= 2");
  if (t.horizon < 0) throw ConfigError("tracking.horizon must be >= 0");
  if (t.particles < 2) throw ConfigError("tracking.particles must be >= 2");
  if (t.quadrature.nodes_per_dim < 2) throw ConfigError("tracking.quadrature_nodes must be >= 2");
  require_positive(t.noise_sigma, "tracking.noise_sigma");
  require_positive(t.step_length, "tracking.step_length");
}

void parse_synthetic(const json& obj, RunConfig& cfg) {
  const std::string p = "synthetic";
  check_keys(obj, p,
             {"num_agents", "min_actions", "max_actions", "cardinality", "verification_vars",
              "verification_is_state", "rank_fraction", "noise_frac"});
  auto& s = cfg.synth;
  s.num_agents = get_or<int>(obj, p, "num_agents", s.num_agents);
  s.min_actions = get_or<int>(obj, p, "min_actions", s.min_actions);
  s.max_actions = get_or<int>(obj, p, "max_actions", s.max_actions);
  s.cardinality = get_or<int>(obj, p, "cardinality", s.cardinality);
  s.verification_vars = get_or<int>(obj, p, "verification_vars", s.verification_vars);
  s.verification_is_state = get_or<bool>(obj, p, "verification_is_state", s.verification_is_state);
  s.rank_fraction = get_or<double>(obj, p, "rank_fraction", s.rank_fraction);
  s.noise_frac = get_or<double>(obj, p, "noise_frac", s.noise_frac);
  if (s.num_agents < 1) throw ConfigError("synthetic.num_agents must be >= 1");
  if (s.min_actions < 1 || s.max_actions < s.min_actions)
    throw ConfigError("synthetic: need 1 <= min_actions <= max_actions");
  if (s.rank_fraction <= 0.0) throw ConfigError("synthetic.rank_fraction must be positive");
  if (s.noise_frac < 0.0) throw ConfigError("synthetic.noise_frac must be >= 0");
}

}  // namespace

RunConfig parse_run_config(const std::string& json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("configuration is not valid JSON: ") + e.what());
  }
  if (!j.is_object()) throw ConfigError("configuration root must be a JSON object");
  check_keys(j, "",
             {"schema_version", "scenario", "strategies", "alpha_bar", "seeds", "output_dir",
              "max_stages", "enumeration_budget", "lorenz", "tracking", "synthetic", "notes"});

  RunConfig cfg;
  cfg.schema_version = get_req<int>(j, "", "schema_version");
  if (cfg.schema_version != 1)
    throw ConfigError("unsupported schema_version " + std::to_string(cfg.schema_version));
  cfg.scenario = get_req<std::string>(j, "", "scenario");
  cfg.strategies = get_req<std::vector<std::string>>(j, "", "strategies");
  cfg.seeds = get_req<std::vector<std::uint64_t>>(j, "", "seeds");
  cfg.alpha_bar = get_or<double>(j, "", "alpha_bar", cfg.alpha_bar);
  cfg.output_dir = get_or<std::string>(j, "", "output_dir", cfg.output_dir);
  cfg.max_stages = get_or<int>(j, "", "max_stages", cfg.max_stages);
  cfg.enumeration_budget =
      get_or<unsigned long long>(j, "", "enumeration_budget", cfg.enumeration_budget);

  if (cfg.seeds.empty()) throw ConfigError("'seeds' must be non-empty");
  if (cfg.strategies.empty()) throw ConfigError("'strategies' must be non-empty");
  if (!(cfg.alpha_bar > 0.0 && cfg.alpha_bar <= 1.0))
    throw ConfigError("'alpha_bar' must be in (0, 1]");
  if (cfg.max_stages < 1) throw ConfigError("'max_stages' must be >= 1");

  const std::set<std::string>* allowed = nullptr;
  if (cfg.scenario == "tracking") allowed = &kTrackingStrategies;
  else if (cfg.scenario == "lorenz-targeting" || cfg.scenario == "synthetic-gaussian")
    allowed = &kGameStrategies;
  else
    throw ConfigError("unknown scenario '" + cfg.scenario + "'");
  for (const auto& s : cfg.strategies)
    if (!allowed->count(s))
      throw ConfigError("strategy '" + s + "' is not valid for scenario '" + cfg.scenario + "'");

  const std::string expected_block = cfg.scenario == "lorenz-targeting" ? "lorenz"
                                     : cfg.scenario == "tracking"       ? "tracking"
                                                                        : "synthetic";
  for (const char* block : {"lorenz", "tracking", "synthetic"}) {
    if (j.contains(block) && block != expected_block)
      throw ConfigError(std::string("block '") + block + "' does not match scenario '" +
                        cfg.scenario + "'");
  }

  if (j.contains("lorenz")) parse_lorenz(j.at("lorenz"), cfg);
  if (j.contains("tracking")) parse_tracking(j.at("tracking"), cfg);
  if (j.contains("synthetic")) parse_synthetic(j.at("synthetic"), cfg);
  cfg.track.alpha_bar = cfg.alpha_bar;
  cfg.track.jsfp_max_stages = cfg.max_stages;

  cfg.canonical = j.dump();  // nlohmann::json orders keys; stable across runs
  return cfg;
}

RunConfig load_run_config(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw ConfigError("cannot open configuration file '" + path + "'");
  std::stringstream ss;
  ss << is.rdbuf();
  return parse_run_config(ss.str());
}

std::vector<std::string> preset_names() {
  return {"lorenz-row6", "lorenz-2x3", "lorenz-3x3", "tracking-3uav", "synthetic-2agent"};
}

std::string preset_config(const std::string& name) {
  if (name == "lorenz-row6") {
    return R"({
  "schema_version": 1,
  "scenario": "lorenz-targeting",
  "strategies": ["optimal", "jsfp", "sequential", "local"],
  "alpha_bar": 0.3,
  "seeds": [1, 2, 3],
  "enumeration_budget": 40000000,
  "lorenz": {"topology": "row6", "ensemble_size": 1024},
  "notes": {
    "routine_noise_var": "0.5, a working default",
    "sensing_noise_frac": "adaptive sensor noise = 0.02 x mean search variance, a working default",
    "routine_network": "93 sensors rejection-sampled to be sparse over the search block"
  }
})";
  }
  if (name == "lorenz-2x3") {
    return R"({
  "schema_version": 1,
  "scenario": "lorenz-targeting",
  "strategies": ["jsfp", "sequential", "local", "iterative"],
  "alpha_bar": 0.3,
  "seeds": [1, 2, 3],
  "lorenz": {"topology": "2x3", "ensemble_size": 1024},
  "notes": {
    "routine_noise_var": "0.5, a working default",
    "sensing_noise_frac": "adaptive sensor noise = 0.02 x mean search variance, a working default"
  }
})";
  }
  if (name == "lorenz-3x3") {
    return R"({
  "schema_version": 1,
  "scenario": "lorenz-targeting",
  "strategies": ["jsfp", "sequential", "local", "iterative"],
  "alpha_bar": 0.3,
  "seeds": [1, 2, 3],
  "lorenz": {"topology": "3x3", "ensemble_size": 1024},
  "notes": {
    "routine_noise_var": "0.5, a working default",
    "sensing_noise_frac": "adaptive sensor noise = 0.02 x mean search variance, a working default"
  }
})";
  }
  if (name == "tracking-3uav") {
    return R"({
  "schema_version": 1,
  "scenario": "tracking",
  "strategies": ["jsfp"],
  "alpha_bar": 0.3,
  "seeds": [1, 2, 3],
  "tracking": {"num_uavs": 3, "headings": 12, "horizon": 20, "particles": 1000},
  "notes": {
    "step_length": "2 m per planning step, a working default",
    "noise_sigma": "0.5 m range noise, a working default",
    "target": "stationary truth at (25, 28), a working default"
  }
})";
  }
  if (name == "synthetic-2agent") {
    return R"({
  "schema_version": 1,
  "scenario": "synthetic-gaussian",
  "strategies": ["optimal", "jsfp", "sequential", "local", "iterative"],
  "alpha_bar": 0.3,
  "seeds": [1, 2, 3, 4, 5],
  "synthetic": {"num_agents": 2, "min_actions": 3, "max_actions": 6}
})";
  }
  throw ConfigError("unknown preset '" + name + "'");
}

std::uint64_t fnv1a64(const std::string& s) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

}  // namespace infoplan
