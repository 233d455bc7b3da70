#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "infoplan/lorenz95.hpp"
#include "infoplan/synthetic.hpp"
#include "infoplan/tracking.hpp"

namespace infoplan {

/// Bad run configuration: unknown key, wrong type, out-of-range value.
/// Maps to process exit code 2.
class ConfigError : public ArgumentError {
 public:
  using ArgumentError::ArgumentError;
};

/// A declarative run: scenario family, strategies to compare, seeds, and
/// engine parameters. Parsed from JSON with strict unknown-key rejection.
struct RunConfig {
  int schema_version = 1;
  std::string scenario;  // synthetic-gaussian | lorenz-targeting | tracking
  std::vector<std::string> strategies;
  double alpha_bar = 0.3;
  std::vector<std::uint64_t> seeds;
  std::string output_dir = "out";
  int max_stages = 200;
  unsigned long long enumeration_budget = 10'000'000ULL;

  lorenz95::ScenarioConfig lorenz;  // scenario == lorenz-targeting
  int lorenz_cardinality = 1;
  tracking::TrackingConfig track;   // scenario == tracking
  synthetic::SyntheticSpec synth;   // scenario == synthetic-gaussian

  /// Canonical serialization of the source document (for run manifests).
  std::string canonical;
};

RunConfig parse_run_config(const std::string& json_text);
RunConfig load_run_config(const std::string& path);

/// Built-in example configurations; non-default modelling choices are called
/// out in each preset's "notes" field.
std::vector<std::string> preset_names();
std::string preset_config(const std::string& name);  // JSON text

/// FNV-1a 64-bit hash, used to stamp run manifests.
std::uint64_t fnv1a64(const std::string& s);

}  // namespace infoplan
