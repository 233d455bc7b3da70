#include <iostream>

#include "CLI11.hpp"
#include "infoplan/runner.hpp"

namespace {

infoplan::RunConfig resolve_config(const std::string& config_path, const std::string& preset) {
  if (!config_path.empty() && !preset.empty())
    throw infoplan::ConfigError("give either --config or --preset, not both");
  if (!config_path.empty()) return infoplan::load_run_config(config_path);
  if (!preset.empty()) return infoplan::parse_run_config(infoplan::preset_config(preset));
  throw infoplan::ConfigError("one of --config or --preset is required");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"infoplan: cooperative sensor planning via potential games"};
  app.set_version_flag("--version", infoplan::kToolVersion);
  app.require_subcommand(1);

  std::string config_path, preset_name, out_dir;
  std::vector<std::uint64_t> seeds;
  int jobs = 1;

  CLI::App* solve = app.add_subcommand("solve", "run every configured (strategy, seed) cell");
  solve->add_option("--config", config_path, "JSON run configuration");
  solve->add_option("--preset", preset_name, "built-in configuration name");
  solve->add_option("--seed", seeds, "override the configured seed list");
  solve->add_option("--out", out_dir, "output directory (overrides output_dir)");
  solve->add_option("--jobs", jobs, "worker threads across seeds")->check(CLI::PositiveNumber);

  std::string preset_to_print;
  bool list_presets = false;
  CLI::App* preset = app.add_subcommand("preset", "print a built-in configuration");
  preset->add_option("name", preset_to_print, "preset name");
  preset->add_flag("--list", list_presets, "list available presets");

  std::uint64_t audit_seed = 0;
  std::string audit_trace;
  CLI::App* audit = app.add_subcommand("audit", "check a recorded (or freshly solved) joint "
                                                "action for Nash equilibrium");
  audit->add_option("--config", config_path, "JSON run configuration");
  audit->add_option("--preset", preset_name, "built-in configuration name");
  audit->add_option("--seed", audit_seed, "seed to audit")->required();
  audit->add_option("--trace", audit_trace, "solve-trace CSV; audits its last stage");

  CLI11_PARSE(app, argc, argv);

  try {
    if (solve->parsed()) {
      infoplan::RunConfig cfg = resolve_config(config_path, preset_name);
      if (!seeds.empty()) cfg.seeds = seeds;
      infoplan::run_solve(cfg, out_dir, jobs);
    } else if (preset->parsed()) {
      if (list_presets) {
        for (const auto& n : infoplan::preset_names()) std::cout << n << '\n';
      } else if (!preset_to_print.empty()) {
        std::cout << infoplan::preset_config(preset_to_print) << '\n';
      } else {
        throw infoplan::ConfigError("preset: give a name or --list");
      }
    } else if (audit->parsed()) {
      infoplan::RunConfig cfg = resolve_config(config_path, preset_name);
      infoplan::run_audit(cfg, audit_seed, audit_trace, std::cout);
    }
  } catch (const infoplan::NumericError& e) {
    std::cerr << "numeric error: " << e.what() << '\n';
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
