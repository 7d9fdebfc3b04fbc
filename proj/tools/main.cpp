#include <cstdlib>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "lab/config.hpp"
#include "lab/experiments.hpp"

namespace lab = mckean::lab;

int main(int argc, char** argv) {
  CLI::App app{"Interacting diffusions and their mean-field limit: experiment runner"};
  app.set_version_flag("--version", std::string(MCKEAN_LAB_VERSION));

  std::string experiment;
  std::string config_path;
  std::uint64_t seed = 0;
  std::string out_dir;
  bool validate_only = false;

  std::string names;
  for (const auto& n : lab::experiment_names()) names += (names.empty() ? "" : ", ") + n;
  app.add_option("experiment", experiment, "one of: " + names)->required();
  app.add_option("--config", config_path, "JSON experiment config")->required();
  auto* seed_opt = app.add_option("--seed", seed, "overrides the config seed");
  auto* out_opt = app.add_option("--out", out_dir, "overrides the config output directory");
  app.add_flag("--validate", validate_only, "check the config and exit without running");
  app.footer("MCKEAN_LAB_THREADS caps the number of worker threads.\n"
             "Exit status: 0 ok, 2 numerical failure, 3 config error.");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : lab::kConfigFailure;
  }

  lab::Overrides overrides;
  overrides.experiment = experiment;
  if (*seed_opt) overrides.seed = seed;
  if (*out_opt) overrides.output = out_dir;

  lab::ParseResult parsed;
  try {
    parsed = lab::parse_config(config_path, overrides);
  } catch (const std::exception& e) {
    std::cerr << "mckean-lab: " << e.what() << "\n";
    return lab::kConfigFailure;
  }
  // when running, model warnings are reported (and recorded) by execute
  for (const auto& d : parsed.diagnostics) {
    if (validate_only) {
      std::cout << lab::format(d) << "\n";
    } else if (d.level == lab::Level::kError) {
      std::cerr << lab::format(d) << "\n";
    }
  }
  if (lab::has_errors(parsed.diagnostics)) return lab::kConfigFailure;
  if (validate_only) return lab::kSuccess;
  return lab::execute(*parsed.config, std::cerr);
}
