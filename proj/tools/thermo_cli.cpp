#include "thermo/config.hpp"
#include "thermo/run.hpp"

#include <CLI11.hpp>
#include <omp.h>

#include <fstream>
#include <iostream>
#include <sstream>

int main(int argc, char** argv) {
  CLI::App app{"Thermodynamic formalism on finite presentations"};
  std::string config_path;
  std::string out_dir = "out";
  int threads = 0;
  std::uint64_t seed = 0;
  app.add_option("--config", config_path, "Run configuration file")->required()->check(CLI::ExistingFile);
  app.add_option("--out", out_dir, "Output directory")->capture_default_str();
  auto* threads_opt = app.add_option("--threads", threads, "Worker threads (default: hardware)")
                          ->check(CLI::PositiveNumber);
  auto* seed_opt = app.add_option("--seed", seed, "Overrides run.seed");
  CLI11_PARSE(app, argc, argv);

  if (*threads_opt) omp_set_num_threads(threads);

  std::ifstream in(config_path);
  std::ostringstream text;
  text << in.rdbuf();

  thermo::RunOptions options;
  options.out_dir = out_dir;

  auto parsed = thermo::parse_config(text.str());
  if (!parsed.ok()) {
    for (const auto& issue : parsed.issues) std::cerr << issue.describe() << '\n';
    return thermo::report_config_issues(parsed.issues, options).exit_code;
  }
  auto config = *parsed.config;
  if (*seed_opt) config.seed = seed;

  const auto outcome = thermo::run(config, options);
  std::cout << thermo::summary_json(&config, outcome);
  if (outcome.exit_code == thermo::kExitError) {
    std::cerr << outcome.message << '\n';
  }
  return outcome.exit_code;
}
