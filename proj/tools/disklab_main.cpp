#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "disklab/config.hpp"
#include "disklab/error.hpp"
#include "disklab/experiment.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Bessel steady states of 2D Euler in the unit disk: experiment runner"};
  std::string kind, config_path, out_dir;
  std::uint64_t seed = 0;
  app.add_option("kind", kind, "experiment kind")
      ->required()
      ->check(CLI::IsMember({"bessel-table", "verify-identities", "eigs", "steady-check", "burton-maximize", "evolve",
                             "stability-sweep", "rotate-demo", "sharpness-demo"}));
  app.add_option("--config", config_path, "key = value configuration file")->required()->check(CLI::ExistingFile);
  auto* out_opt = app.add_option("--out", out_dir, "output directory (overrides the config)");
  auto* seed_opt = app.add_option("--seed", seed, "random seed (overrides the config)");
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : disklab::kExitConfigError;
  }

  disklab::ExperimentConfig cfg;
  try {
    std::ifstream in(config_path);
    std::stringstream text;
    text << in.rdbuf();
    cfg = disklab::parse_config(text.str(), kind);
    if (*out_opt) cfg.output = out_dir;
    if (*seed_opt) cfg.seed = seed;
    disklab::validate(cfg);
  } catch (const disklab::ConfigError& e) {
    std::cerr << e.what() << "\n";
    return disklab::kExitConfigError;
  }

  const int status = disklab::run_experiment(cfg);
  const char* label = status == disklab::kExitOk                  ? "pass"
                      : status == disklab::kExitToleranceFailure ? "tolerance failure"
                      : status == disklab::kExitConfigError      ? "config error"
                                                                  : "runtime error";
  std::cout << disklab::to_string(cfg.kind) << ": " << label << " (" << cfg.output << "/manifest.json)\n";
  return status;
}
