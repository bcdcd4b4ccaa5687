#include <iostream>

#include <CLI11.hpp>

#include "config.hpp"
#include "runner.hpp"

int main(int argc, char** argv) {
  using namespace steklov::cli;

  CLI::App app{"Steklov eigenvalues of weighted Laplacians: ball tables, FEM spectra, inequality sweeps"};
  std::string config_path, out_dir = ".", format;
  int jobs = 1;
  std::uint64_t seed = 0;
  app.add_option("--config", config_path, "configuration file")->required()->check(CLI::ExistingFile);
  app.add_option("--out", out_dir, "output directory")->capture_default_str();
  app.add_option("--jobs", jobs, "worker threads for sweeps")->check(CLI::PositiveNumber)->capture_default_str();
  auto* seed_opt = app.add_option("--seed", seed, "seed for randomized weights (overrides the config)");
  app.add_option("--format", format, "csv, json or both (overrides the config)")
      ->check(CLI::IsMember({"csv", "json", "both"}));
  CLI11_PARSE(app, argc, argv);

  try {
    RunConfig cfg = load_config(config_path);
    if (seed_opt->count()) cfg.seed = seed;
    if (!format.empty()) cfg.format = format;
    return run(std::move(cfg), RunOptions{out_dir, jobs}, std::cerr);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitError;
  }
}
