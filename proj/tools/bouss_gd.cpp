/// @file bouss_gd.cpp
/// @brief Experiment driver CLI:
///        bouss-gd <experiment-id> [--config <file>] [--full] [--out <dir>]
#include <exception>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "bouss/experiments.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Modular grad-div Boussinesq solver: experiment drivers"};
  std::string experiment;
  std::string config_path;
  std::string out_dir = "out";
  bool full = false;
  app.add_option("experiment", experiment,
                 "one of: spatial-rates, temporal-rates, pressure-robust, "
                 "rayleigh-sweep, element-study, marsigli")
      ->required();
  app.add_option("--config", config_path, "flat key = value config file");
  app.add_option("--out", out_dir, "output directory");
  app.add_flag("--full", full, "run the expensive rows trimmed from the defaults");
  CLI11_PARSE(app, argc, argv);

  bouss::ExperimentOptions opt;
  opt.out_dir = out_dir;
  opt.full = full;
  try {
    if (!config_path.empty()) opt.config = bouss::Config::parse_file(config_path);

    if (experiment == "spatial-rates")
      bouss::run_spatial_rates(opt);
    else if (experiment == "temporal-rates")
      bouss::run_temporal_rates(opt);
    else if (experiment == "pressure-robust")
      bouss::run_pressure_robust(opt);
    else if (experiment == "rayleigh-sweep")
      bouss::run_rayleigh_sweep(opt);
    else if (experiment == "element-study")
      bouss::run_element_study(opt);
    else if (experiment == "marsigli")
      bouss::run_marsigli(opt);
    else {
      std::cerr << "unknown experiment id: " << experiment << "\n";
      return 2;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
