// spdcsim: command-line front end for the simulation pipeline.
//
//   spdcsim <subcommand> --config FILE [--set section.key=value]...
//           [--output-dir DIR] [--counts FILE] [--quiet]
//
// Exit status: 0 when every output was written, 1 on a simulation or
// analysis error, 2 on a usage or configuration error.

#include <cstdio>
#include <exception>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "spdcsim/config.h"
#include "spdcsim/errors.h"
#include "spdcsim/pipeline.h"

namespace {

constexpr int kExitRuntime = 1;
constexpr int kExitUsage = 2;

const char* describe(spdcsim::Subcommand sub) {
  using spdcsim::Subcommand;
  switch (sub) {
    case Subcommand::kJsi: return "joint spectral intensity matrix";
    case Subcommand::kSpectrum: return "signal and idler marginals, FWHM, purity, HOM visibility";
    case Subcommand::kFringe: return "simulated polarization fringes and fitted visibilities";
    case Subcommand::kChsh: return "simulated CHSH measurement";
    case Subcommand::kTomoSim: return "simulated tomography counts";
    case Subcommand::kTomoFit: return "maximum-likelihood reconstruction of tomography counts";
    case Subcommand::kReport: return "full pipeline with a summary report";
  }
  return "";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Simulator for a PPKTP Sagnac-loop polarization-entangled photon source"};
  app.require_subcommand(1, 1);
  app.set_version_flag("--version", "spdcsim 0.1.0");

  std::string config_path;
  std::vector<std::string> overrides;
  std::optional<std::string> output_dir;
  std::optional<std::string> counts_path;
  bool quiet = false;

  app.add_option("-c,--config", config_path, "Run configuration file")->required();
  app.add_option("--set", overrides, "Override a key, e.g. --set state.white_noise_v=0.95")
      ->allow_extra_args(false)
      ->take_all();
  app.add_option("-o,--output-dir", output_dir, "Output directory (beats run.output_dir)");
  app.add_option("--counts", counts_path, "Tomography counts for tomo-fit");
  app.add_flag("-q,--quiet", quiet, "Do not print the summary");

  std::vector<std::pair<spdcsim::Subcommand, CLI::App*>> commands;
  for (const auto& name : spdcsim::subcommand_names()) {
    const auto sub = *spdcsim::parse_subcommand(name);
    CLI::App* command = app.add_subcommand(name, describe(sub));
    command->fallthrough();
    commands.emplace_back(sub, command);
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitUsage;
  }

  spdcsim::Subcommand selected = spdcsim::Subcommand::kReport;
  for (const auto& [sub, command] : commands) {
    if (command->parsed()) selected = sub;
  }

  spdcsim::RunConfig config;
  try {
    config = spdcsim::parse_config(config_path, overrides);
  } catch (const std::exception& e) {
    std::cerr << "spdcsim: " << config_path << ": " << e.what() << "\n";
    return kExitUsage;
  }
  if (output_dir) config.output_dir = *output_dir;

  spdcsim::RunOptions options;
  if (counts_path) options.counts_path = *counts_path;

  try {
    const auto outcome = spdcsim::run_subcommand(selected, config, options);
    if (!quiet) {
      std::cout << outcome.summary;
      for (const auto& path : outcome.files) std::cout << "wrote " << path.string() << "\n";
    }
  } catch (const std::exception& e) {
    std::cerr << "spdcsim " << spdcsim::to_string(selected) << ": " << e.what() << "\n";
    return kExitRuntime;
  }
  return 0;
}
