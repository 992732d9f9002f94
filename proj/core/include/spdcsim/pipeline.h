#pragma once

// Subcommand dispatch. Each subcommand computes all of its outputs first and
// then writes them atomically under config.output_dir:
//
//   jsi       jsi.csv
//   spectrum  marginal_signal.csv, marginal_idler.csv, spectrum.txt
//   fringe    fringe_theta1_<deg>.csv per analyzer-1 angle, fringe.txt
//   chsh      chsh_counts.csv, chsh.txt
//   tomo-sim  tomo_counts.csv
//   tomo-fit  tomo_result.txt (reads tomo_counts.csv or --counts)
//   report    everything above plus report.txt
//
// Random streams are seeded by derive_seed(config.seed, "<subcommand>"), so
// `report` reproduces the counts of the individual subcommands.

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "spdcsim/config.h"

namespace spdcsim {

enum class Subcommand { kJsi, kSpectrum, kFringe, kChsh, kTomoSim, kTomoFit, kReport };

std::string_view to_string(Subcommand sub);
std::optional<Subcommand> parse_subcommand(std::string_view name);
std::vector<std::string> subcommand_names();

struct RunOptions {
  std::optional<std::filesystem::path> counts_path;  // tomo-fit input
};

struct RunOutcome {
  std::vector<std::filesystem::path> files;
  std::string summary;  // human-readable headline numbers
};

// Throws on any module error. Files written before a failure are removed,
// so either every output exists or none of this call's outputs do.
RunOutcome run_subcommand(Subcommand sub, const RunConfig& config, const RunOptions& options = {});

// "spdcsim <subcommand> config_hash=<hash> seed=<seed>"
std::string provenance(Subcommand sub, const RunConfig& config);

}  // namespace spdcsim
