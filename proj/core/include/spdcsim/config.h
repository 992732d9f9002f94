#pragma once

// Run configuration: an INI-style file with one section per module.
//
//   [pump]        center_wavelength_nm*, fwhm_nm*, bandwidth, envelope
//   [crystal]     length_mm*, poling_period_um*, temperature_c* (number or
//                 "auto" for the degeneracy temperature), dispersion_model
//   [grid]        signal_min_nm, signal_max_nm, idler_min_nm, idler_max_nm,
//                 points_per_axis
//   [state]       phi_rad*, beta*, white_noise_v*
//   [source]      pair_rate_per_mw*, pump_power_mw*, arm_efficiency_1,
//                 arm_efficiency_2, dark_rate_cps, coincidence_window_ns,
//                 integration_time_s
//   [budget]      <component> = efficiency, any names
//   [fringe]      theta1_deg (comma list), sweep_start_deg, sweep_stop_deg,
//                 sweep_step_deg
//   [chsh]        preset, or a_deg, a_prime_deg, b_deg, b_prime_deg
//   [tomography]  projector_set, trials
//   [run]         seed*, output_dir
//
// Starred keys are mandatory. Unknown sections and keys are rejected.

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "spdcsim/crystal_optics.h"
#include "spdcsim/measurement_sim.h"
#include "spdcsim/polarization_state.h"
#include "spdcsim/spectral_engine.h"

namespace spdcsim {

// Environment variable that replaces run.output_dir when set.
inline constexpr const char* kOutputDirEnv = "SPDCSIM_OUTPUT_DIR";

struct FringeConfig {
  std::vector<double> theta1_deg{0.0, 45.0, 90.0, 135.0};
  double sweep_start_deg = 0.0;
  double sweep_stop_deg = 350.0;
  double sweep_step_deg = 10.0;

  std::vector<double> sweep() const;
};

struct RunConfig {
  PumpSpec pump;
  CrystalSpec crystal;
  bool solve_temperature = false;  // temperature_c = auto
  SpectralGrid grid;
  SagnacParams state;
  double white_noise_v = 1.0;
  SourceModel source;
  EfficiencyBudget budget;
  FringeConfig fringe;
  std::string chsh_preset = "psi-minus";
  ChshSettings chsh;
  std::string projector_set = "full-36";
  int monte_carlo_trials = 100;
  std::uint64_t seed = 0;
  std::filesystem::path output_dir = "out";
};

// Parses and validates. `overrides` are "section.key=value" strings applied
// on top of the file. Throws ConfigError (with a line number for syntax
// errors) or DomainError from module validation, rethrown as ConfigError
// naming the field.
RunConfig parse_config(const std::filesystem::path& path,
                       std::span<const std::string> overrides = {});
RunConfig parse_config_text(std::string_view text, std::span<const std::string> overrides = {});

// Stable "section.key = value" listing of every effective setting.
std::string canonical_config(const RunConfig& config);
// 16 hex digits of FNV-1a over canonical_config.
std::string config_hash(const RunConfig& config);

// The state the configuration describes: Sagnac ket mixed with white noise.
TwoQubitState configured_state(const RunConfig& config);

}  // namespace spdcsim
